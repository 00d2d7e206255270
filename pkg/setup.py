import os

from Cython.Build import cythonize
from setuptools import Extension, setup

compile_args = ["-O3", "-ffast-math", "-fno-finite-math-only"]
if not os.environ.get("ENTROPIC_PORTABLE_BUILD"):
    compile_args.append("-march=native")

extensions = [
    Extension(
        "entropic_ot._kernels",
        ["src/entropic_ot/_kernels.pyx"],
        extra_compile_args=compile_args,
        # vectorised exp from glibc
        libraries=["mvec", "m"],
    )
]

setup(
    ext_modules=cythonize(extensions, compiler_directives={"language_level": "3"}),
)
