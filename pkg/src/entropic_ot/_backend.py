"""Kernel backend selection.

The compiled extension is preferred; the NumPy fallback is used when the
extension is missing or when ``ENTROPIC_PURE_PYTHON`` is set to a non-empty,
non-zero value before import.
"""

import os

from . import _kernels_py

_force_python = os.environ.get("ENTROPIC_PURE_PYTHON", "") not in ("", "0")

if _force_python:
    _compiled = None
else:
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        _compiled = None

BACKEND = "cython" if _compiled is not None else "python"

_impl = _compiled if _compiled is not None else _kernels_py


def available():
    """Names of the kernel backends that can be selected."""
    return ("cython", "python") if _compiled is not None else ("python",)


def get_kernels(name=None):
    """Return the kernel module for ``name`` ("cython", "python" or None for the default)."""
    if name is None:
        return _impl
    if name == "python":
        return _kernels_py
    if name == "cython":
        if _compiled is None:
            raise ImportError("compiled kernels are not available")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")


def softmin_rows(cost, pot, log_w, eps, out):
    _impl.softmin_rows(cost, pot, log_w, eps, out)


def softmin_cols(cost, pot, log_w, eps, out):
    _impl.softmin_cols(cost, pot, log_w, eps, out)
