"""Compare the compiled and NumPy softmin kernels, and a full divergence solve
on each backend.

    python3 benchmarks/bench_kernels.py [--sizes 250 500 1000 2000] [--repeat 5]
"""

import argparse
import time

import numpy as np

from entropic_ot import _backend
from entropic_ot.costs import quadratic_cost
from entropic_ot.divergence import sinkhorn_divergence
from entropic_ot.measures import from_samples, sample_uniform_box
from entropic_ot.sinkhorn import SinkhornConfig


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", type=int, nargs="+", default=[250, 500, 1000, 2000])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    backends = ["python"]
    try:
        _backend.get_kernels("cython")
        backends.insert(0, "cython")
    except ImportError:
        print("compiled kernels unavailable; timing the fallback only")

    cost = quadratic_cost()
    cfg = SinkhornConfig(epsilon=1.0, tol=1e-9)
    print(f"{'n':>6} {'backend':>8} {'half-sweep ms':>14} {'divergence s':>13}")
    for n in args.sizes:
        x1 = sample_uniform_box((0, 0), (0.5, 0.5), n, 1)
        x2 = sample_uniform_box((0, 0), (0.5, 0.5), n, 2)
        C = cost.matrix(x1, x2)
        pot = np.zeros(n)
        log_w = np.full(n, -np.log(n))
        out = np.empty(n)
        mu1, mu2 = from_samples(x1), from_samples(x2)
        results = {}
        for name in backends:
            k = _backend.get_kernels(name)
            t_k = best_of(lambda: k.softmin_rows(C, pot, log_w, 1.0, out), args.repeat)
            results[name] = out.copy()
            t_d = best_of(
                lambda: sinkhorn_divergence(mu1, mu2, cost, cfg, backend=name),
                max(1, args.repeat // 2),
            )
            print(f"{n:>6} {name:>8} {1e3 * t_k:>14.3f} {t_d:>13.3f}")
        if len(results) == 2:
            gap = np.abs(results["cython"] - results["python"]).max()
            print(f"{'':>6} max kernel difference {gap:.2e}")


if __name__ == "__main__":
    main()
