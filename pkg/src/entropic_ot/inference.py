"""Resampling and CLT inference for the Sinkhorn divergence and the entropic map."""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from statistics import NormalDist
from typing import Optional, Sequence

import numpy as np

from ._parallel import pool_map
from .costs import CostSpec
from .divergence import sinkhorn_divergence
from .measures import DiscreteMeasure, from_samples
from .potentials import barycentric_map
from .sinkhorn import SinkhornConfig, solve_schrodinger

DEGENERATE_VARIANCE = 1e-12
MAX_BOOTSTRAP_TOL = 1e-9


def _order_index(alpha: float, size: int) -> int:
    # 0-based index of the ceil(alpha * size)-th order statistic; the small
    # guard keeps alpha * size that is an integer up to rounding on that integer
    k = math.ceil(alpha * size - 1e-9)
    return min(max(k, 1), size) - 1


def empirical_quantile(sorted_values, alpha: float) -> float:
    """Right-continuous inverse of the empirical CDF: order statistic ceil(alpha * B)."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    return float(sorted_values[_order_index(alpha, len(sorted_values))])


@dataclass(frozen=True)
class ResampleReport:
    """Resampling distribution of a statistic, replicates stored sorted."""

    statistic_name: str
    observed: float
    replicate_values: np.ndarray
    m: Optional[int] = None
    seed: Optional[int] = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        vals = np.sort(np.asarray(self.replicate_values, dtype=np.float64))
        if vals.size == 0:
            raise ValueError("replicate_values must be nonempty")
        vals.setflags(write=False)
        object.__setattr__(self, "replicate_values", vals)

    @property
    def B(self) -> int:
        return int(self.replicate_values.size)

    def quantile(self, alpha: float) -> float:
        return empirical_quantile(self.replicate_values, alpha)

    @property
    def rank_of_observed(self) -> float:
        """Fraction of replicates <= the observed statistic."""
        return float(np.searchsorted(self.replicate_values, self.observed, side="right") / self.B)

    def to_dict(self) -> dict:
        out = {
            "statistic_name": self.statistic_name,
            "observed": self.observed,
            "replicates": [float(v) for v in self.replicate_values],
            "B": self.B,
            "m": self.m,
            "seed": self.seed,
            "rank_of_observed": self.rank_of_observed,
        }
        out.update(self.extra)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write("replicate,value\n")
            for i, v in enumerate(self.replicate_values):
                fh.write(f"{i},{float(v)!r}\n")


@dataclass(frozen=True)
class CltInterval:
    lo: float
    hi: float
    sigma_hat: float
    estimate: float
    n: int
    alpha: float
    degenerate: bool

    def __iter__(self):
        # unpacks as (lo, hi, sigma_hat)
        return iter((self.lo, self.hi, self.sigma_hat))

    def covers(self, value: float) -> bool:
        return self.lo <= value <= self.hi


def _check_alpha(alpha):
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")


def _equal_sizes(sample1, sample2):
    x1 = np.asarray(sample1, dtype=np.float64)
    x2 = np.asarray(sample2, dtype=np.float64)
    x1 = x1.reshape(len(x1), -1)
    x2 = x2.reshape(len(x2), -1)
    if x1.shape[0] != x2.shape[0]:
        raise ValueError("two-sample procedures need equal sample sizes")
    if x1.shape[1] != x2.shape[1]:
        raise ValueError("samples must share the same dimension")
    return x1, x2


def clt_interval(sample1, sample2, cost: CostSpec, config=None, alpha: float = 0.05) -> CltInterval:
    """Normal-approximation interval for the population Sinkhorn divergence.

    estimate +- z_{1 - alpha/2} * sigma_hat / sqrt(n), with sigma_hat^2 the
    plug-in variance of the potential differences.  ``degenerate`` flags a
    variance below 1e-12, where the normal limit collapses (e.g. equal
    populations) and the interval carries no information.
    """
    _check_alpha(alpha)
    x1, x2 = _equal_sizes(sample1, sample2)
    n = x1.shape[0]
    bundle = sinkhorn_divergence(from_samples(x1), from_samples(x2), cost, config)
    var = max(bundle.variance(), 0.0)
    sigma = math.sqrt(var)
    z = NormalDist().inv_cdf(1.0 - alpha / 2.0)
    half = z * sigma / math.sqrt(n)
    return CltInterval(
        lo=bundle.sbar - half, hi=bundle.sbar + half, sigma_hat=sigma,
        estimate=bundle.sbar, n=n, alpha=alpha, degenerate=var < DEGENERATE_VARIANCE,
    )


def _check_bootstrap_config(config):
    config = config or SinkhornConfig()
    if config.tol > MAX_BOOTSTRAP_TOL:
        raise ValueError(f"bootstrap replicates need tol <= {MAX_BOOTSTRAP_TOL}")
    return config


def _mn_replicate(args):
    pooled, m, cost, config, seed = args
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, pooled.shape[0], size=2 * m)
    z = pooled[idx]
    rho1, rho2 = from_samples(z[:m]), from_samples(z[m:])
    return m * sinkhorn_divergence(rho1, rho2, cost, config).sbar


def mn_bootstrap_null(
    sample1,
    sample2,
    m: int,
    B: int,
    cost: CostSpec,
    config=None,
    seed: int = 0,
    observed: Optional[float] = None,
    threads: Optional[int] = None,
) -> ResampleReport:
    """Two-sample m-out-of-n bootstrap of n * Sbar under the null.

    Each replicate draws 2m points i.i.d. from the pooled sample, splits them
    into two pseudo-samples of size m and records m * Sbar between them.
    Replicate b uses the generator seeded with ``seed + b``.  ``observed``
    (n * Sbar of the data) is computed unless supplied.
    """
    x1, x2 = _equal_sizes(sample1, sample2)
    n = x1.shape[0]
    if m < 2:
        raise ValueError("m must be >= 2")
    if m > n / 2:
        raise ValueError(f"m = {m} exceeds n / 2 = {n / 2}; m must be o(n)")
    if m > n / 5:
        warnings.warn(f"m = {m} is above n / 5; the bootstrap needs m = o(n)", stacklevel=2)
    if B < 1:
        raise ValueError("B must be >= 1")
    config = _check_bootstrap_config(config)
    if observed is None:
        observed = n * sinkhorn_divergence(from_samples(x1), from_samples(x2), cost, config).sbar
    pooled = np.vstack([x1, x2])
    jobs = [(pooled, m, cost, config, seed + b) for b in range(B)]
    values = pool_map(_mn_replicate, jobs, threads=threads, label="bootstrap replicate")
    return ResampleReport(
        statistic_name="n_sbar", observed=float(observed), replicate_values=values,
        m=m, seed=seed, extra={"n": n},
    )


@dataclass(frozen=True)
class ConfidenceBand:
    grid: np.ndarray
    center: np.ndarray
    half_width: float
    alpha: float
    coordinate: int
    q_hat: float
    n: int

    @property
    def lower(self) -> np.ndarray:
        return self.center - self.half_width

    @property
    def upper(self) -> np.ndarray:
        return self.center + self.half_width

    def covers(self, values) -> bool:
        values = np.asarray(values, dtype=np.float64)
        return bool(np.all((self.lower <= values) & (values <= self.upper)))

    def to_dict(self) -> dict:
        return {
            "grid": self.grid.tolist(),
            "center": self.center.tolist(),
            "half_width": self.half_width,
            "q_hat": self.q_hat,
            "alpha": self.alpha,
            "coordinate": self.coordinate,
            "n": self.n,
        }


def _band_replicate(args):
    mu1, sample2, grid, j, center, cost, config, seed = args
    n = sample2.shape[0]
    rng = np.random.default_rng(seed)
    resample = sample2[rng.integers(0, n, size=n)]
    sol = solve_schrodinger(mu1, from_samples(resample), cost, config)
    boot = barycentric_map(sol, grid)[:, j]
    return math.sqrt(n) * float(np.max(np.abs(boot - center)))


def map_confidence_band(
    mu1_known: DiscreteMeasure,
    sample2,
    coordinate: int,
    grid,
    alpha: float,
    B: int,
    cost: CostSpec,
    config=None,
    seed: int = 0,
    threads: Optional[int] = None,
) -> ConfidenceBand:
    """Uniform bootstrap band for one coordinate of the entropic map, source known.

    ``coordinate`` is 1-based.  The half-width is q/sqrt(n), q being the
    empirical (1 - alpha)-quantile of sup_grid sqrt(n)|T_B - T| over B
    bootstrap resamples of ``sample2``.
    """
    _check_alpha(alpha)
    if cost.name != "quadratic":
        raise ValueError("entropic map requires quadratic cost")
    x2 = np.asarray(sample2, dtype=np.float64)
    x2 = x2.reshape(len(x2), -1)
    grid = np.asarray(grid, dtype=np.float64)
    grid = grid.reshape(len(grid), -1)
    if grid.shape[0] == 0:
        raise ValueError("grid must be nonempty")
    d = mu1_known.dim
    if not 1 <= coordinate <= d:
        raise ValueError(f"coordinate must be in 1..{d}")
    if B < 1:
        raise ValueError("B must be >= 1")
    config = _check_bootstrap_config(config)
    j = coordinate - 1
    sol = solve_schrodinger(mu1_known, from_samples(x2), cost, config)
    center = barycentric_map(sol, grid)[:, j]
    jobs = [(mu1_known, x2, grid, j, center, cost, config, seed + b) for b in range(B)]
    stats = np.sort(pool_map(_band_replicate, jobs, threads=threads, label="bootstrap replicate"))
    q = empirical_quantile(stats, 1.0 - alpha)
    n = x2.shape[0]
    return ConfidenceBand(
        grid=grid, center=center, half_width=q / math.sqrt(n), alpha=alpha,
        coordinate=coordinate, q_hat=q, n=n,
    )


def pp_curve(ranks: Sequence[float], grid_size: int = 101):
    """P-P curve of calibration ranks: fraction of ranks <= a on a uniform grid of a."""
    r = np.sort(np.asarray(ranks, dtype=np.float64))
    a = np.linspace(0.0, 1.0, grid_size)
    return a, np.searchsorted(r, a, side="right") / r.size


def pp_sup_deviation(ranks: Sequence[float]) -> float:
    """sup_a |F(a) - a| for the empirical CDF F of the ranks (exact, not gridded)."""
    r = np.sort(np.asarray(ranks, dtype=np.float64))
    k = r.size
    upper = np.arange(1, k + 1) / k - r
    lower = r - np.arange(0, k) / k
    return float(max(upper.max(), lower.max(), 0.0))
