"""Sinkhorn independence statistic and its permutation calibration."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from ._parallel import pool_map
from .costs import CostSpec
from .divergence import _self_config
from .inference import ResampleReport
from .measures import PairedSample, ProductMeasure, from_samples
from .sinkhorn import SinkhornConfig, solve_schrodinger, solve_schrodinger_product

DEFAULT_MAX_N = 300


class SampleTooLargeError(ValueError):
    pass


def _check_cap(n, max_n):
    if n > max_n:
        raise SampleTooLargeError(
            f"n = {n} exceeds the cap of {max_n}: the product of marginals has n^2 atoms; "
            "subsample the data or raise max_n"
        )


def _product_self_cost(product: ProductMeasure, cost: CostSpec, config: SinkhornConfig) -> float:
    """EOT cost of a product measure with itself.

    For an additive cost the optimal self-coupling of a product measure is the
    product of the factor couplings, so the cost splits into the two factor
    self-costs.  Non-additive costs solve on the materialised product.
    """
    cfg = _self_config(config)
    if cost.separable:
        d1, d = product.split, product.first.dim + product.second.dim
        cv = cost.block(np.arange(d1))
        cw = cost.block(np.arange(d1, d))
        sv = solve_schrodinger(product.first, product.first, cv, cfg, symmetric=True).value()
        sw = solve_schrodinger(product.second, product.second, cw, cfg, symmetric=True).value()
        return sv + sw
    joint = product.materialize()
    return solve_schrodinger(joint, joint, cost, cfg, symmetric=True).value()


class _IndependenceProblem:
    """Pieces of D_n that do not change when the w column is permuted."""

    def __init__(self, s: PairedSample, cost: CostSpec, config: SinkhornConfig):
        self.s = s
        self.cost = cost
        self.config = config
        self.product = ProductMeasure.of_sample(s)
        self.s_product = _product_self_cost(self.product, cost, config)

    def statistic(self, w: Optional[np.ndarray] = None) -> float:
        w = self.s.w if w is None else w
        joint = from_samples(np.hstack([self.s.v, w]))
        prod = self.product.materialize()
        if joint.same_as(prod):
            return 0.0
        cfg = self.config
        s_joint = solve_schrodinger(joint, joint, self.cost, _self_config(cfg), symmetric=True).value()
        s_cross = solve_schrodinger_product(joint, self.product, self.cost, cfg).value()
        return s_cross - 0.5 * (s_joint + self.s_product)


def independence_statistic(
    s: PairedSample,
    cost: CostSpec,
    config: Optional[SinkhornConfig] = None,
    max_n: int = DEFAULT_MAX_N,
) -> float:
    """D_n: Sinkhorn divergence between the joint empirical measure and the
    product of its marginals."""
    _check_cap(s.n, max_n)
    return _IndependenceProblem(s, cost, config or SinkhornConfig()).statistic()


@dataclass(frozen=True)
class IndependenceResult:
    d_n: float
    n: int
    scaled: float
    calibration: ResampleReport
    p_value: float

    def to_dict(self) -> dict:
        return {
            "d_n": self.d_n,
            "n": self.n,
            "scaled": self.scaled,
            "p_value": self.p_value,
            "B": self.calibration.B,
            "seed": self.calibration.seed,
            "calibration": [float(v) for v in self.calibration.replicate_values],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _perm_replicate(args):
    problem, seed = args
    rng = np.random.default_rng(seed)
    perm = rng.permutation(problem.s.n)
    return problem.s.n * problem.statistic(problem.s.w[perm])


def independence_test(
    s: PairedSample,
    B: int,
    cost: CostSpec,
    config: Optional[SinkhornConfig] = None,
    seed: int = 0,
    max_n: int = DEFAULT_MAX_N,
    threads: Optional[int] = None,
) -> IndependenceResult:
    """Permutation test of independence based on n * D_n.

    Replicate b permutes the w column with the generator seeded ``seed + b``.
    The p-value is (1 + #{replicates >= observed}) / (1 + B).
    """
    if s.n < 4:
        raise ValueError("independence test needs n >= 4")
    if B < 1:
        raise ValueError("B must be >= 1")
    _check_cap(s.n, max_n)
    problem = _IndependenceProblem(s, cost, config or SinkhornConfig())
    d_n = problem.statistic()
    scaled = s.n * d_n
    values = pool_map(
        _perm_replicate, [(problem, seed + b) for b in range(B)],
        threads=threads, label="permutation replicate",
    )
    report = ResampleReport("n_d_n", scaled, values, seed=seed, extra={"n": s.n})
    p_value = (1 + int(np.sum(values >= scaled))) / (1 + B)
    return IndependenceResult(d_n=d_n, n=s.n, scaled=scaled, calibration=report, p_value=p_value)


def kernel_h(f: Callable, x1, x2, d1: int) -> float:
    """Symmetrised kernel f(v1, w1) + f(v2, w2) - f(v1, w2) - f(v2, w1)."""
    x1 = np.asarray(x1, dtype=np.float64)
    x2 = np.asarray(x2, dtype=np.float64)
    v1, w1 = x1[:d1], x1[d1:]
    v2, w2 = x2[:d1], x2[d1:]
    cat = np.concatenate
    return float(f(cat([v1, w1])) + f(cat([v2, w2])) - f(cat([v1, w2])) - f(cat([v2, w1])))


def _cross_values(s: PairedSample, f: Callable) -> np.ndarray:
    # F[i, j] = f(v_i, w_j)
    n = s.n
    rows = np.hstack([np.repeat(s.v, n, axis=0), np.tile(s.w, (n, 1))])
    return np.asarray([f(r) for r in rows], dtype=np.float64).reshape(n, n)


@dataclass(frozen=True)
class UstatDecomposition:
    u_n: float
    two_delta: float
    remainder: float
    bound: float


def ustat_decomposition_check(s: PairedSample, f: Callable) -> UstatDecomposition:
    """U-statistic with kernel h_f versus 2 (pi_n(f) - pi_n^V x pi_n^W (f)).

    Every term is summed directly: u_n over all ordered pairs i != j and the
    product-measure average over all n^2 pairs.  ``bound`` is 4 max|f| / n,
    which the remainder never exceeds.
    """
    n = s.n
    if n < 2:
        raise ValueError("need n >= 2")
    F = _cross_values(s, f)
    diag = np.diag(F)
    h = diag[:, None] + diag[None, :] - F - F.T
    np.fill_diagonal(h, 0.0)
    u_n = float(h.sum() / (n * (n - 1)))
    two_delta = float(2.0 * (diag.mean() - F.mean()))
    return UstatDecomposition(
        u_n=u_n, two_delta=two_delta, remainder=u_n - two_delta,
        bound=4.0 * float(np.abs(F).max()) / n,
    )


def ustat_decomposition_exact(F) -> tuple:
    """Exact rational (u_n, two_delta, remainder) from a matrix of Fraction values F[i][j] = f(v_i, w_j)."""
    n = len(F)
    tr = sum((F[i][i] for i in range(n)), Fraction(0))
    total = sum((F[i][j] for i in range(n) for j in range(n)), Fraction(0))
    hsum = sum(
        (F[i][i] + F[j][j] - F[i][j] - F[j][i] for i in range(n) for j in range(n) if i != j),
        Fraction(0),
    )
    u_n = hsum / (n * (n - 1))
    two_delta = 2 * (tr / n - total / (n * n))
    return u_n, two_delta, u_n - two_delta
