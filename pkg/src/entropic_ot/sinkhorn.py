"""Schrodinger-system solver for entropic optimal transport between discrete measures.

The potentials solve

    sum_j w2_j exp((phi1_i + phi2_j - c_ij) / eps) = 1   for every i,
    sum_i w1_i exp((phi1_i + phi2_j - c_ij) / eps) = 1   for every j,

and are pinned by phi1[ref1] == phi2[ref2].  Updates alternate the two
soft-minimum maps in the log domain.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Tuple

import numpy as np

from . import _backend
from .costs import CostSpec
from .measures import DiscreteMeasure, ProductMeasure

# relative size below which a factored partial sum is treated as underflowed
_FACTORED_FLOOR = 1e-200


class SinkhornConvergenceError(RuntimeError):
    """Raised when the iteration budget runs out before the residual reaches ``tol``."""

    def __init__(self, message, final_violation, iterations):
        super().__init__(message)
        self.final_violation = final_violation
        self.iterations = iterations


class NumericalError(FloatingPointError):
    """Non-finite values in the cost matrix or the iterates."""


@dataclass(frozen=True)
class SinkhornConfig:
    epsilon: float = 1.0
    tol: float = 1e-9
    max_iter: int = 10000
    reference_index_1: int = 0
    reference_index_2: int = 0

    def __post_init__(self):
        if not (self.epsilon > 0 and np.isfinite(self.epsilon)):
            raise ValueError("epsilon must be a positive finite number")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.reference_index_1 < 0 or self.reference_index_2 < 0:
            raise ValueError("reference indices must be nonnegative")


@dataclass(frozen=True, eq=False)
class EotSolution:
    """Converged, normalised potentials of one EOT problem.

    ``plan_total`` is the mass of the plan implied by the potentials (one up
    to the residual); it is what the dual objective needs and is recorded so
    that the cost value does not require the cost matrix again.
    """

    mu1: DiscreteMeasure
    mu2: DiscreteMeasure
    cost: CostSpec
    config: SinkhornConfig
    phi1: np.ndarray
    phi2: np.ndarray
    iterations: int
    final_violation: float
    plan_total: float = 1.0
    residual_history: Tuple[float, ...] = field(default=(), repr=False)
    symmetric: bool = False
    _cost_matrix: Optional[np.ndarray] = field(default=None, repr=False)

    @cached_property
    def cost_matrix(self) -> np.ndarray:
        if self._cost_matrix is not None:
            return self._cost_matrix
        return self.cost.matrix(self.mu1.points, self.mu2.points)

    @property
    def epsilon(self) -> float:
        return self.config.epsilon

    def value(self) -> float:
        """EOT cost, evaluated through the dual objective at the potentials."""
        eps = self.config.epsilon
        return float(
            self.mu1.weights @ self.phi1
            + self.mu2.weights @ self.phi2
            - eps * self.plan_total
            + eps
        )

    def with_potentials(self, phi1, phi2) -> "EotSolution":
        """Copy carrying different potentials (used for gauge-shift checks)."""
        return EotSolution(
            self.mu1, self.mu2, self.cost, self.config,
            np.asarray(phi1, dtype=np.float64), np.asarray(phi2, dtype=np.float64),
            self.iterations, self.final_violation, self.plan_total,
            self.residual_history, self.symmetric, self._cost_matrix,
        )


def _check_inputs(mu1, mu2, cost, config):
    if mu1.dim != mu2.dim:
        raise ValueError(f"dimension mismatch: {mu1.dim} vs {mu2.dim}")
    if not cost.symmetric:
        raise ValueError("cost must be symmetric")
    if config.reference_index_1 >= mu1.size or config.reference_index_2 >= mu2.size:
        raise IndexError("reference index outside the support")


def _finite_cost(C):
    if not np.all(np.isfinite(C)):
        raise NumericalError("cost matrix contains NaN or infinite entries")
    return C


def _violation(old, new, eps):
    # sup_i |exp((old_i - new_i)/eps) - 1|, i.e. the residual of the equation
    # whose soft-minimum produced `new`
    r = np.abs(np.expm1((old - new) / eps))
    return float(r.max()), r


def _normalise(phi1, phi2, r1, r2):
    a = 0.5 * (phi1[r1] - phi2[r2])
    phi1 = phi1 - a
    phi2 = phi2 + a
    phi2[r2] = phi1[r1]  # remove the last-ulp mismatch so the pin is exact
    return phi1, phi2


def _solve_cross(C, a, b, eps, tol, max_iter, kern):
    n, m = C.shape
    loga, logb = np.log(a), np.log(b)
    f = np.zeros(n)
    g = np.zeros(m)
    f_new = np.empty(n)
    kern.softmin_rows(C, g, logb, eps, f)
    kern.softmin_cols(C, f, loga, eps, g)
    history = []
    it = 1
    while True:
        kern.softmin_rows(C, g, logb, eps, f_new)
        if not np.all(np.isfinite(f_new)):
            raise NumericalError("non-finite potential during iteration")
        viol, r = _violation(f, f_new, eps)
        history.append(viol)
        if viol <= tol:
            total = float(a @ np.exp((f - f_new) / eps))
            return f, g, it, viol, total, history
        if it >= max_iter:
            raise SinkhornConvergenceError(
                f"no convergence after {it} sweeps (violation {viol:.3e})", viol, it
            )
        f, f_new = f_new, f
        kern.softmin_cols(C, f, loga, eps, g)
        it += 1


def _solve_self(C, a, eps, tol, max_iter, kern):
    n = C.shape[0]
    loga = np.log(a)
    f = np.zeros(n)
    g = np.empty(n)
    h = np.empty(n)
    history = []
    it = 0
    while True:
        kern.softmin_rows(C, f, loga, eps, g)
        if not np.all(np.isfinite(g)):
            raise NumericalError("non-finite potential during iteration")
        viol, _ = _violation(f, g, eps)
        history.append(viol)
        if viol <= tol:
            total = float(a @ np.exp((f - g) / eps))
            return f, it, viol, total, history
        if it >= max_iter:
            raise SinkhornConvergenceError(
                f"no convergence after {it} sweeps (violation {viol:.3e})", viol, it
            )
        kern.softmin_rows(C, g, loga, eps, h)
        f = 0.5 * (g + h)
        it += 1


def solve_schrodinger(
    mu1: DiscreteMeasure,
    mu2: DiscreteMeasure,
    cost: CostSpec,
    config: Optional[SinkhornConfig] = None,
    *,
    symmetric: Optional[bool] = None,
    backend: Optional[str] = None,
) -> EotSolution:
    """Solve the Schrodinger system between ``mu1`` and ``mu2``.

    When the two measures are identical (or ``symmetric=True``) a symmetrised
    iteration is used that keeps phi1 == phi2; the pin then uses
    ``reference_index_1`` on both sides.

    Raises
    ------
    SinkhornConvergenceError
        If the sup-norm residual is still above ``config.tol`` after
        ``config.max_iter`` sweeps.
    NumericalError
        If the cost matrix or an iterate is not finite.
    """
    config = config or SinkhornConfig()
    _check_inputs(mu1, mu2, cost, config)
    kern = _backend.get_kernels(backend)
    eps, tol = config.epsilon, config.tol
    if symmetric is None:
        symmetric = mu1.same_as(mu2)
    if symmetric and not mu1.same_as(mu2):
        raise ValueError("symmetric iteration requires identical measures")

    C = _finite_cost(cost.matrix(mu1.points, mu2.points))
    if symmetric:
        C = 0.5 * (C + C.T)
        f, it, viol, total, history = _solve_self(
            C, mu1.weights, eps, tol, config.max_iter, kern
        )
        phi1 = f
        phi2 = f.copy()
    else:
        f, g, it, viol, total, history = _solve_cross(
            C, mu1.weights, mu2.weights, eps, tol, config.max_iter, kern
        )
        phi1, phi2 = _normalise(f, g, config.reference_index_1, config.reference_index_2)

    return EotSolution(
        mu1=mu1, mu2=mu2, cost=cost, config=config,
        phi1=phi1, phi2=phi2, iterations=it, final_violation=viol,
        plan_total=total, residual_history=tuple(history),
        symmetric=bool(symmetric), _cost_matrix=C,
    )


class _FactoredUnderflow(Exception):
    pass


def _stabilised_kernel(C, eps, axis):
    shift = C.min(axis=axis, keepdims=True)
    return np.exp(-(C - shift) / eps), shift.reshape(-1)


def _solve_factored(Cv, Cw, a, alpha, beta, eps, tol, max_iter):
    """Cross iteration against a product measure with an additive cost.

    The second potential lives on the K x L grid of product atoms; both
    soft-minimum maps reduce to matrix products with per-block kernels.
    """
    # kernels stabilised for the reductions over rows (-> grid) and over the grid (-> rows)
    Av_col, sv_col = _stabilised_kernel(Cv, eps, 0)
    Aw_col, sw_col = _stabilised_kernel(Cw, eps, 0)
    Av_row, sv_row = _stabilised_kernel(Cv, eps, 1)
    Aw_row, sw_row = _stabilised_kernel(Cw, eps, 1)
    loga = np.log(a)
    log_ab = np.log(alpha)[:, None] + np.log(beta)[None, :]

    def to_grid(f):
        u = f / eps + loga
        s = u.max()
        M = (Av_col * np.exp(u - s)[:, None]).T @ Aw_col
        if not M.min() > _FACTORED_FLOOR:
            raise _FactoredUnderflow
        return -eps * (s + np.log(M)) + sv_col[:, None] + sw_col[None, :]

    def to_rows(G):
        t = G / eps + log_ab
        s = t.max()
        H = np.exp(t - s) @ Aw_row.T
        r = np.einsum("ik,ki->i", Av_row, H)
        if not r.min() > _FACTORED_FLOOR:
            raise _FactoredUnderflow
        return -eps * (s + np.log(r)) + sv_row + sw_row

    f = to_rows(np.zeros((alpha.size, beta.size)))
    G = to_grid(f)
    history = []
    it = 1
    while True:
        f_new = to_rows(G)
        if not np.all(np.isfinite(f_new)):
            raise NumericalError("non-finite potential during iteration")
        viol, _ = _violation(f, f_new, eps)
        history.append(viol)
        if viol <= tol:
            total = float(a @ np.exp((f - f_new) / eps))
            return f, G.reshape(-1), it, viol, total, history
        if it >= max_iter:
            raise SinkhornConvergenceError(
                f"no convergence after {it} sweeps (violation {viol:.3e})", viol, it
            )
        f = f_new
        G = to_grid(f)
        it += 1


def solve_schrodinger_product(
    mu1: DiscreteMeasure,
    product: ProductMeasure,
    cost: CostSpec,
    config: Optional[SinkhornConfig] = None,
) -> EotSolution:
    """Solve against a factored product measure without forming the full cost matrix.

    Requires a coordinate-additive cost (``cost.block`` set).  Falls back to
    the dense log-domain solver if the factored sums underflow.
    """
    config = config or SinkhornConfig()
    mu2 = product.materialize()
    _check_inputs(mu1, mu2, cost, config)
    if not cost.separable:
        return solve_schrodinger(mu1, mu2, cost, config, symmetric=False)
    d1 = product.split
    d = mu1.dim
    cost_v = cost.block(np.arange(d1))
    cost_w = cost.block(np.arange(d1, d))
    Cv = _finite_cost(cost_v.matrix(mu1.points[:, :d1], product.first.points))
    Cw = _finite_cost(cost_w.matrix(mu1.points[:, d1:], product.second.points))
    try:
        f, g, it, viol, total, history = _solve_factored(
            Cv, Cw, mu1.weights, product.first.weights, product.second.weights,
            config.epsilon, config.tol, config.max_iter,
        )
    except _FactoredUnderflow:
        return solve_schrodinger(mu1, mu2, cost, config, symmetric=False)
    phi1, phi2 = _normalise(f, g, config.reference_index_1, config.reference_index_2)
    return EotSolution(
        mu1=mu1, mu2=mu2, cost=cost, config=config,
        phi1=phi1, phi2=phi2, iterations=it, final_violation=viol,
        plan_total=total, residual_history=tuple(history), symmetric=False,
    )


def plan_matrix(sol: EotSolution) -> np.ndarray:
    """Full EOT plan w1_i w2_j exp((phi1_i + phi2_j - c_ij) / eps)."""
    eps = sol.config.epsilon
    log_density = (sol.phi1[:, None] + sol.phi2[None, :] - sol.cost_matrix) / eps
    return sol.mu1.weights[:, None] * sol.mu2.weights[None, :] * np.exp(log_density)


def plan_mass(sol: EotSolution, i: int, j: int) -> float:
    """Mass the EOT plan puts on the atom pair (i, j)."""
    if not (0 <= i < sol.mu1.size and 0 <= j < sol.mu2.size):
        raise IndexError(f"index ({i}, {j}) out of range")
    c = sol.cost.evaluate(sol.mu1.points[i], sol.mu2.points[j])
    return float(
        sol.mu1.weights[i] * sol.mu2.weights[j]
        * np.exp((sol.phi1[i] + sol.phi2[j] - c) / sol.config.epsilon)
    )


def primal_dual_values(sol: EotSolution) -> Tuple[float, float]:
    """Primal objective at the induced plan and dual objective at the potentials."""
    eps = sol.config.epsilon
    C = sol.cost_matrix
    log_density = (sol.phi1[:, None] + sol.phi2[None, :] - C) / eps
    pi = sol.mu1.weights[:, None] * sol.mu2.weights[None, :] * np.exp(log_density)
    # pi == 0 only through underflow, where the entropy term is 0 * finite
    primal = float(np.sum(C * pi) + eps * np.sum(pi * log_density))
    dual = float(
        sol.mu1.weights @ sol.phi1 + sol.mu2.weights @ sol.phi2 - eps * pi.sum() + eps
    )
    return primal, dual


def marginal_violation(sol: EotSolution) -> float:
    """Sup-norm residual of both Schrodinger equations, recomputed from scratch."""
    pi = plan_matrix(sol)
    r1 = np.abs(pi.sum(axis=1) / sol.mu1.weights - 1.0).max()
    r2 = np.abs(pi.sum(axis=0) / sol.mu2.weights - 1.0).max()
    return float(max(r1, r2))
