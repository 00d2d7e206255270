"""Brute-force reference solutions for tiny instances.

Nothing here touches the numerical kernels used by the solver: the
fixed-point oracle runs in mpmath at 40 significant digits with plain
Python loops, and the 2x2 primal oracle minimises the primal objective
directly over the one free coupling parameter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List

import mpmath

from .costs import CostSpec
from .measures import DiscreteMeasure

MAX_ATOMS = 4
_DPS = 40


class OracleError(RuntimeError):
    pass


@dataclass(frozen=True)
class OraclePotentials:
    phi1: List[float]
    phi2: List[float]
    residual: float
    sweeps: int


def _softmin(pot, weights, costs_row, eps):
    # -eps * log sum_j w_j exp((pot_j - c_j) / eps), summed in extended precision
    terms = [w * mpmath.exp((p - c) / eps) for p, w, c in zip(pot, weights, costs_row)]
    return -eps * mpmath.log(mpmath.fsum(terms))


def _normalised(weights):
    # float weights need not sum to exactly one; an unbalanced system has no fixed point
    w = [mpmath.mpf(float(x)) for x in weights]
    total = mpmath.fsum(w)
    return [x / total for x in w]


def oracle_potentials(
    mu1: DiscreteMeasure,
    mu2: DiscreteMeasure,
    cost: CostSpec,
    epsilon: float,
    residual_target: float = 1e-14,
    max_sweeps: int = 1_000_000,
    reference_index_1: int = 0,
    reference_index_2: int = 0,
) -> OraclePotentials:
    """High-precision alternating fixed point, pinned so phi1[ref1] == phi2[ref2]."""
    if mu1.size > MAX_ATOMS or mu2.size > MAX_ATOMS:
        raise ValueError(f"oracle handles at most {MAX_ATOMS} atoms per side")
    with mpmath.workdps(_DPS):
        eps = mpmath.mpf(epsilon)
        a = _normalised(mu1.weights)
        b = _normalised(mu2.weights)
        C = [
            [mpmath.mpf(float(cost.evaluate(x, y))) for y in mu2.points]
            for x in mu1.points
        ]
        Ct = [list(col) for col in zip(*C)]
        phi1 = [mpmath.mpf(0)] * mu1.size
        phi2 = [mpmath.mpf(0)] * mu2.size
        # iterate well past the target so the reported values are accurate, not just feasible
        stop = mpmath.mpf(residual_target) * mpmath.mpf("1e-6")
        residual = mpmath.inf
        for sweep in range(1, max_sweeps + 1):
            phi1 = [_softmin(phi2, b, row, eps) for row in C]
            phi2 = [_softmin(phi1, a, col, eps) for col in Ct]
            residual = max(
                abs(mpmath.fsum(bj * mpmath.exp((p1 + p2 - c) / eps) for bj, p2, c in zip(b, phi2, row)) - 1)
                for p1, row in zip(phi1, C)
            )
            if residual <= stop:
                break
        if residual > residual_target:
            raise OracleError(f"oracle did not converge (residual {float(residual):.3e})")
        shift = (phi1[reference_index_1] - phi2[reference_index_2]) / 2
        phi1 = [p - shift for p in phi1]
        phi2 = [p + shift for p in phi2]
        return OraclePotentials(
            phi1=[float(p) for p in phi1],
            phi2=[float(p) for p in phi2],
            residual=float(residual),
            sweeps=sweep,
        )


def _xlogx_over(p, q):
    return 0.0 if p <= 0.0 else p * math.log(p / q)


def _primal_2x2(t, a1, b1, c, eps):
    a2, b2 = 1.0 - a1, 1.0 - b1
    pi = ((t, a1 - t), (b1 - t, 1.0 - a1 - b1 + t))
    ab = ((a1 * b1, a1 * b2), (a2 * b1, a2 * b2))
    total = 0.0
    for i in range(2):
        for j in range(2):
            p = max(pi[i][j], 0.0)
            total += c[i][j] * p + eps * _xlogx_over(p, ab[i][j])
    return total


def oracle_primal_2x2(
    mu1: DiscreteMeasure,
    mu2: DiscreteMeasure,
    cost: CostSpec,
    epsilon: float,
    grid_points: int = 2001,
) -> float:
    """Minimum of the entropic primal over 2x2 couplings.

    The coupling is parameterised by its (0, 0) entry t in
    [max(0, a1 + b1 - 1), min(a1, b1)]; the objective is convex in t, so a
    grid scan followed by golden-section search on the bracketing cells
    finds the minimum.  Point masses collapse the feasible set to a single
    coupling and are handled by padding with a zero-weight atom.
    """
    if mu1.size > 2 or mu2.size > 2:
        raise ValueError("oracle_primal_2x2 needs at most two atoms per side")
    x = list(mu1.points) + [mu1.points[0]] * (2 - mu1.size)
    y = list(mu2.points) + [mu2.points[0]] * (2 - mu2.size)
    a1 = float(mu1.weights[0])
    b1 = float(mu2.weights[0])
    c = [[float(cost.evaluate(xi, yj)) for yj in y] for xi in x]
    lo = max(0.0, a1 + b1 - 1.0)
    hi = min(a1, b1)
    if hi - lo <= 0.0:
        return _primal_2x2(lo, a1, b1, c, epsilon)

    def f(t):
        return _primal_2x2(t, a1, b1, c, epsilon)

    step = (hi - lo) / (grid_points - 1)
    ts = [lo + k * step for k in range(grid_points)]
    ts[-1] = hi
    vals = [f(t) for t in ts]
    k = min(range(grid_points), key=vals.__getitem__)
    left, right = ts[max(k - 1, 0)], ts[min(k + 1, grid_points - 1)]

    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    u = right - invphi * (right - left)
    v = left + invphi * (right - left)
    fu, fv = f(u), f(v)
    for _ in range(200):
        if right - left < 1e-14:
            break
        if fu < fv:
            right, v, fv = v, u, fu
            u = right - invphi * (right - left)
            fu = f(u)
        else:
            left, u, fu = u, v, fv
            v = left + invphi * (right - left)
            fv = f(v)
    return min(f(0.5 * (left + right)), vals[k])
