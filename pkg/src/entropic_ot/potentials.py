"""Out-of-sample potentials, their gradients, and the entropic map."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _backend
from .sinkhorn import EotSolution

DEFAULT_GRID_POINTS = 64


@dataclass(frozen=True)
class MapEvaluation:
    """Entropic map at one query point, computed two ways."""

    query: np.ndarray
    barycentric: np.ndarray
    gradient_form: np.ndarray


def _queries(x, dim):
    q = np.asarray(x, dtype=np.float64)
    single = q.ndim <= 1
    q = q.reshape(1, -1) if single else q
    if q.shape[1] != dim:
        raise ValueError(f"query dimension {q.shape[1]} does not match support dimension {dim}")
    return np.ascontiguousarray(q), single


def _other_side(sol: EotSolution, side: int):
    if side == 1:
        return sol.mu2, sol.phi2
    if side == 2:
        return sol.mu1, sol.phi1
    raise ValueError("side must be 1 or 2")


def extend_potential(sol: EotSolution, x, side: int = 1):
    """Evaluate phi_side at arbitrary points through the Schrodinger identity.

    phi_1(x) = -eps log sum_j w2_j exp((phi2_j - c(x, y_j)) / eps), and
    symmetrically for side 2.  Accepts one point or an (m, d) array.
    """
    other, pot = _other_side(sol, side)
    q, single = _queries(x, other.dim)
    C = sol.cost.matrix(q, other.points)
    out = np.empty(q.shape[0])
    _backend.softmin_rows(C, pot, np.log(other.weights), sol.config.epsilon, out)
    return float(out[0]) if single else out


def softmax_weights(sol: EotSolution, x) -> np.ndarray:
    """Conditional plan weights p_j(x) over the support of mu2, rows sum to one."""
    q, _ = _queries(x, sol.mu2.dim)
    z = (sol.phi2[None, :] - sol.cost.matrix(q, sol.mu2.points)) / sol.config.epsilon
    z += np.log(sol.mu2.weights)[None, :]
    z -= z.max(axis=1, keepdims=True)
    p = np.exp(z)
    p /= p.sum(axis=1, keepdims=True)
    return p


def grad_potential_1(sol: EotSolution, x) -> np.ndarray:
    """Gradient of the extended first potential: sum_j p_j(x) grad_x c(x, y_j)."""
    q, single = _queries(x, sol.mu2.dim)
    p = softmax_weights(sol, q)
    grads = np.array([p[i] @ sol.cost.grad_rows(q[i], sol.mu2.points) for i in range(q.shape[0])])
    return grads[0] if single else grads


def _require_quadratic(sol):
    if sol.cost.name != "quadratic":
        raise ValueError("entropic map requires quadratic cost")


def barycentric_map(sol: EotSolution, x) -> np.ndarray:
    """Softmax-weighted average of the mu2 support; shape (m, d) for m queries."""
    _require_quadratic(sol)
    q, single = _queries(x, sol.mu2.dim)
    out = softmax_weights(sol, q) @ sol.mu2.points
    return out[0] if single else out


def entropic_map(sol: EotSolution, x) -> MapEvaluation:
    """Entropic map at a single point in barycentric and gradient form."""
    _require_quadratic(sol)
    q, _ = _queries(x, sol.mu2.dim)
    q = q[0]
    bary = barycentric_map(sol, q)
    grad_form = q - grad_potential_1(sol, q)
    return MapEvaluation(query=q.copy(), barycentric=bary, gradient_form=grad_form)


def box_grid(lower, upper, resolution) -> np.ndarray:
    """Tensor grid with ``resolution`` points per axis (int or per-axis list)."""
    lo = np.asarray(lower, dtype=np.float64).reshape(-1)
    hi = np.asarray(upper, dtype=np.float64).reshape(-1)
    res = np.broadcast_to(np.asarray(resolution, dtype=int), lo.shape)
    if np.any(res < 1):
        raise ValueError("resolution must be >= 1")
    axes = [np.linspace(l, h, r) if r > 1 else np.array([(l + h) / 2]) for l, h, r in zip(lo, hi, res)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.reshape(-1) for m in mesh], axis=1)


def default_grid(*measures, n_points: int = DEFAULT_GRID_POINTS) -> np.ndarray:
    """Uniform grid of about ``n_points`` points over the bounding box of the supports."""
    pts = np.vstack([m.points for m in measures])
    d = pts.shape[1]
    per_axis = max(1, int(round(n_points ** (1.0 / d))))
    return box_grid(pts.min(axis=0), pts.max(axis=0), per_axis)
