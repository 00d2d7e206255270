"""Transport costs.

A :class:`CostSpec` bundles a pointwise cost, its gradient in the first
argument and optional vectorised versions of both.  Only symmetric costs are
accepted by the solvers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np


@dataclass(frozen=True)
class CostSpec:
    """Symmetric smooth cost c(x, y) >= 0 with gradient in x.

    ``pairwise(X, Y)`` and ``grad_pairwise(x, Y)`` are optional vectorised
    forms; when absent they are built from ``evaluate`` and ``grad_x`` with
    Python loops.  ``block`` is set for coordinate-additive costs: it maps a
    sequence of coordinate indices to the cost restricted to those
    coordinates, so that ``c((v, w), (v', w')) = c_V(v, v') + c_W(w, w')``.
    """

    name: str
    evaluate: Callable[[np.ndarray, np.ndarray], float]
    grad_x: Callable[[np.ndarray, np.ndarray], np.ndarray]
    symmetric: bool = True
    pairwise: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = field(
        default=None, repr=False
    )
    grad_pairwise: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = field(
        default=None, repr=False
    )
    block: Optional[Callable[[np.ndarray], "CostSpec"]] = field(default=None, repr=False)

    def __post_init__(self):
        if not self.symmetric:
            raise ValueError("only symmetric costs are supported")

    @property
    def separable(self) -> bool:
        return self.block is not None

    def matrix(self, X, Y) -> np.ndarray:
        """Cost matrix C[i, j] = c(X[i], Y[j]) as a C-contiguous float64 array."""
        X = np.asarray(X, dtype=np.float64)
        Y = np.asarray(Y, dtype=np.float64)
        if self.pairwise is not None:
            C = self.pairwise(X, Y)
        else:
            C = np.array([[self.evaluate(x, y) for y in Y] for x in X], dtype=np.float64)
            C = C.reshape(X.shape[0], Y.shape[0])
        return np.ascontiguousarray(C, dtype=np.float64)

    def grad_rows(self, x, Y) -> np.ndarray:
        """Gradients in x of c(x, Y[j]) for every row of Y, shape (m, d)."""
        x = np.asarray(x, dtype=np.float64)
        Y = np.asarray(Y, dtype=np.float64)
        if self.grad_pairwise is not None:
            return self.grad_pairwise(x, Y)
        return np.array([self.grad_x(x, y) for y in Y], dtype=np.float64)


def _quad_eval(x, y):
    d = np.asarray(x, dtype=np.float64) - np.asarray(y, dtype=np.float64)
    return 0.5 * float(d @ d)


def _quad_grad(x, y):
    return np.asarray(x, dtype=np.float64) - np.asarray(y, dtype=np.float64)


def _quad_pairwise(X, Y):
    # coordinate-wise differences keep c(x, x) == 0 and C(X, X) symmetric bit-for-bit
    C = np.zeros((X.shape[0], Y.shape[0]))
    for k in range(X.shape[1]):
        diff = X[:, k, None] - Y[None, :, k]
        C += diff * diff
    C *= 0.5
    return C


def _quad_grad_pairwise(x, Y):
    return x[None, :] - Y


def quadratic_cost() -> CostSpec:
    """c(x, y) = |x - y|^2 / 2."""
    return CostSpec(
        name="quadratic",
        evaluate=_quad_eval,
        grad_x=_quad_grad,
        pairwise=_quad_pairwise,
        grad_pairwise=_quad_grad_pairwise,
        block=lambda idx: quadratic_cost(),
    )


COSTS = {"quadratic": quadratic_cost}


def get_cost(name: str) -> CostSpec:
    try:
        return COSTS[name]()
    except KeyError:
        raise ValueError(f"unknown cost {name!r}; available: {sorted(COSTS)}") from None
