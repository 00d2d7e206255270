"""Finitely supported probability measures and deterministic samplers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MASS_TOL = 1e-12


def _as_points(points) -> np.ndarray:
    arr = np.asarray(points, dtype=np.float64)
    if arr.ndim == 1:
        # a flat list of scalars is a one-dimensional sample
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise ValueError("points must be a list of equal-length vectors")
    if arr.shape[1] < 1:
        raise ValueError("points must have dimension >= 1")
    return arr


def _canonical(points: np.ndarray, weights: np.ndarray):
    """Sort atoms lexicographically and merge bit-identical points."""
    uniq, inverse = np.unique(points, axis=0, return_inverse=True)
    merged = np.zeros(uniq.shape[0], dtype=np.float64)
    np.add.at(merged, inverse.reshape(-1), weights)
    return uniq, merged


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """A probability measure with finitely many atoms.

    Atoms are stored in lexicographic order with duplicates merged, so two
    measures built from the same multiset of points are array-identical.
    Zero-weight atoms are dropped and weights are renormalised when the input
    total differs from one by rounding only.
    """

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        pts = _as_points(self.points)
        w = np.asarray(self.weights, dtype=np.float64).reshape(-1)
        if pts.shape[0] != w.shape[0]:
            raise ValueError(
                f"points ({pts.shape[0]}) and weights ({w.shape[0]}) differ in length"
            )
        if pts.shape[0] == 0:
            raise ValueError("empty sample")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points must be finite")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite and nonnegative")
        keep = w > 0
        pts, w = pts[keep], w[keep]
        total = w.sum()
        if pts.shape[0] == 0 or abs(total - 1.0) > 1e-9:
            raise ValueError(f"weights must sum to 1 (got {total!r})")
        pts, w = _canonical(pts, w)
        total = w.sum()
        if abs(total - 1.0) > MASS_TOL:
            w = w / total
        pts.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    @property
    def size(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def mass_at(self, x) -> float:
        x = np.asarray(x, dtype=np.float64).reshape(-1)
        hit = np.all(self.points == x, axis=1)
        return float(self.weights[hit].sum())

    def same_as(self, other: "DiscreteMeasure") -> bool:
        """Exact equality of support and weights."""
        return self is other or (
            self.points.shape == other.points.shape
            and np.array_equal(self.points, other.points)
            and np.array_equal(self.weights, other.weights)
        )

    def __repr__(self):
        return f"DiscreteMeasure(size={self.size}, dim={self.dim})"


@dataclass(frozen=True, eq=False)
class PairedSample:
    """Paired observations (v_i, w_i) used by the independence test."""

    v: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        v = _as_points(self.v)
        w = _as_points(self.w)
        if v.shape[0] != w.shape[0]:
            raise ValueError("v and w must have the same number of rows")
        if v.shape[0] < 1:
            raise ValueError("empty sample")
        v.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "w", w)

    @property
    def n(self) -> int:
        return self.v.shape[0]

    def joint(self) -> np.ndarray:
        return np.hstack([self.v, self.w])


def from_samples(points) -> DiscreteMeasure:
    """Empirical measure of a sample: weight 1/n per point, duplicates merged."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.size == 0:
        raise ValueError("empty sample")
    pts = _as_points(pts)
    n = pts.shape[0]
    return DiscreteMeasure(pts, np.full(n, 1.0 / n))


def pool(a: DiscreteMeasure, b: DiscreteMeasure) -> DiscreteMeasure:
    """Equal-weight mixture (a + b) / 2.

    For empirical measures of two samples of the same size this is the
    empirical measure of the concatenated sample.
    """
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    pts = np.vstack([a.points, b.points])
    w = np.concatenate([a.weights, b.weights]) / 2.0
    return DiscreteMeasure(pts, w)


def marginal_factors(s: PairedSample):
    """The two marginal empirical measures of a paired sample."""
    return from_samples(s.v), from_samples(s.w)


def product_marginals(s: PairedSample) -> DiscreteMeasure:
    """Product of the marginal empirical measures on R^(d1 + d2)."""
    return ProductMeasure.of_sample(s).materialize()


def sample_uniform_box(lower, upper, n: int, seed: int) -> np.ndarray:
    """``n`` i.i.d. uniform draws from the box [lower, upper].

    Uses numpy's PCG64 generator seeded with ``seed``; identical seeds give
    identical arrays.
    """
    lo = np.asarray(lower, dtype=np.float64).reshape(-1)
    hi = np.asarray(upper, dtype=np.float64).reshape(-1)
    if lo.shape != hi.shape:
        raise ValueError("lower and upper must have the same length")
    if not np.all(lo < hi):
        raise ValueError("degenerate box: need lower < upper componentwise")
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    return rng.uniform(lo, hi, size=(n, lo.shape[0]))


class ProductMeasure:
    """Product of two discrete measures, kept in factored form.

    The materialised measure on R^(d1 + d2) lists atoms (v_k, w_l) with k
    outer and l inner; because both factors are sorted this is already the
    canonical lexicographic order, so flattened (k, l) arrays line up with
    ``materialize().weights``.
    """

    def __init__(self, first: DiscreteMeasure, second: DiscreteMeasure):
        self.first = first
        self.second = second
        self._joint = None

    @classmethod
    def of_sample(cls, s: PairedSample) -> "ProductMeasure":
        return cls(*marginal_factors(s))

    @property
    def split(self) -> int:
        return self.first.dim

    @property
    def size(self) -> int:
        return self.first.size * self.second.size

    def materialize(self) -> DiscreteMeasure:
        if self._joint is None:
            k, l = self.first.size, self.second.size
            pts = np.hstack(
                [np.repeat(self.first.points, l, axis=0), np.tile(self.second.points, (k, 1))]
            )
            w = np.outer(self.first.weights, self.second.weights).reshape(-1)
            self._joint = DiscreteMeasure(pts, w)
        return self._joint
