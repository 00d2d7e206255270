import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entropic_ot.costs import quadratic_cost
from entropic_ot.inference import (
    ResampleReport,
    clt_interval,
    empirical_quantile,
    map_confidence_band,
    mn_bootstrap_null,
    pp_curve,
    pp_sup_deviation,
)
from entropic_ot.measures import from_samples
from entropic_ot.potentials import box_grid
from entropic_ot.sinkhorn import SinkhornConfig


def two_atom_sample(rng, n, atoms, probs):
    idx = rng.choice(len(atoms), size=n, p=probs)
    return np.asarray(atoms, dtype=float)[idx]


def test_quantile_convention():
    vals = np.arange(1.0, 11.0)
    assert empirical_quantile(vals, 0.1) == 1.0
    assert empirical_quantile(vals, 0.11) == 2.0
    assert empirical_quantile(vals, 0.95) == 10.0
    assert empirical_quantile(vals, 0.0) == 1.0
    # 0.3 * 10 is 3.0000000000000004 in floating point
    assert empirical_quantile(vals, 0.3) == 3.0
    with pytest.raises(ValueError):
        empirical_quantile(vals, 1.5)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=40),
       st.floats(0, 1), st.floats(0, 1), st.floats(-1e6, 1e6))
def test_report_invariants(values, a1, a2, observed):
    r = ResampleReport("t", observed, values)
    lo, hi = sorted((a1, a2))
    assert r.quantile(lo) <= r.quantile(hi)
    assert r.rank_of_observed == sum(v <= observed for v in values) / len(values)


def test_report_serialisation(tmp_path):
    r = ResampleReport("t", 0.5, [0.3, 0.1, 0.9], m=2, seed=4, extra={"n": 10})
    d = r.to_dict()
    assert d["replicates"] == [0.1, 0.3, 0.9]
    assert d["rank_of_observed"] == pytest.approx(2 / 3)
    assert d["n"] == 10
    r.to_csv(tmp_path / "r.csv")
    assert (tmp_path / "r.csv").read_text().splitlines()[0] == "replicate,value"
    with pytest.raises(ValueError):
        ResampleReport("t", 0.0, [])


def test_clt_identical_samples_degenerate():
    x = np.random.default_rng(0).uniform(size=(40, 2))
    ci = clt_interval(x, x, quadratic_cost())
    lo, hi, sigma = ci
    assert lo == hi == 0.0 and sigma == 0.0
    assert ci.degenerate


def test_clt_alpha_nesting():
    rng = np.random.default_rng(1)
    x1 = two_atom_sample(rng, 200, [[0.0], [1.0]], [0.5, 0.5])
    x2 = two_atom_sample(rng, 200, [[0.0], [2.0]], [0.5, 0.5])
    wide = clt_interval(x1, x2, quadratic_cost(), alpha=0.05)
    narrow = clt_interval(x1, x2, quadratic_cost(), alpha=0.5)
    assert wide.lo < narrow.lo <= narrow.hi < wide.hi
    assert not wide.degenerate
    assert wide.covers(wide.estimate)


def test_clt_input_checks():
    with pytest.raises(ValueError):
        clt_interval(np.zeros((3, 1)), np.zeros((4, 1)), quadratic_cost())
    with pytest.raises(ValueError):
        clt_interval(np.zeros((3, 1)), np.zeros((3, 1)), quadratic_cost(), alpha=1.0)


def test_bootstrap_all_identical_points():
    x = np.full((20, 2), 0.3)
    r = mn_bootstrap_null(x, x, 4, 10, quadratic_cost())
    assert r.observed == 0.0
    assert np.all(r.replicate_values == 0.0)
    assert r.rank_of_observed == 1.0


def test_bootstrap_deterministic_and_thread_independent():
    rng = np.random.default_rng(2)
    x1, x2 = rng.uniform(size=(30, 2)), rng.uniform(size=(30, 2))
    a = mn_bootstrap_null(x1, x2, 5, 12, quadratic_cost(), seed=9)
    b = mn_bootstrap_null(x1, x2, 5, 12, quadratic_cost(), seed=9, threads=3)
    np.testing.assert_array_equal(a.replicate_values, b.replicate_values)
    assert a.to_dict() == b.to_dict()
    c = mn_bootstrap_null(x1, x2, 5, 12, quadratic_cost(), seed=10)
    assert not np.array_equal(a.replicate_values, c.replicate_values)


def test_bootstrap_argument_checks():
    x = np.random.default_rng(3).uniform(size=(20, 1))
    c = quadratic_cost()
    with pytest.raises(ValueError):
        mn_bootstrap_null(x, x, 1, 5, c)
    with pytest.raises(ValueError):
        mn_bootstrap_null(x, x, 11, 5, c)
    with pytest.raises(ValueError):
        mn_bootstrap_null(x, x, 3, 0, c)
    with pytest.raises(ValueError):
        mn_bootstrap_null(x, x, 3, 5, c, SinkhornConfig(tol=1e-6))
    with pytest.warns(UserWarning):
        mn_bootstrap_null(x, x, 6, 2, c)


def test_band_point_mass_target():
    mu1 = from_samples(np.linspace(0, 1, 5)[:, None])
    x2 = np.full((30, 1), 0.7)
    band = map_confidence_band(mu1, x2, 1, np.linspace(0, 1, 7)[:, None], 0.1, 20, quadratic_cost())
    assert band.q_hat == 0.0 and band.half_width == 0.0
    np.testing.assert_allclose(band.center, 0.7, atol=1e-15)
    assert band.covers(band.center)


def test_band_deterministic_and_contains_center():
    rng = np.random.default_rng(4)
    mu1 = from_samples(rng.uniform(size=(8, 2)))
    x2 = rng.uniform(size=(25, 2))
    grid = box_grid([0, 0], [1, 1], 3)
    a = map_confidence_band(mu1, x2, 2, grid, 0.1, 15, quadratic_cost(), seed=5)
    b = map_confidence_band(mu1, x2, 2, grid, 0.1, 15, quadratic_cost(), seed=5, threads=2)
    assert a.to_dict() == b.to_dict()
    assert a.half_width >= 0
    assert np.all(a.lower <= a.center) and np.all(a.center <= a.upper)


def test_band_argument_checks():
    mu1 = from_samples([[0.0], [1.0]])
    x2 = np.array([[0.2], [0.4]])
    c = quadratic_cost()
    with pytest.raises(ValueError):
        map_confidence_band(mu1, x2, 2, [[0.5]], 0.1, 5, c)
    with pytest.raises(ValueError):
        map_confidence_band(mu1, x2, 1, [[0.5]], 0.0, 5, c)
    with pytest.raises(ValueError):
        map_confidence_band(mu1, x2, 1, np.empty((0, 1)), 0.1, 5, c)


def test_pp_deviation():
    assert pp_sup_deviation([0.25, 0.5, 0.75, 1.0]) == pytest.approx(0.25)
    assert pp_sup_deviation(np.full(10, 1.0)) == pytest.approx(1.0)
    uniform = (np.arange(1, 1001) - 0.5) / 1000
    assert pp_sup_deviation(uniform) == pytest.approx(0.0005)
    a, f = pp_curve([0.2, 0.6], grid_size=11)
    assert f[0] == 0.0 and f[2] == 0.5 and f[-1] == 1.0
