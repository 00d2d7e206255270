from fractions import Fraction

import numpy as np
import pytest

from entropic_ot.costs import quadratic_cost
from entropic_ot.divergence import sinkhorn_divergence
from entropic_ot.independence import (
    SampleTooLargeError,
    independence_statistic,
    independence_test,
    kernel_h,
    ustat_decomposition_check,
    ustat_decomposition_exact,
)
from entropic_ot.measures import PairedSample, from_samples, product_marginals
from entropic_ot.sinkhorn import SinkhornConfig


def test_single_pair_is_zero():
    assert independence_statistic(PairedSample([[0.3]], [[0.9]]), quadratic_cost()) == 0.0


def test_constant_v_is_zero():
    rng = np.random.default_rng(0)
    s = PairedSample(np.full((10, 1), 0.5), rng.uniform(size=(10, 2)))
    assert abs(independence_statistic(s, quadratic_cost())) <= 1e-9


def test_three_pairs_perfect_dependence():
    s = PairedSample([[0.0], [1.0], [2.0]], [[0.0], [1.0], [2.0]])
    cfg = SinkhornConfig(tol=1e-12)
    d = independence_statistic(s, quadratic_cost(), cfg)
    direct = sinkhorn_divergence(from_samples(s.joint()), product_marginals(s), quadratic_cost(), cfg)
    assert d > 0
    assert d == pytest.approx(direct.sbar, abs=1e-12)
    assert direct.dual_sbar() == pytest.approx(direct.sbar, abs=1e-10)
    assert d == pytest.approx(0.1646544271496021, abs=1e-10)


def test_invariant_under_joint_relabeling():
    rng = np.random.default_rng(1)
    v, w = rng.uniform(size=(15, 1)), rng.uniform(size=(15, 1))
    p = rng.permutation(15)
    a = independence_statistic(PairedSample(v, w), quadratic_cost())
    b = independence_statistic(PairedSample(v[p], w[p]), quadratic_cost())
    assert a == pytest.approx(b, abs=1e-12)


def test_cap():
    s = PairedSample(np.zeros((11, 1)), np.zeros((11, 1)))
    with pytest.raises(SampleTooLargeError, match="subsample"):
        independence_statistic(s, quadratic_cost(), max_n=10)


def test_test_result_contract():
    rng = np.random.default_rng(2)
    s = PairedSample(rng.uniform(size=(20, 1)), rng.uniform(size=(20, 1)))
    res = independence_test(s, 30, quadratic_cost(), seed=3)
    assert res.d_n >= -1e-8
    assert res.scaled == res.n * res.d_n
    count = int(np.sum(res.calibration.replicate_values >= res.scaled))
    assert res.p_value == (1 + count) / 31
    again = independence_test(s, 30, quadratic_cost(), seed=3, threads=2)
    assert again.to_dict() == res.to_dict()


def test_test_detects_dependence():
    v = np.random.default_rng(4).uniform(size=(40, 1))
    res = independence_test(PairedSample(v, v), 50, quadratic_cost(), seed=0)
    assert res.p_value == pytest.approx(1 / 51)


def test_test_argument_checks():
    s = PairedSample(np.zeros((3, 1)), np.zeros((3, 1)))
    with pytest.raises(ValueError):
        independence_test(s, 10, quadratic_cost())
    s = PairedSample(np.arange(5.0)[:, None], np.arange(5.0)[:, None])
    with pytest.raises(ValueError):
        independence_test(s, 0, quadratic_cost())


def test_kernel_symmetric():
    rng = np.random.default_rng(5)

    def f(z):
        return np.sin(z[0] * z[1]) + z[2]

    for _ in range(20):
        a, b = rng.normal(size=3), rng.normal(size=3)
        assert kernel_h(f, a, b, 1) == pytest.approx(kernel_h(f, b, a, 1), abs=1e-14)


def test_ustat_constant_and_v_only():
    rng = np.random.default_rng(6)
    s = PairedSample(rng.normal(size=(12, 1)), rng.normal(size=(12, 1)))
    for f in (lambda z: 2.5, lambda z: np.cos(z[0])):
        r = ustat_decomposition_check(s, f)
        assert r.u_n == pytest.approx(0.0, abs=1e-14)
        assert r.two_delta == pytest.approx(0.0, abs=1e-14)
        assert r.remainder == pytest.approx(0.0, abs=1e-14)


def test_ustat_product_function_bound():
    rng = np.random.default_rng(7)
    s = PairedSample(rng.normal(size=(50, 1)), rng.normal(size=(50, 1)))
    r = ustat_decomposition_check(s, lambda z: z[0] * z[1])
    assert abs(r.remainder) <= r.bound
    assert r.bound == pytest.approx(4 * np.max(np.abs(np.outer(s.v, s.w))) / 50)


def test_ustat_exact_matches_float():
    rng = np.random.default_rng(8)
    vals = rng.integers(-5, 6, size=(6, 6))
    F = [[Fraction(int(x), 7) for x in row] for row in vals]
    u, td, rem = ustat_decomposition_exact(F)
    # remainder is two_delta / (n - 1) exactly
    assert rem == td / 5
    v = np.arange(6.0)[:, None]
    s = PairedSample(v, v)
    r = ustat_decomposition_check(s, lambda z: vals[int(z[0]), int(z[1])] / 7)
    assert r.u_n == pytest.approx(float(u), abs=1e-12)
    assert r.remainder == pytest.approx(float(rem), abs=1e-12)


def test_ustat_needs_two():
    with pytest.raises(ValueError):
        ustat_decomposition_check(PairedSample([[0.0]], [[0.0]]), lambda z: 1.0)


def _scaled_statistics(n, trials, dependent, seed=5):
    from entropic_ot.experiments import stream_seed

    out = []
    for t in range(trials):
        rng = np.random.default_rng(stream_seed(seed, n, t))
        v = rng.uniform(size=(n, 1))
        w = v.copy() if dependent else rng.uniform(size=(n, 1))
        out.append(n * independence_statistic(PairedSample(v, w), quadratic_cost()))
    return np.array(out)


@pytest.mark.slow
def test_null_scaling_is_order_one_over_n():
    medians = [np.median(_scaled_statistics(n, 200, False)) for n in (50, 100, 200)]
    assert max(medians) / min(medians) <= 1.3


def test_dependent_statistic_grows_with_n():
    small = _scaled_statistics(50, 30, True).mean()
    large = _scaled_statistics(200, 30, True).mean()
    assert large >= 3 * small
