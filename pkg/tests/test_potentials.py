import numpy as np
import pytest

from conftest import random_measure
from entropic_ot.costs import quadratic_cost
from entropic_ot.measures import DiscreteMeasure, from_samples
from entropic_ot.potentials import (
    barycentric_map,
    box_grid,
    default_grid,
    entropic_map,
    extend_potential,
    grad_potential_1,
    softmax_weights,
)
from entropic_ot.sinkhorn import SinkhornConfig, solve_schrodinger

# mpmath direct sums at the oracle potentials, query x = 0.5
LOPSIDED_MID = {0.5: (0.04587562075878907, 0.5125964806499861),
                1.0: (0.005550880011444887, 0.627482891619641)}


def lopsided(eps):
    mu1 = DiscreteMeasure([[0.0], [1.0]], [0.3, 0.7])
    mu2 = DiscreteMeasure([[0.2], [1.5]], [0.6, 0.4])
    return solve_schrodinger(mu1, mu2, quadratic_cost(), SinkhornConfig(epsilon=eps, tol=1e-12))


def test_extension_at_support_reproduces_potential(cost):
    rng = np.random.default_rng(0)
    mu1, mu2 = random_measure(rng, 9, 2), random_measure(rng, 7, 2)
    sol = solve_schrodinger(mu1, mu2, cost, SinkhornConfig(tol=1e-9))
    np.testing.assert_allclose(extend_potential(sol, mu1.points, 1), sol.phi1, atol=2e-9)
    np.testing.assert_allclose(extend_potential(sol, mu2.points, 2), sol.phi2, atol=2e-9)


def test_extension_one_atom_target(cost):
    y = np.array([0.4, -0.2])
    sol = solve_schrodinger(from_samples([[0.0, 0.0], [1.0, 1.0]]), from_samples([y]), cost)
    x = np.array([0.7, 2.0])
    assert extend_potential(sol, x) == pytest.approx(cost.evaluate(x, y) - sol.phi2[0], abs=1e-14)
    np.testing.assert_allclose(grad_potential_1(sol, x), x - y, atol=1e-15)
    ev = entropic_map(sol, x)
    np.testing.assert_allclose(ev.barycentric, y, atol=1e-15)
    np.testing.assert_allclose(ev.gradient_form, y, atol=1e-15)


def test_symmetric_target_zero_gradient(cost):
    sol = solve_schrodinger(from_samples([[0.0]]), from_samples([[-1.0], [1.0]]), cost)
    assert grad_potential_1(sol, [0.0])[0] == pytest.approx(0.0, abs=1e-15)


def test_point_mass_self_map(cost):
    d0 = from_samples([[0.0]])
    sol = solve_schrodinger(d0, d0, cost)
    assert entropic_map(sol, [0.0]).barycentric[0] == 0.0


@pytest.mark.parametrize("eps", [0.5, 1.0])
def test_midpoint_matches_direct_sum(eps):
    sol = lopsided(eps)
    ext, bary = LOPSIDED_MID[eps]
    assert extend_potential(sol, [0.5]) == pytest.approx(ext, abs=1e-10)
    ev = entropic_map(sol, [0.5])
    assert ev.barycentric[0] == pytest.approx(bary, abs=1e-10)
    assert abs(ev.barycentric[0] - ev.gradient_form[0]) <= 1e-8


def test_gradient_finite_differences(cost):
    rng = np.random.default_rng(3)
    mu1, mu2 = random_measure(rng, 10, 2), random_measure(rng, 12, 2)
    sol = solve_schrodinger(mu1, mu2, cost, SinkhornConfig(tol=1e-10))
    h = 1e-5
    for x in rng.uniform(-0.5, 1.5, size=(20, 2)):
        g = grad_potential_1(sol, x)
        fd = np.array([
            (extend_potential(sol, x + h * e) - extend_potential(sol, x - h * e)) / (2 * h)
            for e in np.eye(2)
        ])
        assert np.max(np.abs(g - fd)) <= 1e-6 * max(1.0, np.max(np.abs(g)))


def test_softmax_rows_sum_to_one(cost):
    rng = np.random.default_rng(4)
    sol = solve_schrodinger(random_measure(rng, 5), random_measure(rng, 6), cost)
    p = softmax_weights(sol, rng.uniform(size=(8, 1)))
    np.testing.assert_allclose(p.sum(axis=1), 1.0, atol=1e-15)
    assert np.all(p >= 0)


def test_batch_and_single_agree(cost):
    rng = np.random.default_rng(5)
    sol = solve_schrodinger(random_measure(rng, 5, 2), random_measure(rng, 6, 2), cost)
    X = rng.uniform(size=(4, 2))
    batch = barycentric_map(sol, X)
    for i, x in enumerate(X):
        np.testing.assert_allclose(barycentric_map(sol, x), batch[i], atol=1e-15)


def test_query_dimension_checked(cost):
    sol = solve_schrodinger(from_samples([[0.0, 0.0]]), from_samples([[1.0, 1.0]]), cost)
    with pytest.raises(ValueError):
        barycentric_map(sol, [0.0])
    with pytest.raises(ValueError):
        extend_potential(sol, [0.0, 0.0], side=3)


def test_map_requires_quadratic():
    from entropic_ot.costs import CostSpec, quadratic_cost

    q = quadratic_cost()
    other = CostSpec("other", q.evaluate, q.grad_x, pairwise=q.pairwise)
    sol = solve_schrodinger(from_samples([[0.0]]), from_samples([[1.0]]), other)
    with pytest.raises(ValueError, match="quadratic"):
        barycentric_map(sol, [0.0])
    # the gradient is defined for any smooth cost
    assert grad_potential_1(sol, [0.0])[0] == pytest.approx(-1.0)


def test_grids():
    g = box_grid([0, 0], [1, 2], [3, 2])
    assert g.shape == (6, 2)
    np.testing.assert_array_equal(g[0], [0, 0])
    np.testing.assert_array_equal(g[-1], [1, 2])
    np.testing.assert_array_equal(box_grid([0], [1], 1), [[0.5]])
    with pytest.raises(ValueError):
        box_grid([0], [1], 0)
    mu = from_samples([[0.0, 0.0], [1.0, 2.0]])
    assert default_grid(mu).shape == (64, 2)
