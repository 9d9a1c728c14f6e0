import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from copuladesign.copula import CopulaSpec
from copuladesign.design import (
    DesignMeasure,
    canonicalize,
    certify,
    d_efficiency,
    default_merge_tol,
    efficiency_loss_percent,
    frechet_d,
    gateaux_d,
    sensitivity,
)
from copuladesign.errors import DesignValidationError, SingularDesignError
from copuladesign.fim import design_fim
from copuladesign.models import BinaryLogisticProblem, GaussianMarginProblem, PolynomialTrend
from copuladesign.published import FEDOROV_POINTS, FEDOROV_WEIGHTS

QUADRATIC = PolynomialTrend((0, 1, 2))


def _twin_quadratic(copula=None):
    return GaussianMarginProblem(QUADRATIC, QUADRATIC, copula or CopulaSpec("product"),
                                 design_space=(-1.0, 1.0))


def _independent_sensitivity(points, weights, xs):
    """Sensitivity of the independent two-response linear model, from plain numpy."""

    def rows(x):
        g = np.zeros((2, 6))
        g[0, :3] = [1, x, x * x]
        g[1, 3:] = [x, x**3, x**4]
        return g

    M = sum(w * rows(x).T @ rows(x) for x, w in zip(points, weights))
    Minv = np.linalg.inv(M)
    return np.array([np.trace(Minv @ rows(x).T @ rows(x)) for x in xs])


def test_design_validation():
    with pytest.raises(DesignValidationError):
        DesignMeasure([0.1, 0.2], [0.5, 0.4])
    with pytest.raises(DesignValidationError):
        DesignMeasure([0.1, 0.2], [1.2, -0.2])
    with pytest.raises(DesignValidationError):
        DesignMeasure([0.1, np.nan], [0.5, 0.5])
    with pytest.raises(DesignValidationError):
        DesignMeasure([0.1], [0.5, 0.5])
    with pytest.raises(DesignValidationError):
        DesignMeasure([], [])
    with pytest.raises(DesignValidationError):
        DesignMeasure([0.0, 1.5], [0.5, 0.5]).check_space((0.0, 1.0))
    xi = DesignMeasure.from_unnormalized([0.0, 1.0], [2.0, 6.0])
    np.testing.assert_allclose(xi.weights, [0.25, 0.75])
    with pytest.raises(ValueError):
        xi.weights[0] = 0.5


def test_canonicalize_merges_and_averages():
    xi = DesignMeasure([0.9, 0.3801, 0.3799], [0.7, 0.195, 0.105])
    out = canonicalize(xi, default_merge_tol((0.0, 1.0)))
    np.testing.assert_allclose(out.points, [0.38003, 0.9], atol=1e-12)
    np.testing.assert_allclose(out.weights, [0.3, 0.7], atol=1e-12)
    assert out.is_canonical()


def test_canonicalize_prunes_and_renormalises():
    xi = DesignMeasure([0.0, 0.5, 1.0], [0.49995, 0.00005, 0.5])
    out = canonicalize(xi, 1e-3)
    np.testing.assert_allclose(out.points, [0.0, 1.0])
    assert out.weights.sum() == pytest.approx(1.0, abs=1e-15)


@given(st.lists(st.floats(0.0, 1.0), min_size=1, max_size=12), st.integers(0, 2**32 - 1))
def test_canonicalize_preserves_mass_and_order(points, seed):
    w = np.random.default_rng(seed).uniform(0.01, 1.0, len(points))
    xi = DesignMeasure.from_unnormalized(points, w)
    out = canonicalize(xi, 1e-3, prune_tol_w=0.0)
    assert out.weights.sum() == pytest.approx(1.0, abs=1e-12)
    assert out.is_canonical()
    assert np.dot(out.points, out.weights) == pytest.approx(np.dot(xi.points, xi.weights), abs=1e-12)


def test_quadratic_regression_optimum_is_certified():
    prob = _twin_quadratic()
    xi = DesignMeasure([-1.0, 0.0, 1.0], [1 / 3, 1 / 3, 1 / 3])
    report = certify(xi, prob, grid_size=2001, tol_cert=1e-10)
    assert report.certified
    assert report.max_sensitivity == pytest.approx(6.0, abs=1e-10)
    # d(x) for one quadratic block: 3 - 9/2 x^2 + 9/2 x^4; doubled for two blocks
    xs = np.linspace(-1, 1, 9)
    np.testing.assert_allclose(sensitivity(xs, xi, prob), 2 * (3 - 4.5 * xs**2 + 4.5 * xs**4),
                               rtol=1e-10)


def test_suboptimal_design_is_not_certified():
    prob = _twin_quadratic()
    xi = DesignMeasure([-1.0, 0.0, 1.0], [0.25, 0.5, 0.25])
    report = certify(xi, prob)
    assert not report.certified
    assert report.max_sensitivity == pytest.approx(8.0, abs=1e-10)
    assert abs(report.argmax_x) == 1.0
    assert report.gap == pytest.approx(1 / 3)


def test_rounded_linear_design_against_numpy_oracle():
    prob = GaussianMarginProblem()
    xi = DesignMeasure(FEDOROV_POINTS, FEDOROV_WEIGHTS)
    report = certify(xi, prob, grid_size=2001)
    xs = np.array([p[0] for p in report.profile])
    d = np.array([p[1] for p in report.profile])
    np.testing.assert_allclose(d, _independent_sensitivity(FEDOROV_POINTS, FEDOROV_WEIGHTS, xs),
                               rtol=1e-9)
    # two-decimal rounding leaves the bound exceeded by about 3%
    assert report.max_sensitivity == pytest.approx(6.189, abs=1e-3)
    assert not report.certified


def test_singular_design_is_reported_not_raised():
    prob = GaussianMarginProblem()
    report = certify(DesignMeasure([0.0, 1.0], [0.5, 0.5]), prob)
    assert not report.certified
    assert math.isinf(report.max_sensitivity)
    assert "singular" in report.summary()


def test_certify_rejects_tiny_grid():
    with pytest.raises(ValueError):
        certify(DesignMeasure([-1.0, 0.0, 1.0], [1 / 3] * 3), _twin_quadratic(), grid_size=50)


@pytest.mark.parametrize(
    "prob, points",
    [
        (GaussianMarginProblem(copula=CopulaSpec("clayton", 1.08)), [0.0, 0.2, 0.4, 0.6, 0.8, 0.9, 1.0]),
        (BinaryLogisticProblem(copula=CopulaSpec("frank", 5.0)), [0.0, 1.0, 2.5, 4.0, 7.0]),
    ],
    ids=["continuous", "binary"],
)
def test_weighted_sensitivity_averages_to_dimension(prob, points, rng):
    w = rng.uniform(0.1, 1.0, len(points))
    xi = DesignMeasure.from_unnormalized(points, w)
    d = sensitivity(xi.points, xi, prob)
    assert np.dot(xi.weights, d) == pytest.approx(prob.n_params, rel=1e-8)


def _random_spd(rng, p):
    a = rng.normal(size=(p, p))
    return a @ a.T + p * np.eye(p)


def test_directional_derivative_identities(rng):
    M1, M2 = _random_spd(rng, 5), _random_spd(rng, 5)
    assert frechet_d(M1, M1) == pytest.approx(0.0, abs=1e-12)
    assert frechet_d(np.eye(3), 2 * np.eye(3)) == pytest.approx(3.0, abs=1e-14)
    assert gateaux_d(np.eye(3), 2 * np.eye(3)) == pytest.approx(6.0, abs=1e-14)
    # Frechet derivative equals the Gateaux derivative in direction M2 - M1
    assert frechet_d(M1, M2) == pytest.approx(gateaux_d(M1, M2 - M1), rel=1e-10, abs=1e-10)
    # Gateaux derivative is linear in the direction
    M3 = _random_spd(rng, 5)
    assert gateaux_d(M1, 2 * M2 + M3) == pytest.approx(2 * gateaux_d(M1, M2) + gateaux_d(M1, M3), rel=1e-12)


def test_gateaux_matches_finite_difference_of_log_det(rng):
    M1, M2 = _random_spd(rng, 4), _random_spd(rng, 4)
    h = 1e-6
    fd = (np.linalg.slogdet(M1 + h * M2)[1] - np.linalg.slogdet(M1 - h * M2)[1]) / (2 * h)
    assert gateaux_d(M1, M2) == pytest.approx(fd, rel=1e-7)


def test_gateaux_singular_raises():
    with pytest.raises(SingularDesignError):
        gateaux_d(np.zeros((2, 2)), np.eye(2))


def test_efficiency():
    prob = _twin_quadratic()
    opt = DesignMeasure([-1.0, 0.0, 1.0], [1 / 3] * 3)
    other = DesignMeasure([-1.0, 0.0, 1.0], [0.25, 0.5, 0.25])
    assert d_efficiency(opt, opt, prob) == pytest.approx(1.0, abs=1e-14)
    # |M| of one quadratic block with weights (a, b, a): 4 a^2 b
    expect = ((4 * 0.25**2 * 0.5) / (4 / 27)) ** (2 / 6)
    assert d_efficiency(other, opt, prob) == pytest.approx(expect, rel=1e-12)
    assert efficiency_loss_percent(0.98) == pytest.approx(2.0)
    singular = DesignMeasure([0.0, 1.0], [0.5, 0.5])
    assert d_efficiency(singular, opt, prob) == 0.0
    with pytest.raises(SingularDesignError):
        d_efficiency(opt, singular, prob)


def test_design_information_ignores_point_order():
    prob = BinaryLogisticProblem(copula=CopulaSpec("gumbel", 1.84))
    a = DesignMeasure([0.0, 2.8, 6.79], [0.42, 0.36, 0.22])
    b = DesignMeasure([6.79, 0.0, 2.8], [0.22, 0.42, 0.36])
    np.testing.assert_allclose(design_fim(a, prob), design_fim(b, prob), rtol=1e-14)
