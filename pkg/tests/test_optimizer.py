import math

import numpy as np
import pytest
from scipy import optimize

from copuladesign.copula import CopulaSpec
from copuladesign.design import DesignMeasure, certify, sensitivity
from copuladesign.errors import ParameterDomainError
from copuladesign.fim import design_fim, elementary_fim, log_det
from copuladesign.models import GaussianMarginProblem, PolynomialTrend
from copuladesign.optimizer import (
    OptimizerConfig,
    d_step,
    fedorov_wynn,
    ignorance_loss_table,
    misspecification_table,
    refine_weights,
    with_overrides,
)
from copuladesign.published import FEDOROV_POINTS, FEDOROV_WEIGHTS

QUADRATIC = PolynomialTrend((0, 1, 2))


def _twin_quadratic():
    return GaussianMarginProblem(QUADRATIC, QUADRATIC, design_space=(-1.0, 1.0))


@pytest.fixture(scope="module")
def quadratic_result():
    return fedorov_wynn(_twin_quadratic(), None, OptimizerConfig(grid_size=401))


@pytest.fixture(scope="module")
def linear_result():
    return fedorov_wynn(GaussianMarginProblem(), None, OptimizerConfig(cert_grid=2001))


def _slsqp_weights(ms, w0):
    """Independent fixed-support weight optimum by constrained log det maximisation."""

    def neg(w):
        sign, val = np.linalg.slogdet(np.einsum("i,ipq->pq", w, ms))
        return -val if sign > 0 else 1e10

    cons = ({"type": "eq", "fun": lambda w: w.sum() - 1.0},)
    res = optimize.minimize(neg, w0, method="SLSQP", bounds=[(1e-9, 1.0)] * len(w0),
                            constraints=cons, options={"ftol": 1e-15, "maxiter": 1000})
    return res.x


def test_quadratic_regression_optimum(quadratic_result):
    design, trace, report = quadratic_result
    np.testing.assert_allclose(design.points, [-1.0, 0.0, 1.0], atol=1e-6)
    np.testing.assert_allclose(design.weights, [1 / 3] * 3, atol=1e-6)
    assert report.certified
    assert report.max_sensitivity == pytest.approx(6.0, abs=1e-4)


def test_trace_is_monotone(quadratic_result, linear_result):
    for result in (quadratic_result, linear_result):
        assert len(result.trace) > 1
        assert result.trace.is_monotone()


def test_linear_optimum_is_certified_four_point_design(linear_result):
    design, _, report = linear_result
    assert linear_result.converged
    assert report.certified
    assert len(design) == 4
    assert design.points[0] == 0.0 and design.points[-1] == 1.0
    np.testing.assert_allclose(design.points, FEDOROV_POINTS, atol=0.02)
    np.testing.assert_allclose(design.weights, FEDOROV_WEIGHTS, atol=0.02)
    # equality on the support, as the equivalence theorem requires
    np.testing.assert_allclose(sensitivity(design.points, design, GaussianMarginProblem()), 6.0, atol=1e-3)


def test_optimizer_is_deterministic():
    cfg = OptimizerConfig(grid_size=201)
    a = fedorov_wynn(_twin_quadratic(), None, cfg)
    b = fedorov_wynn(_twin_quadratic(), None, cfg)
    assert a.design.points.tobytes() == b.design.points.tobytes()
    assert a.design.weights.tobytes() == b.design.weights.tobytes()
    np.testing.assert_array_equal(a.trace.criteria(), b.trace.criteria())


@pytest.mark.parametrize("d_max, p", [(7.5, 6), (12.0, 7), (5.2, 5)])
def test_step_length_maximises_log_det(d_max, p, rng):
    # build M and m with tr(M^-1 m) = d_max by scaling a random direction
    a = rng.normal(size=(p, p))
    M = a @ a.T + np.eye(p)
    v = rng.normal(size=p)
    m = np.outer(v, v) * d_max / float(v @ np.linalg.solve(M, v))
    res = optimize.minimize_scalar(lambda g: -np.linalg.slogdet((1 - g) * M + g * m)[1],
                                   bounds=(0.0, 1.0), method="bounded", options={"xatol": 1e-12})
    assert d_step(d_max, p) == pytest.approx(res.x, abs=1e-7)


def test_refine_weights_keeps_the_optimum_fixed(quadratic_result):
    design = quadratic_result.design
    out = refine_weights(design, _twin_quadratic(), iters=50)
    np.testing.assert_allclose(out.weights, design.weights, atol=1e-9)


@pytest.mark.filterwarnings("ignore:Values in x were outside bounds:RuntimeWarning")
def test_refine_weights_from_perturbed_start_matches_constrained_optimum():
    prob = GaussianMarginProblem()
    start = DesignMeasure(FEDOROV_POINTS, [0.2, 0.3, 0.2, 0.3])
    out = refine_weights(start, prob, iters=20000, tol=1e-13)
    ms = elementary_fim(prob, np.array(FEDOROV_POINTS))
    oracle = _slsqp_weights(ms, np.full(4, 0.25))
    np.testing.assert_allclose(out.weights, oracle, atol=1e-5)
    assert log_det(design_fim(out, prob)) >= log_det(design_fim(start, prob))


def test_refine_weights_single_point():
    xi = DesignMeasure.single(0.5)
    assert refine_weights(xi, _twin_quadratic()) is xi


def test_config_validation_and_overrides():
    with pytest.raises(ParameterDomainError):
        OptimizerConfig(grid_size=5).validate(6)
    with pytest.raises(ParameterDomainError):
        OptimizerConfig(eps_bound=0.0).validate(6)
    with pytest.raises(ParameterDomainError):
        OptimizerConfig(max_iters=0).validate(6)
    cfg = with_overrides(OptimizerConfig(), grid_size=501, tol_cert=None)
    assert cfg.grid_size == 501 and cfg.tol_cert == OptimizerConfig().tol_cert


def test_max_iters_reported_as_not_converged():
    result = fedorov_wynn(GaussianMarginProblem(), None, OptimizerConfig(grid_size=201, max_iters=2))
    assert not result.converged
    assert not result.report.certified
    assert "max_iters" in result.report.summary()


def test_ignorance_table_rows(linear_result):
    rows = ignorance_loss_table(
        GaussianMarginProblem(),
        [("gaussian", 0.2), ("clayton", -0.1)],
        linear_result.design,
        OptimizerConfig(grid_size=501),
    )
    assert [r.status for r in rows] == ["ok", "n.d."]
    ok = rows[0]
    assert ok.alpha == pytest.approx(math.sin(math.pi * 0.2 / 2))
    # the full-model optimum can only do better than the benchmark
    assert 0.0 <= ok.loss_percent < 0.5
    assert rows[1].loss_percent is None


def test_misspecification_diagonal_is_zero():
    rows = misspecification_table(
        GaussianMarginProblem(),
        [0.3],
        [("gaussian", "gaussian"), ("gaussian", "frank"), ("frank", "gaussian")],
        OptimizerConfig(grid_size=501),
    )
    assert [r.status for r in rows] == ["ok"] * 3
    assert rows[0].loss_percent == 0.0
    assert rows[1].loss_percent >= -1e-9 and rows[2].loss_percent >= -1e-9
    assert rows[1].assumed_family == "frank"


def test_certify_agrees_with_optimizer_report(linear_result):
    rep = certify(linear_result.design, GaussianMarginProblem(), grid_size=2001)
    assert rep.max_sensitivity == pytest.approx(linear_result.report.max_sensitivity, rel=1e-12)
