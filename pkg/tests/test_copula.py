import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from copuladesign import copula as cop
from copuladesign.copula import CopulaSpec
from copuladesign.errors import AttainabilityError, BoundaryError, ParameterDomainError
from copuladesign.fim import QuadratureRule

INTERIOR = [
    CopulaSpec("gaussian", -0.6),
    CopulaSpec("gaussian", 0.8),
    CopulaSpec("fgm", -0.9),
    CopulaSpec("fgm", 0.45),
    CopulaSpec("clayton", 0.24),
    CopulaSpec("clayton", 6.0),
    CopulaSpec("frank", -5.0),
    CopulaSpec("frank", 14.13),
    CopulaSpec("gumbel", 1.12),
    CopulaSpec("gumbel", 5.45),
]
ALL = [CopulaSpec("product")] + INTERIOR
ids = [str(s) for s in ALL]


def _interior_points(rng, n=100, margin=0.02):
    return rng.uniform(margin, 1 - margin, size=(2, n))


# --- cdf --------------------------------------------------------------------


def test_product_cdf():
    assert cop.cdf(CopulaSpec("product"), 0.3, 0.7) == pytest.approx(0.21, abs=1e-15)


def test_fgm_cdf_centre():
    assert cop.cdf(CopulaSpec("fgm", 1.0), 0.5, 0.5) == pytest.approx(0.3125, abs=1e-15)


@pytest.mark.parametrize("spec", ALL, ids=ids)
def test_boundary_conditions(spec):
    u = np.array([0.0, 0.25, 0.5, 1.0, 1e-9, 0.999])
    assert np.allclose(cop.cdf(spec, u, 1.0), u, atol=1e-12)
    assert np.allclose(cop.cdf(spec, 1.0, u), u, atol=1e-12)
    assert np.allclose(cop.cdf(spec, u, 0.0), 0.0, atol=1e-12)
    assert np.allclose(cop.cdf(spec, 0.0, u), 0.0, atol=1e-12)


@pytest.mark.parametrize("spec", ALL, ids=ids)
def test_two_increasing(spec, rng):
    a = np.sort(rng.uniform(0, 1, size=(1000, 2)), axis=1)
    b = np.sort(rng.uniform(0, 1, size=(1000, 2)), axis=1)
    vol = (cop.cdf(spec, a[:, 1], b[:, 1]) - cop.cdf(spec, a[:, 0], b[:, 1])
           - cop.cdf(spec, a[:, 1], b[:, 0]) + cop.cdf(spec, a[:, 0], b[:, 0]))
    assert np.min(vol) >= -1e-12


@pytest.mark.parametrize("spec", ALL, ids=ids)
def test_frechet_bounds(spec, rng):
    u1, u2 = rng.uniform(0, 1, size=(2, 500))
    c = cop.cdf(spec, u1, u2)
    assert np.all(c >= np.maximum(u1 + u2 - 1, 0) - 1e-12)
    assert np.all(c <= np.minimum(u1, u2) + 1e-12)


# --- density ----------------------------------------------------------------


def test_product_density_is_one(rng):
    u1, u2 = _interior_points(rng)
    assert np.allclose(cop.pdf(CopulaSpec("product"), u1, u2), 1.0)
    assert np.allclose(cop.log_pdf(CopulaSpec("product"), u1, u2), 0.0)


def test_fgm_density_centre():
    assert cop.pdf(CopulaSpec("fgm", 0.45), 0.5, 0.5) == pytest.approx(1.0, abs=1e-15)
    assert cop.log_pdf(CopulaSpec("fgm", 0.45), 0.5, 0.5) == pytest.approx(0.0, abs=1e-15)


def test_clayton_density_matches_mixed_difference():
    spec, h = CopulaSpec("clayton", 2.0), 1e-4
    fd = (cop.cdf(spec, 0.5 + h, 0.5 + h) - cop.cdf(spec, 0.5 + h, 0.5 - h)
          - cop.cdf(spec, 0.5 - h, 0.5 + h) + cop.cdf(spec, 0.5 - h, 0.5 - h)) / (4 * h * h)
    assert cop.pdf(spec, 0.5, 0.5) == pytest.approx(fd, rel=1e-6)


def test_gumbel_log_density_consistent():
    spec = CopulaSpec("gumbel", 5.45)
    assert cop.log_pdf(spec, 0.9, 0.9) == pytest.approx(math.log(cop.pdf(spec, 0.9, 0.9)), abs=1e-10)


@pytest.mark.parametrize("spec", INTERIOR, ids=[str(s) for s in INTERIOR])
def test_density_matches_mixed_difference_of_cdf(spec, rng):
    u1, u2 = _interior_points(rng, 40, margin=0.1)
    h = 1e-4
    fd = (cop.cdf(spec, u1 + h, u2 + h) - cop.cdf(spec, u1 + h, u2 - h)
          - cop.cdf(spec, u1 - h, u2 + h) + cop.cdf(spec, u1 - h, u2 - h)) / (4 * h * h)
    assert np.allclose(cop.pdf(spec, u1, u2), fd, rtol=2e-5, atol=1e-6)


# Order-64 tensor rules are accurate to 1e-6 wherever the density is smooth
# in the rule's coordinates; bounded densities use Gauss-Legendre on the
# square, corner-singular ones Gauss-Hermite in normal scores.
TENSOR_CASES = [
    (CopulaSpec("product"), "legendre"),
    (CopulaSpec("gaussian", -0.6), "normal"),
    (CopulaSpec("gaussian", 0.8), "normal"),
    (CopulaSpec("fgm", -0.9), "legendre"),
    (CopulaSpec("fgm", 0.45), "legendre"),
    (CopulaSpec("clayton", 0.24), "normal"),
    (CopulaSpec("frank", -5.0), "legendre"),
    (CopulaSpec("frank", 14.13), "legendre"),
    (CopulaSpec("gumbel", 1.12), "normal"),
]


@pytest.mark.parametrize("spec,kind", TENSOR_CASES, ids=[f"{s}-{k}" for s, k in TENSOR_CASES])
def test_density_integrates_to_one_tensor(spec, kind):
    rule = QuadratureRule(64, kind)
    total = rule.integrate_unit_square(lambda a, b: cop.pdf(spec, a, b))
    assert total == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("spec", [CopulaSpec("clayton", 1.08), CopulaSpec("clayton", 6.0),
                                  CopulaSpec("gumbel", 1.84), CopulaSpec("gumbel", 5.45)], ids=str)
@pytest.mark.parametrize("u1", [0.05, 0.3, 0.5, 0.77, 0.95])
def test_density_slices_integrate_to_one(spec, u1):
    # Strong dependence concentrates mass on the diagonal; check each
    # conditional slice with adaptive quadrature instead.
    val, _ = integrate.quad(lambda v: float(cop.pdf(spec, u1, v)), 0.0, 1.0,
                            points=[u1], epsabs=1e-11, epsrel=1e-11, limit=400)
    assert val == pytest.approx(1.0, abs=1e-6)


def test_density_rejects_boundary():
    with pytest.raises(BoundaryError):
        cop.pdf(CopulaSpec("clayton", 2.0), 0.0, 0.5)
    with pytest.raises(BoundaryError):
        cop.partial_u1(CopulaSpec("gumbel", 2.0), 0.5, 1.0)


# --- partial derivatives ----------------------------------------------------


def test_product_partial_u1_is_u2():
    assert cop.partial_u1(CopulaSpec("product"), 0.3, 0.8) == pytest.approx(0.8)


def test_fgm_partial_u1_centre():
    assert cop.partial_u1(CopulaSpec("fgm", 1.0), 0.5, 0.5) == pytest.approx(0.5, abs=1e-15)


@pytest.mark.parametrize("spec", ALL, ids=ids)
def test_partials_match_finite_differences(spec, rng):
    u1, u2 = _interior_points(rng)
    h = 1e-6
    fd1 = (cop.cdf(spec, u1 + h, u2) - cop.cdf(spec, u1 - h, u2)) / (2 * h)
    fd2 = (cop.cdf(spec, u1, u2 + h) - cop.cdf(spec, u1, u2 - h)) / (2 * h)
    assert np.allclose(cop.partial_u1(spec, u1, u2), fd1, atol=1e-6, rtol=0)
    assert np.allclose(cop.partial_u2(spec, u1, u2), fd2, atol=1e-6, rtol=0)


@pytest.mark.parametrize("spec", ALL, ids=ids)
def test_partial_u1_is_conditional_cdf(spec):
    grid = np.linspace(0.01, 0.99, 41)
    for u1 in (0.05, 0.4, 0.9):
        h = cop.partial_u1(spec, u1, grid)
        assert np.all(h >= -1e-9) and np.all(h <= 1 + 1e-9)
        assert np.all(np.diff(h) >= -1e-12)


def test_fgm_partial_alpha_closed_form():
    assert cop.partial_alpha(CopulaSpec("fgm", 0.3), 0.5, 0.5) == pytest.approx(0.0625, abs=1e-15)


def test_partial_alpha_rejects_product_and_boundary():
    with pytest.raises(ParameterDomainError):
        cop.partial_alpha(CopulaSpec("product"), 0.5, 0.5)
    with pytest.raises(BoundaryError):
        cop.partial_alpha(CopulaSpec("fgm", 1.0), 0.5, 0.5)
    with pytest.raises(BoundaryError):
        cop.partial_alpha(CopulaSpec("gumbel", 1.0), 0.5, 0.5)


@pytest.mark.parametrize("spec", INTERIOR, ids=[str(s) for s in INTERIOR])
def test_partial_alpha_matches_finite_difference(spec, rng):
    u1, u2 = _interior_points(rng, 30)
    a = spec.alpha
    h = 1e-5 * max(1.0, abs(a))
    fd = (cop.cdf(spec.with_alpha(a + h), u1, u2) - cop.cdf(spec.with_alpha(a - h), u1, u2)) / (2 * h)
    assert np.allclose(cop.partial_alpha(spec, u1, u2), fd, rtol=1e-5, atol=1e-9)


def test_frank_partial_alpha_example():
    spec, h = CopulaSpec("frank", 5.0), 1e-5
    fd = (cop.cdf(CopulaSpec("frank", 5 + h), 0.3, 0.8) - cop.cdf(CopulaSpec("frank", 5 - h), 0.3, 0.8)) / (2 * h)
    assert cop.partial_alpha(spec, 0.3, 0.8) == pytest.approx(fd, rel=1e-5)


@pytest.mark.parametrize("spec", ALL, ids=ids)
def test_log_density_gradients_match_finite_differences(spec, rng):
    u1, u2 = _interior_points(rng, 30, margin=0.05)
    h = 1e-6
    fd1 = (cop.log_pdf(spec, u1 + h, u2) - cop.log_pdf(spec, u1 - h, u2)) / (2 * h)
    fd2 = (cop.log_pdf(spec, u1, u2 + h) - cop.log_pdf(spec, u1, u2 - h)) / (2 * h)
    assert np.allclose(cop.dlog_pdf_du1(spec, u1, u2), fd1, rtol=1e-5, atol=1e-5)
    assert np.allclose(cop.dlog_pdf_du2(spec, u1, u2), fd2, rtol=1e-5, atol=1e-5)
    if spec.n_params and spec.is_interior():
        a = spec.alpha
        ha = 1e-5 * max(1.0, abs(a))
        fda = (cop.log_pdf(spec.with_alpha(a + ha), u1, u2)
               - cop.log_pdf(spec.with_alpha(a - ha), u1, u2)) / (2 * ha)
        assert np.allclose(cop.dlog_pdf_dalpha(spec, u1, u2), fda, rtol=1e-5, atol=1e-6)


@pytest.mark.parametrize("spec", ALL, ids=ids)
def test_conditional_quantile_inverts_h_function(spec, rng):
    v, u1 = _interior_points(rng, 200, margin=1e-3)
    u2 = cop.conditional_quantile(spec, v, u1)
    assert np.allclose(cop.partial_u1(spec, u1, u2), v, atol=1e-9)


# --- Kendall's tau -----------------------------------------------------------


def _frank_tau_oracle(a):
    # small alpha cancels heavily in 1 - debye, so work at 50 digits
    with mpmath.workdps(50):
        a = mpmath.mpf(a)
        debye = mpmath.quad(lambda t: t / mpmath.expm1(t), [0, a]) / a
        return float(1 - 4 / a * (1 - debye))


def test_tau_closed_forms():
    assert cop.tau_from_alpha(CopulaSpec("clayton", 6.0)) == pytest.approx(0.75, abs=1e-15)
    assert cop.tau_from_alpha(CopulaSpec("gumbel", 5.45)) == pytest.approx(0.81651376, abs=1e-8)
    assert cop.tau_from_alpha(CopulaSpec("gaussian", 0.0)) == 0.0
    assert cop.tau_from_alpha(CopulaSpec("fgm", 0.45)) == pytest.approx(0.1, abs=1e-15)
    assert cop.tau_from_alpha(CopulaSpec("product")) == 0.0


@pytest.mark.parametrize("alpha", [-20.0, -5.0, -0.3, 1e-5, 0.45, 1.0, 5.0, 14.13, 40.0])
def test_frank_tau_matches_high_precision_debye(alpha):
    assert cop.tau_from_alpha(CopulaSpec("frank", alpha)) == pytest.approx(
        _frank_tau_oracle(alpha), abs=1e-12)


def test_frank_tau_at_alpha_five():
    # The tau=0.45 row of the binary study quotes alpha=5; the exact value is 0.4567.
    assert cop.tau_from_alpha(CopulaSpec("frank", 5.0)) == pytest.approx(_frank_tau_oracle(5.0), abs=1e-12)
    assert cop.alpha_from_tau("frank", 0.45).alpha == pytest.approx(4.8936, abs=1e-3)


def test_alpha_from_tau_examples():
    assert cop.alpha_from_tau("fgm", 0.10).alpha == pytest.approx(0.45)
    assert cop.alpha_from_tau("gumbel", 0.816).alpha == pytest.approx(5.4347826, abs=1e-6)
    assert cop.alpha_from_tau("clayton", 0.75).alpha == pytest.approx(6.0)
    with pytest.raises(AttainabilityError):
        cop.alpha_from_tau("clayton", -0.05)
    with pytest.raises(AttainabilityError):
        cop.alpha_from_tau("fgm", 0.5)
    with pytest.raises(AttainabilityError):
        cop.alpha_from_tau("frank", 0.0)


_TAU_STRATEGIES = {
    "gaussian": st.floats(-0.99, 0.99),
    "fgm": st.floats(-2 / 9, 2 / 9),
    "clayton": st.floats(1e-4, 0.95),
    "frank": st.floats(1e-4, 0.95).flatmap(lambda t: st.sampled_from([t, -t])),
    "gumbel": st.floats(0.0, 0.95),
}


@pytest.mark.parametrize("family", sorted(_TAU_STRATEGIES))
def test_tau_round_trip(family):
    @given(_TAU_STRATEGIES[family])
    def check(tau):
        spec = cop.alpha_from_tau(family, tau)
        assert cop.tau_from_alpha(spec) == pytest.approx(tau, abs=1e-8)

    check()


def test_tau_range_attainability():
    assert cop.is_attainable("fgm", 2 / 9)
    assert not cop.is_attainable("fgm", 0.23)
    assert cop.is_attainable("gumbel", 0.0)
    assert not cop.is_attainable("gumbel", 1.0)
    assert not cop.is_attainable("clayton", 0.0)


# --- construction ------------------------------------------------------------


@pytest.mark.parametrize("family,alpha", [
    ("gaussian", 1.0), ("fgm", 1.5), ("clayton", 0.0), ("clayton", -0.5),
    ("frank", 0.0), ("gumbel", 0.99), ("gumbel", math.inf), ("product", 0.3),
])
def test_rejects_parameters_outside_domain(family, alpha):
    with pytest.raises(ParameterDomainError):
        CopulaSpec(family, alpha)


def test_family_names_parse():
    assert CopulaSpec("FRANK ", 2.0).family is cop.CopulaFamily.FRANK
    with pytest.raises(ParameterDomainError):
        CopulaSpec("joe", 2.0)


def test_spec_requires_alpha():
    with pytest.raises(ParameterDomainError):
        CopulaSpec("clayton")


def _frank_cdf_mp(a, x, y):
    return -mpmath.log(1 + mpmath.expm1(-a * x) * mpmath.expm1(-a * y) / mpmath.expm1(-a)) / a


def _frank_log_pdf_mp(a, x, y):
    num = a * -mpmath.expm1(-a) * mpmath.exp(-a * (x + y))
    den = (-mpmath.expm1(-a) - mpmath.expm1(-a * x) * mpmath.expm1(-a * y)) ** 2
    return mpmath.log(num / den)


@pytest.mark.parametrize("alpha", [-8.0, -0.9, 0.45, 5.0, 14.13, 20.0])
def test_frank_alpha_derivatives_match_high_precision(alpha, rng):
    spec = CopulaSpec("frank", alpha)
    u1, u2 = rng.uniform(0.01, 0.99, size=(2, 12))
    got_c = cop.partial_alpha(spec, u1, u2)
    got_l = cop.dlog_pdf_dalpha(spec, u1, u2)
    with mpmath.workdps(40):
        for i in range(u1.size):
            x, y = mpmath.mpf(u1[i]), mpmath.mpf(u2[i])
            want_c = float(mpmath.diff(lambda a: _frank_cdf_mp(a, x, y), mpmath.mpf(alpha)))
            want_l = float(mpmath.diff(lambda a: _frank_log_pdf_mp(a, x, y), mpmath.mpf(alpha)))
            assert got_c[i] == pytest.approx(want_c, rel=1e-9, abs=1e-13)
            assert got_l[i] == pytest.approx(want_l, rel=1e-8, abs=1e-11)
