"""Bivariate copula families used by the design models.

Six exchangeable one-parameter families are supported: the product
(independence) copula, Gaussian, Farlie-Gumbel-Morgenstern (FGM), Clayton,
Frank and Gumbel. Every evaluation function is vectorised over ``u1`` and
``u2`` (numpy broadcasting) and returns a float for scalar input.

Boundary policy: :func:`cdf` accepts the closed unit square, while densities
and partial derivatives require the open square because several densities
diverge at the corners.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize
from scipy.special import ndtr, ndtri

from .bvn import bvn_cdf
from .errors import AttainabilityError, BoundaryError, ParameterDomainError

_FGM_TAU_MAX = 2.0 / 9.0


class CopulaFamily(str, enum.Enum):
    PRODUCT = "product"
    GAUSSIAN = "gaussian"
    FGM = "fgm"
    CLAYTON = "clayton"
    FRANK = "frank"
    GUMBEL = "gumbel"

    @classmethod
    def parse(cls, value) -> "CopulaFamily":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            names = ", ".join(f.value for f in cls)
            raise ParameterDomainError(
                f"unknown copula family {value!r}; expected one of {names}"
            ) from None


def _check_alpha(family: CopulaFamily, alpha):
    if family is CopulaFamily.PRODUCT:
        if alpha is not None:
            raise ParameterDomainError("the product copula takes no parameter")
        return None
    if alpha is None:
        raise ParameterDomainError(f"{family.value} copula requires a parameter alpha")
    alpha = float(alpha)
    if not math.isfinite(alpha):
        raise ParameterDomainError(f"alpha must be finite, got {alpha}")
    ok = {
        CopulaFamily.GAUSSIAN: -1.0 < alpha < 1.0,
        CopulaFamily.FGM: -1.0 <= alpha <= 1.0,
        CopulaFamily.CLAYTON: alpha > 0.0,
        CopulaFamily.FRANK: alpha != 0.0,
        CopulaFamily.GUMBEL: alpha >= 1.0,
    }[family]
    if not ok:
        domain = {
            CopulaFamily.GAUSSIAN: "(-1, 1)",
            CopulaFamily.FGM: "[-1, 1]",
            CopulaFamily.CLAYTON: "(0, inf)",
            CopulaFamily.FRANK: "(-inf, inf) without 0",
            CopulaFamily.GUMBEL: "[1, inf)",
        }[family]
        raise ParameterDomainError(
            f"alpha={alpha} outside the {family.value} domain {domain}"
        )
    return alpha


@dataclass(frozen=True)
class CopulaSpec:
    """A copula family together with its parameter ``alpha``."""

    family: CopulaFamily
    alpha: float | None = None

    def __post_init__(self):
        family = CopulaFamily.parse(self.family)
        object.__setattr__(self, "family", family)
        object.__setattr__(self, "alpha", _check_alpha(family, self.alpha))

    @property
    def n_params(self) -> int:
        return 0 if self.family is CopulaFamily.PRODUCT else 1

    def with_alpha(self, alpha) -> "CopulaSpec":
        return CopulaSpec(self.family, alpha)

    def is_interior(self) -> bool:
        """True when alpha is strictly inside the family's parameter domain."""
        a = self.alpha
        if self.family is CopulaFamily.FGM:
            return -1.0 < a < 1.0
        if self.family is CopulaFamily.GUMBEL:
            return a > 1.0
        return self.family is not CopulaFamily.PRODUCT

    def __str__(self):
        if self.alpha is None:
            return self.family.value
        return f"{self.family.value}(alpha={self.alpha:.6g})"


def _out(a):
    a = np.asarray(a, dtype=float)
    return float(a) if a.ndim == 0 else a


def _closed(u1, u2):
    u1 = np.asarray(u1, dtype=float)
    u2 = np.asarray(u2, dtype=float)
    if np.any(~np.isfinite(u1)) or np.any(~np.isfinite(u2)):
        raise ParameterDomainError("copula arguments must be finite")
    if np.any((u1 < 0) | (u1 > 1) | (u2 < 0) | (u2 > 1)):
        raise ParameterDomainError("copula arguments must lie in [0, 1]")
    return np.broadcast_arrays(u1, u2)


def _open(u1, u2):
    u1, u2 = _closed(u1, u2)
    if np.any((u1 <= 0) | (u1 >= 1) | (u2 <= 0) | (u2 >= 1)):
        raise BoundaryError("density and partial derivatives need u in the open interval (0, 1)")
    return u1, u2


# --- Clayton helpers (log space; u**-alpha overflows for strong dependence) ---

def _clayton_logs(a, lu1, lu2):
    a1 = -a * lu1
    a2 = -a * lu2
    m = np.maximum(a1, a2)
    inner = np.exp(a1 - m) + np.exp(a2 - m) - np.exp(-m)
    log_s = m + np.log(np.maximum(inner, np.finfo(float).tiny))
    return a1, a2, log_s


# --- Gumbel helpers ---

def _gumbel_parts(a, u1, u2):
    lx = np.log(-np.log(u1))
    ly = np.log(-np.log(u2))
    log_a = np.logaddexp(a * lx, a * ly) / a
    return lx, ly, log_a


# --- CDF ---

def cdf(spec: CopulaSpec, u1, u2):
    """Copula distribution function ``C(u1, u2)`` on the closed unit square."""
    u1, u2 = _closed(u1, u2)
    fam, a = spec.family, spec.alpha
    out = np.minimum(u1, u2).astype(float)
    # Boundary conditions C(u, 0) = 0, C(u, 1) = u hold exactly for every family.
    edge = (u1 == 0) | (u2 == 0) | (u1 == 1) | (u2 == 1)
    out = np.where((u1 == 0) | (u2 == 0), 0.0, out)
    out = np.where(u1 == 1, u2, out)
    out = np.where(u2 == 1, u1, out)
    inner = ~edge
    if not np.any(inner):
        return _out(out)
    v1, v2 = u1[inner], u2[inner]
    if fam is CopulaFamily.PRODUCT:
        val = v1 * v2
    elif fam is CopulaFamily.FGM:
        val = v1 * v2 * (1.0 + a * (1.0 - v1) * (1.0 - v2))
    elif fam is CopulaFamily.GAUSSIAN:
        val = bvn_cdf(ndtri(v1), ndtri(v2), a)
    elif fam is CopulaFamily.CLAYTON:
        _, _, log_s = _clayton_logs(a, np.log(v1), np.log(v2))
        val = np.exp(-np.maximum(log_s, 0.0) / a)
    elif fam is CopulaFamily.FRANK:
        val = _frank_cdf(a, v1, v2)
    else:
        _, _, log_a = _gumbel_parts(a, v1, v2)
        val = np.exp(-np.exp(log_a))
    out[inner] = val
    return _out(out)


# --- density ---

def log_pdf(spec: CopulaSpec, u1, u2):
    """Natural log of the copula density; ``-inf`` where the density vanishes."""
    u1, u2 = _open(u1, u2)
    fam, a = spec.family, spec.alpha
    if fam is CopulaFamily.PRODUCT:
        return _out(np.zeros(u1.shape))
    if fam is CopulaFamily.FGM:
        c = 1.0 + a * (1.0 - 2.0 * u1) * (1.0 - 2.0 * u2)
        with np.errstate(divide="ignore"):
            return _out(np.where(c > 0, np.log(np.maximum(c, 0.0)), -np.inf))
    if fam is CopulaFamily.GAUSSIAN:
        x, y = ndtri(u1), ndtri(u2)
        om = 1.0 - a * a
        q = a * a * (x * x + y * y) - 2.0 * a * x * y
        return _out(-0.5 * np.log(om) - q / (2.0 * om))
    if fam is CopulaFamily.CLAYTON:
        lu1, lu2 = np.log(u1), np.log(u2)
        _, _, log_s = _clayton_logs(a, lu1, lu2)
        return _out(np.log1p(a) - (a + 1.0) * (lu1 + lu2) - (1.0 / a + 2.0) * log_s)
    if fam is CopulaFamily.FRANK:
        d0 = np.expm1(-a)
        den = d0 + np.expm1(-a * u1) * np.expm1(-a * u2)
        return _out(np.log(-a * d0) - a * (u1 + u2) - 2.0 * np.log(np.abs(den)))
    lx, ly, log_a = _gumbel_parts(a, u1, u2)
    big_a = np.exp(log_a)
    return _out(
        -big_a
        - np.log(u1)
        - np.log(u2)
        + (a - 1.0) * (lx + ly)
        + (1.0 - 2.0 * a) * log_a
        + np.log(big_a + a - 1.0)
    )


def pdf(spec: CopulaSpec, u1, u2):
    """Copula density ``c(u1, u2)``, the mixed second derivative of :func:`cdf`."""
    return _out(np.exp(log_pdf(spec, u1, u2)))


# --- first derivatives of the CDF ---

def partial_u1(spec: CopulaSpec, u1, u2):
    """``dC/du1``: the conditional distribution of ``U2`` given ``U1 = u1``."""
    u1, u2 = _open(u1, u2)
    fam, a = spec.family, spec.alpha
    if fam is CopulaFamily.PRODUCT:
        val = u2.copy()
    elif fam is CopulaFamily.FGM:
        val = u2 * (1.0 + a * (1.0 - u2) * (1.0 - 2.0 * u1))
    elif fam is CopulaFamily.GAUSSIAN:
        val = ndtr((ndtri(u2) - a * ndtri(u1)) / math.sqrt(1.0 - a * a))
    elif fam is CopulaFamily.CLAYTON:
        lu1 = np.log(u1)
        _, _, log_s = _clayton_logs(a, lu1, np.log(u2))
        val = np.exp(-(a + 1.0) * lu1 - (1.0 / a + 1.0) * log_s)
    elif fam is CopulaFamily.FRANK:
        em1, em2 = np.expm1(-a * u1), np.expm1(-a * u2)
        val = np.exp(-a * u1) * em2 / (np.expm1(-a) + em1 * em2)
    else:
        lx, _, log_a = _gumbel_parts(a, u1, u2)
        val = np.exp(-np.exp(log_a) + (1.0 - a) * log_a + (a - 1.0) * lx - np.log(u1))
    return _out(np.clip(val, 0.0, 1.0))


def partial_u2(spec: CopulaSpec, u1, u2):
    """``dC/du2``; every supported family is exchangeable."""
    return partial_u1(spec, u2, u1)


def _require_parameter(spec: CopulaSpec):
    if spec.family is CopulaFamily.PRODUCT:
        raise ParameterDomainError("the product copula has no parameter to differentiate")
    if not spec.is_interior():
        raise BoundaryError(f"alpha={spec.alpha} is on the {spec.family.value} domain boundary")


def _frank_gap(a, u, v):
    """For ``a > 0`` and ``u <= v``: ``q`` with ``u - C = log1p(q) / a``, and ``d log q / da``.

    ``q`` is a product of well-conditioned factors, so ``u - C`` keeps full
    relative precision where ``C`` is close to ``u``.
    """
    q = np.exp(-a * (v - u)) * -np.expm1(-a * u) * -np.expm1(-a * (1.0 - v)) / -math.expm1(-a)
    dlog_q = u / -np.expm1(-a * u) - v + (1.0 - v) / np.expm1(a * (1.0 - v)) - 1.0 / math.expm1(a)
    return q, dlog_q


def _frank_cdf(a, u1, u2):
    with np.errstate(divide="ignore", invalid="ignore"):
        g = np.expm1(-a * u1) * np.expm1(-a * u2) / np.expm1(-a)
        val = -np.log1p(g) / a
        if a > 0.0:
            # log1p(g) cancels as g -> -1; switch to the gap form there
            u = np.minimum(u1, u2)
            q, _ = _frank_gap(a, u, np.maximum(u1, u2))
            gap = np.log1p(q) / a
            val = np.where(gap < 0.5 * u, u - gap, val)
    return val


def _frank_partial_alpha(a, u1, u2):
    # C_a(u, v) = u - C_{-a}(u, 1 - v) reduces a < 0 to a > 0, and radial
    # symmetry C(u, v) = u + v - 1 + C(1 - u, 1 - v) folds onto u + v <= 1.
    if a < 0.0:
        return _frank_partial_alpha(-a, u1, 1.0 - u2)
    flip = u1 + u2 > 1.0
    u1, u2 = np.where(flip, 1.0 - u1, u1), np.where(flip, 1.0 - u2, u2)
    u, v = np.minimum(u1, u2), np.maximum(u1, u2)
    with np.errstate(divide="ignore", invalid="ignore"):
        q, dlog_q = _frank_gap(a, u, v)
        lq = np.log1p(q)
        from_gap = (lq - a * q / (1.0 + q) * dlog_q) / (a * a)
        e1, e2, den = np.expm1(-a * u1), np.expm1(-a * u2), np.expm1(-a)
        g = e1 * e2 / den
        dlog_g = -u1 * np.exp(-a * u1) / e1 - u2 * np.exp(-a * u2) / e2 + math.exp(-a) / den
        from_g = np.log1p(g) / (a * a) - g * dlog_g / (a * (1.0 + g))
    return np.where(lq / a < 0.5 * u, from_gap, from_g)


def partial_alpha(spec: CopulaSpec, u1, u2):
    """``dC/dalpha`` in closed form for every parametric family."""
    _require_parameter(spec)
    u1, u2 = _open(u1, u2)
    fam, a = spec.family, spec.alpha
    if fam is CopulaFamily.FGM:
        val = u1 * u2 * (1.0 - u1) * (1.0 - u2)
    elif fam is CopulaFamily.GAUSSIAN:
        # Plackett's identity: dPhi2/drho equals the bivariate normal density.
        x, y = ndtri(u1), ndtri(u2)
        om = 1.0 - a * a
        val = np.exp(-(x * x - 2.0 * a * x * y + y * y) / (2.0 * om)) / (2.0 * math.pi * math.sqrt(om))
    elif fam is CopulaFamily.CLAYTON:
        lu1, lu2 = np.log(u1), np.log(u2)
        a1, a2, log_s = _clayton_logs(a, lu1, lu2)
        r1, r2 = np.exp(a1 - log_s), np.exp(a2 - log_s)
        c = np.exp(-log_s / a)
        val = c * (log_s / (a * a) + (lu1 * r1 + lu2 * r2) / a)
    elif fam is CopulaFamily.GUMBEL:
        lx, ly, log_a = _gumbel_parts(a, u1, u2)
        big_a = np.exp(log_a)
        rx, ry = np.exp(a * (lx - log_a)), np.exp(a * (ly - log_a))
        dlog_a = (-log_a + rx * lx + ry * ly) / a
        val = -np.exp(-big_a) * big_a * dlog_a
    else:
        val = _frank_partial_alpha(a, u1, u2)
    return _out(val)


# --- score-type derivatives of the log density (used by the information matrices) ---

def dlog_pdf_du1(spec: CopulaSpec, u1, u2):
    """``d log c / du1``."""
    u1, u2 = _open(u1, u2)
    fam, a = spec.family, spec.alpha
    if fam is CopulaFamily.PRODUCT:
        return _out(np.zeros(u1.shape))
    if fam is CopulaFamily.FGM:
        c = 1.0 + a * (1.0 - 2.0 * u1) * (1.0 - 2.0 * u2)
        return _out(-2.0 * a * (1.0 - 2.0 * u2) / c)
    if fam is CopulaFamily.GAUSSIAN:
        x, y = ndtri(u1), ndtri(u2)
        phi_x = np.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)
        return _out(-(a * a * x - a * y) / (1.0 - a * a) / phi_x)
    if fam is CopulaFamily.CLAYTON:
        lu1 = np.log(u1)
        a1, _, log_s = _clayton_logs(a, lu1, np.log(u2))
        return _out((-(a + 1.0) + (1.0 + 2.0 * a) * np.exp(a1 - log_s)) / u1)
    if fam is CopulaFamily.FRANK:
        em1, em2 = np.expm1(-a * u1), np.expm1(-a * u2)
        den = np.expm1(-a) + em1 * em2
        return _out(-a + 2.0 * a * np.exp(-a * u1) * em2 / den)
    lx, ly, log_a = _gumbel_parts(a, u1, u2)
    big_a = np.exp(log_a)
    x = np.exp(lx)
    da_dx = np.exp((a - 1.0) * (lx - log_a))
    inner = -da_dx + (a - 1.0) / x + (1.0 - 2.0 * a) * da_dx / big_a + da_dx / (big_a + a - 1.0)
    return _out(-(1.0 + inner) / u1)


def dlog_pdf_du2(spec: CopulaSpec, u1, u2):
    """``d log c / du2``."""
    return dlog_pdf_du1(spec, u2, u1)


def _frank_dlog_pdf_dalpha(a, u1, u2):
    # c_a(u, v) = c_{-a}(u, 1 - v) reduces a < 0 to a > 0.
    if a < 0.0:
        return -_frank_dlog_pdf_dalpha(-a, u1, 1.0 - u2)
    # log c = log(a (1 - e^-a)) - a (u1 + u2) - 2 log(inner), where
    # inner = e^{-a u1} + e^{-a u2} - e^{-a} - e^{-a (u1 + u2)} summed without cancellation.
    e1, e2, ea = np.exp(-a * u1), np.exp(-a * u2), math.exp(-a)
    e12 = e1 * e2
    inner = e1 + e2 - ea - e12
    d_inner = -u1 * e1 - u2 * e2 + ea + (u1 + u2) * e12
    return 1.0 / a + ea / -math.expm1(-a) - (u1 + u2) - 2.0 * d_inner / inner


def dlog_pdf_dalpha(spec: CopulaSpec, u1, u2):
    """``d log c / dalpha`` in closed form for every parametric family."""
    _require_parameter(spec)
    u1, u2 = _open(u1, u2)
    fam, a = spec.family, spec.alpha
    if fam is CopulaFamily.FGM:
        t = (1.0 - 2.0 * u1) * (1.0 - 2.0 * u2)
        return _out(t / (1.0 + a * t))
    if fam is CopulaFamily.GAUSSIAN:
        x, y = ndtri(u1), ndtri(u2)
        om = 1.0 - a * a
        q = a * a * (x * x + y * y) - 2.0 * a * x * y
        return _out(a / om - (a * (x * x + y * y) - x * y) / om - a * q / (om * om))
    if fam is CopulaFamily.CLAYTON:
        lu1, lu2 = np.log(u1), np.log(u2)
        a1, a2, log_s = _clayton_logs(a, lu1, lu2)
        r1, r2 = np.exp(a1 - log_s), np.exp(a2 - log_s)
        return _out(
            1.0 / (1.0 + a) - (lu1 + lu2) + log_s / (a * a) + (1.0 / a + 2.0) * (lu1 * r1 + lu2 * r2)
        )
    if fam is CopulaFamily.GUMBEL:
        lx, ly, log_a = _gumbel_parts(a, u1, u2)
        big_a = np.exp(log_a)
        rx, ry = np.exp(a * (lx - log_a)), np.exp(a * (ly - log_a))
        dlog_a = (-log_a + rx * lx + ry * ly) / a
        da = big_a * dlog_a
        return _out(
            -da + (lx + ly) - 2.0 * log_a + (1.0 - 2.0 * a) * dlog_a + (da + 1.0) / (big_a + a - 1.0)
        )
    if fam is CopulaFamily.FRANK:
        return _out(_frank_dlog_pdf_dalpha(a, u1, u2))
    raise ParameterDomainError(f"no alpha derivative for {fam.value}")


def conditional_quantile(spec: CopulaSpec, v, u1):
    """Inverse of :func:`partial_u1` in ``u2``: the ``v``-quantile of ``U2 | U1 = u1``.

    Together with independent uniforms ``(u1, v)`` this is the Rosenblatt
    transform that maps the unit square onto the copula's distribution.
    """
    v, u1 = _open(v, u1)
    fam, a = spec.family, spec.alpha
    if fam is CopulaFamily.PRODUCT:
        u2 = v.copy()
    elif fam is CopulaFamily.FGM:
        b = a * (1.0 - 2.0 * u1)
        u2 = 2.0 * v / ((1.0 + b) + np.sqrt((1.0 + b) ** 2 - 4.0 * b * v))
    elif fam is CopulaFamily.GAUSSIAN:
        u2 = ndtr(a * ndtri(u1) + math.sqrt(1.0 - a * a) * ndtri(v))
    elif fam is CopulaFamily.CLAYTON:
        lu1 = np.log(u1)
        inner = np.expm1(-(a / (a + 1.0)) * np.log(v)) + np.exp(a * lu1)
        u2 = np.exp(lu1 - np.log(inner) / a)
    elif fam is CopulaFamily.FRANK:
        e1 = np.exp(-a * u1)
        t = v * np.expm1(-a) / (e1 - v * np.expm1(-a * u1))
        u2 = -np.log1p(t) / a
    else:
        u2 = _gumbel_conditional_quantile(a, v, u1)
    return _out(u2)


def _gumbel_conditional_quantile(a, v, u1):
    # h(u2 | u1) is increasing in u2; bisect on t = log(-log u2).
    lx = np.log(-np.log(u1))
    lo = np.full(v.shape, -60.0)
    hi = np.full(v.shape, 8.0)
    for _ in range(90):
        mid = 0.5 * (lo + hi)
        log_a = np.logaddexp(a * lx, a * mid) / a
        u2 = np.exp(-np.exp(mid))
        h = np.exp(-np.exp(log_a) + (1.0 - a) * log_a + (a - 1.0) * lx - np.log(u1))
        # larger t means smaller u2, hence smaller h
        above = h > v
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    return np.exp(-np.exp(0.5 * (lo + hi)))


# --- Kendall's tau ---

def _frank_tau(alpha: float) -> float:
    # tau = 1 - (4/a) * (1 - D1(a)) with D1 the first Debye function, rewritten
    # as 1 - (4/a^2) * int_0^a (1 - t/(e^t - 1)) dt to avoid cancellation.
    if abs(alpha) < 1e-4:
        return alpha / 9.0 - alpha**3 / 900.0

    def integrand(t):
        return 0.0 if t == 0.0 else 1.0 - t / math.expm1(t)

    val, _ = integrate.quad(integrand, 0.0, alpha, epsabs=1e-14, epsrel=1e-13, limit=200)
    return 1.0 - 4.0 * val / (alpha * alpha)


def tau_from_alpha(spec: CopulaSpec) -> float:
    """Kendall's tau implied by the copula parameter."""
    fam, a = spec.family, spec.alpha
    if fam is CopulaFamily.PRODUCT:
        return 0.0
    if fam is CopulaFamily.GAUSSIAN:
        return 2.0 / math.pi * math.asin(a)
    if fam is CopulaFamily.FGM:
        return 2.0 * a / 9.0
    if fam is CopulaFamily.CLAYTON:
        return a / (a + 2.0)
    if fam is CopulaFamily.FRANK:
        return _frank_tau(a)
    return (a - 1.0) / a


def tau_range(family) -> tuple[float, float, bool, bool]:
    """``(low, high, low_closed, high_closed)`` of attainable Kendall's tau."""
    family = CopulaFamily.parse(family)
    return {
        CopulaFamily.PRODUCT: (0.0, 0.0, True, True),
        CopulaFamily.GAUSSIAN: (-1.0, 1.0, False, False),
        CopulaFamily.FGM: (-_FGM_TAU_MAX, _FGM_TAU_MAX, True, True),
        CopulaFamily.CLAYTON: (0.0, 1.0, False, False),
        CopulaFamily.FRANK: (-1.0, 1.0, False, False),
        CopulaFamily.GUMBEL: (0.0, 1.0, True, False),
    }[family]


def is_attainable(family, tau: float) -> bool:
    lo, hi, lo_closed, hi_closed = tau_range(family)
    if CopulaFamily.parse(family) is CopulaFamily.FRANK and tau == 0.0:
        return False
    above = tau >= lo if lo_closed else tau > lo
    below = tau <= hi if hi_closed else tau < hi
    return above and below


def alpha_from_tau(family, tau: float) -> CopulaSpec:
    """Copula spec of ``family`` whose Kendall's tau equals ``tau``."""
    family = CopulaFamily.parse(family)
    tau = float(tau)
    if not is_attainable(family, tau):
        lo, hi, lo_c, hi_c = tau_range(family)
        rng = f"{'[' if lo_c else '('}{lo:.6g}, {hi:.6g}{']' if hi_c else ')'}"
        extra = " excluding 0" if family is CopulaFamily.FRANK else ""
        raise AttainabilityError(
            f"Kendall's tau={tau} is not attainable by the {family.value} copula "
            f"(attainable range {rng}{extra})"
        )
    if family is CopulaFamily.PRODUCT:
        return CopulaSpec(family)
    if family is CopulaFamily.GAUSSIAN:
        return CopulaSpec(family, math.sin(math.pi * tau / 2.0))
    if family is CopulaFamily.FGM:
        return CopulaSpec(family, min(1.0, max(-1.0, 4.5 * tau)))
    if family is CopulaFamily.CLAYTON:
        return CopulaSpec(family, 2.0 * tau / (1.0 - tau))
    if family is CopulaFamily.GUMBEL:
        return CopulaSpec(family, 1.0 / (1.0 - tau))
    return CopulaSpec(family, _frank_alpha(tau))


def _frank_alpha(tau: float) -> float:
    # Frank's tau is odd in alpha: solve for |tau| and restore the sign.
    target = abs(tau)
    hi = 1.0
    while _frank_tau(hi) < target:
        hi *= 2.0
        if hi > 1e6:
            raise AttainabilityError(f"Kendall's tau={tau} too close to 1 for the Frank copula")
    root = optimize.brentq(lambda a: _frank_tau(a) - target, 1e-12, hi, xtol=1e-14, rtol=1e-15, maxiter=200)
    return math.copysign(root, tau)
