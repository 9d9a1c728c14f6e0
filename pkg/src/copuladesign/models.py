"""Marginal regression models and their coupling through a copula.

Two problem classes are provided:

* :class:`GaussianMarginProblem` -- two responses with unit-variance normal
  margins around polynomial trends, joined by a copula.
* :class:`BinaryLogisticProblem` -- two binary responses with logistic
  margins, whose joint cell probabilities come from the copula.

Parameter vectors are ordered as (trend block 1, trend block 2, alpha).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import expit

from . import copula as cop
from .copula import CopulaSpec
from .errors import InternalConsistencyError, ParameterDomainError

PROB_CLAMP = 1e-12
_FRECHET_TOL = 1e-10


@dataclass(frozen=True)
class PolynomialTrend:
    """Trend ``eta(x, beta) = sum_j beta_j * x**powers[j]``; linear in beta."""

    powers: tuple[int, ...]
    names: tuple[str, ...] = ()

    def __post_init__(self):
        powers = tuple(int(p) for p in self.powers)
        if not powers:
            raise ParameterDomainError("a trend needs at least one basis function")
        if any(p < 0 for p in powers):
            raise ParameterDomainError("basis powers must be non-negative")
        object.__setattr__(self, "powers", powers)
        if not self.names:
            object.__setattr__(self, "names", tuple(f"x^{p}" for p in powers))

    @property
    def dimension(self) -> int:
        return len(self.powers)


# The two-response polynomial example: E[Y1] = b0 + b1 x + b2 x^2,
# E[Y2] = b3 x + b4 x^3 + b5 x^4 on [0, 1].
FEDOROV_TREND1 = PolynomialTrend((0, 1, 2))
FEDOROV_TREND2 = PolynomialTrend((1, 3, 4))


def trend_gradient(trend: PolynomialTrend, x):
    """Basis vector ``d eta / d beta`` at ``x`` (shape ``(..., dim)``)."""
    x = np.asarray(x, dtype=float)
    return np.stack([x**p for p in trend.powers], axis=-1)


def eval_trend(trend: PolynomialTrend, x, beta):
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (trend.dimension,):
        raise ParameterDomainError(
            f"trend has {trend.dimension} coefficients, got beta of shape {beta.shape}"
        )
    out = trend_gradient(trend, x) @ beta
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class LocalParameters:
    """Localisation point: trend parameters ``beta`` and copula parameters ``alpha``.

    ``alpha`` is empty when the copula parameter is not estimated.
    """

    beta: tuple[float, ...]
    alpha: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "beta", tuple(float(b) for b in self.beta))
        object.__setattr__(self, "alpha", tuple(float(a) for a in self.alpha))
        if len(self.alpha) > 1:
            raise ParameterDomainError("bivariate copulas here carry at most one parameter")

    @property
    def k(self) -> int:
        return len(self.beta)

    @property
    def l(self) -> int:  # noqa: E743
        return len(self.alpha)

    @property
    def dimension(self) -> int:
        return self.k + self.l

    def as_vector(self) -> np.ndarray:
        return np.array(self.beta + self.alpha, dtype=float)


def _validate_space(space):
    a, b = (float(v) for v in space)
    if not a < b:
        raise ParameterDomainError(f"design space [{a}, {b}] must have a < b")
    return (a, b)


def _validate_estimate_alpha(copula: CopulaSpec, estimate_alpha: bool) -> bool:
    if estimate_alpha and copula.n_params == 0:
        # Nothing to estimate for the product copula.
        return False
    return bool(estimate_alpha)


@dataclass(frozen=True)
class GaussianMarginProblem:
    """Two normal responses ``Y_i = eta_i(x, beta) + e_i``, ``e_i ~ N(0, 1)``,
    dependent through ``copula``.
    """

    trend1: PolynomialTrend = FEDOROV_TREND1
    trend2: PolynomialTrend = FEDOROV_TREND2
    copula: CopulaSpec = field(default_factory=lambda: CopulaSpec("product"))
    design_space: tuple[float, float] = (0.0, 1.0)
    estimate_alpha: bool = True
    beta: tuple[float, ...] | None = None

    kind = "continuous-linear"

    def __post_init__(self):
        object.__setattr__(self, "design_space", _validate_space(self.design_space))
        object.__setattr__(
            self, "estimate_alpha", _validate_estimate_alpha(self.copula, self.estimate_alpha)
        )
        k = self.trend1.dimension + self.trend2.dimension
        beta = (1.0,) * k if self.beta is None else tuple(float(b) for b in self.beta)
        if len(beta) != k:
            raise ParameterDomainError(f"expected {k} trend parameters, got {len(beta)}")
        object.__setattr__(self, "beta", beta)

    @property
    def k(self) -> int:
        return self.trend1.dimension + self.trend2.dimension

    @property
    def l(self) -> int:  # noqa: E743
        return 1 if self.estimate_alpha else 0

    @property
    def n_params(self) -> int:
        return self.k + self.l

    @property
    def params(self) -> LocalParameters:
        alpha = (self.copula.alpha,) if self.estimate_alpha else ()
        return LocalParameters(self.beta, alpha)

    def with_copula(self, copula: CopulaSpec, estimate_alpha: bool | None = None):
        est = self.estimate_alpha if estimate_alpha is None else estimate_alpha
        return replace(self, copula=copula, estimate_alpha=est)

    def with_params(self, params: LocalParameters):
        """Relocalise at ``params`` (alpha only replaced when estimated)."""
        copula = self.copula
        if params.l:
            copula = copula.with_alpha(params.alpha[0])
        return replace(self, beta=params.beta, copula=copula)

    def means(self, x):
        b1 = self.beta[: self.trend1.dimension]
        b2 = self.beta[self.trend1.dimension :]
        return eval_trend(self.trend1, x, b1), eval_trend(self.trend2, x, b2)

    def joint_log_density(self, y1, y2, x):
        """Log of ``phi(z1) phi(z2) c(Phi(z1), Phi(z2))`` with ``z_i = y_i - eta_i``."""
        from scipy.special import ndtr

        m1, m2 = self.means(x)
        z1 = np.asarray(y1, dtype=float) - m1
        z2 = np.asarray(y2, dtype=float) - m2
        base = -0.5 * (z1 * z1 + z2 * z2) - np.log(2.0 * np.pi)
        return base + cop.log_pdf(self.copula, ndtr(z1), ndtr(z2))


@dataclass(frozen=True)
class CellProbabilities:
    p11: float
    p10: float
    p01: float
    p00: float

    def as_array(self) -> np.ndarray:
        return np.array([self.p11, self.p10, self.p01, self.p00])


@dataclass(frozen=True)
class BinaryLogisticProblem:
    """Two binary responses with ``logit(pi_i) = b_i0 + b_i1 x`` joined by ``copula``.

    Defaults reproduce the clinical-style example: ``beta1 = (-1, 1)``,
    ``beta2 = (-2, 0.5)`` on ``x in [0, 10]``.
    """

    beta1: tuple[float, float] = (-1.0, 1.0)
    beta2: tuple[float, float] = (-2.0, 0.5)
    copula: CopulaSpec = field(default_factory=lambda: CopulaSpec("product"))
    design_space: tuple[float, float] = (0.0, 10.0)
    estimate_alpha: bool = True

    kind = "binary-logistic"

    def __post_init__(self):
        object.__setattr__(self, "design_space", _validate_space(self.design_space))
        b1 = tuple(float(b) for b in self.beta1)
        b2 = tuple(float(b) for b in self.beta2)
        if len(b1) != 2 or len(b2) != 2:
            raise ParameterDomainError("each logistic margin takes (intercept, slope)")
        object.__setattr__(self, "beta1", b1)
        object.__setattr__(self, "beta2", b2)
        object.__setattr__(
            self, "estimate_alpha", _validate_estimate_alpha(self.copula, self.estimate_alpha)
        )

    k = 4

    @property
    def l(self) -> int:  # noqa: E743
        return 1 if self.estimate_alpha else 0

    @property
    def n_params(self) -> int:
        return self.k + self.l

    @property
    def params(self) -> LocalParameters:
        alpha = (self.copula.alpha,) if self.estimate_alpha else ()
        return LocalParameters(self.beta1 + self.beta2, alpha)

    def with_copula(self, copula: CopulaSpec, estimate_alpha: bool | None = None):
        est = self.estimate_alpha if estimate_alpha is None else estimate_alpha
        return replace(self, copula=copula, estimate_alpha=est)

    def with_params(self, params: LocalParameters):
        copula = self.copula
        if params.l:
            copula = copula.with_alpha(params.alpha[0])
        b = params.beta
        return replace(self, beta1=b[:2], beta2=b[2:4], copula=copula)


def marginal_prob(problem: BinaryLogisticProblem, x, margin_index: int):
    """Success probability ``pi_i(x)`` of margin 1 or 2."""
    if margin_index not in (1, 2):
        raise ParameterDomainError("margin_index must be 1 or 2")
    b0, b1 = problem.beta1 if margin_index == 1 else problem.beta2
    out = expit(b0 + b1 * np.asarray(x, dtype=float))
    return float(out) if np.ndim(out) == 0 else out


# families with u - C_a(u, 1 - v) = C_{-a}(u, v): every cell is a copula value
_REFLECTION_CLOSED = frozenset(
    {cop.CopulaFamily.PRODUCT, cop.CopulaFamily.FGM, cop.CopulaFamily.GAUSSIAN, cop.CopulaFamily.FRANK}
)


def reflected_copula(spec: CopulaSpec) -> CopulaSpec | None:
    """Copula of ``(U1, 1 - U2)`` when it stays in the family, else ``None``."""
    if spec.family not in _REFLECTION_CLOSED:
        return None
    return spec if spec.family is cop.CopulaFamily.PRODUCT else spec.with_alpha(-spec.alpha)


def margins(problem: BinaryLogisticProblem, x):
    """``(pi1, 1 - pi1, pi2, 1 - pi2)`` with each complement computed without cancellation."""
    x = np.asarray(x, dtype=float)
    out = []
    for b0, b1 in (problem.beta1, problem.beta2):
        eta = b0 + b1 * x
        out += [expit(eta), expit(-eta)]
    return tuple(out)


def cell_probs_raw(problem: BinaryLogisticProblem, x):
    """``(p11, p10, p01, p00)`` as arrays, unclamped; last axis indexes the cell.

    For reflection-closed families each cell is evaluated as a copula value at
    ``(pi or 1 - pi)``, so tiny cells keep their relative accuracy; otherwise the
    off-diagonal cells come from differences.
    """
    pi1, q1, pi2, q2 = margins(problem, x)
    spec = problem.copula
    p11 = np.asarray(cop.cdf(spec, pi1, pi2))
    lower = np.maximum(pi1 + pi2 - 1.0, 0.0)
    upper = np.minimum(pi1, pi2)
    if np.any(p11 < lower - _FRECHET_TOL) or np.any(p11 > upper + _FRECHET_TOL):
        raise InternalConsistencyError(
            f"p11 violates the Frechet bounds for {problem.copula} (copula bug)"
        )
    p11 = np.clip(p11, lower, upper)
    refl = reflected_copula(spec)
    if refl is None:
        return np.stack([p11, pi1 - p11, pi2 - p11, 1.0 - pi1 - pi2 + p11], axis=-1)
    p10 = np.asarray(cop.cdf(refl, pi1, q2))
    p01 = np.asarray(cop.cdf(refl, q1, pi2))
    p00 = np.asarray(cop.cdf(spec, q1, q2))
    return np.stack([p11, p10, p01, p00], axis=-1)


def cell_probs(problem: BinaryLogisticProblem, x) -> CellProbabilities:
    """Cell probabilities at a single ``x``, clamped to ``[PROB_CLAMP, 1 - PROB_CLAMP]``."""
    p = np.clip(cell_probs_raw(problem, float(x)), PROB_CLAMP, 1.0 - PROB_CLAMP)
    return CellProbabilities(*(float(v) for v in p))
