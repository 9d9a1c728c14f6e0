"""Fisher information matrices for single observations and for designs.

Continuous (normal-margin) model
--------------------------------
For ``Y_i = eta_i(x, beta) + e_i`` with standard normal margins joined by a
copula, the joint log density of the errors ``z = y - eta`` does not depend
on ``x``. The score of ``beta`` is ``-d log f / dz_i`` times the trend
gradient, so the elementary information is

    m(x) = G(x)^T I G(x)            (beta block)
    m_ba(x) = G(x)^T J,  m_aa = K   (alpha blocks)

with ``I = E[grad_z log f grad_z log f^T]``, ``J = -E[grad_z log f * d_alpha log c]``
and ``K = E[(d_alpha log c)^2]``. These moments are integrals over the copula
distribution; they are evaluated on a tensor Gauss-Hermite rule in normal
scores after the Rosenblatt transform ``(u1, v) -> (u1, C^{-1}(v | u1))``,
which maps independent uniforms onto the copula. This removes the density
weight (and its ridge along the diagonal for strong dependence) from the
integrand.

Binary model
------------
Uses the closed form ``(dp/dtheta)^T (P^-1 + e e^T / p00) (dp/dtheta)`` for the
three free cells ``p = (p11, p10, p01)``. :func:`binary_fim_oracle` recomputes
the same matrix by brute force over the four outcomes with finite-difference
scores, independently of the closed form.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.hermite_e import hermegauss
from scipy.special import ndtr, ndtri

from . import copula as cop
from .copula import CopulaFamily, CopulaSpec
from .errors import DegenerateInformationError, ParameterDomainError, QuadratureError
from .models import (
    PROB_CLAMP,
    BinaryLogisticProblem,
    GaussianMarginProblem,
    LocalParameters,
    cell_probs_raw,
    margins,
    reflected_copula,
    trend_gradient,
)

DEFAULT_QUAD_ORDER = 64
_Z_CUTOFF = 7.5  # normal scores beyond this carry < 4e-14 of mass
_SING_RTOL = 1e-13
_ORACLE_REL_STEP = 1e-6


@dataclass(frozen=True)
class QuadratureRule:
    """One-dimensional rule on (0, 1), tensorised to the unit square.

    ``kind="normal"`` maps probabilists' Gauss-Hermite nodes through the
    normal CDF (exact for polynomials in normal scores), dropping nodes beyond
    ``|z| = 7.5``; ``kind="legendre"``
    is Gauss-Legendre on (0, 1). Both have positive weights summing to 1.
    """

    order: int = DEFAULT_QUAD_ORDER
    kind: str = "normal"

    def __post_init__(self):
        if int(self.order) < 1:
            raise ParameterDomainError("quadrature order must be positive")
        object.__setattr__(self, "order", int(self.order))
        if self.kind not in ("normal", "legendre"):
            raise ParameterDomainError(f"unknown quadrature kind {self.kind!r}")

    @functools.cached_property
    def _rule(self):
        if self.kind == "normal":
            z, w = hermegauss(self.order)
            w = w / w.sum()
            # far-tail nodes round to u in {0, 1}; their mass is negligible
            keep = np.abs(z) <= _Z_CUTOFF
            z, w = z[keep], w[keep]
            return ndtr(z), w / w.sum(), z
        x, w = np.polynomial.legendre.leggauss(self.order)
        u = 0.5 * (x + 1.0)
        return u, 0.5 * w, ndtri(u)

    @property
    def nodes(self) -> np.ndarray:
        return self._rule[0]

    @property
    def weights(self) -> np.ndarray:
        return self._rule[1]

    @property
    def scores(self) -> np.ndarray:
        """Normal scores ``Phi^{-1}(nodes)``."""
        return self._rule[2]

    def tensor(self):
        """``(u1, u2, w)`` flattened over the tensor grid."""
        u1, u2 = np.meshgrid(self.nodes, self.nodes, indexing="ij")
        return u1.ravel(), u2.ravel(), np.outer(self.weights, self.weights).ravel()

    def integrate_unit_square(self, fn) -> float:
        """Approximate ``int_(0,1)^2 fn(u1, u2) du1 du2``."""
        u1, u2, w = self.tensor()
        return float(np.sum(w * fn(u1, u2)))


@dataclass(frozen=True)
class ScoreMoments:
    """x-independent moments that determine the continuous elementary information."""

    location: np.ndarray  # I, 2x2
    cross: np.ndarray  # J, length 2
    alpha: float  # K


def _rosenblatt_nodes(spec: CopulaSpec, quad: QuadratureRule):
    z, w = hermegauss(quad.order)
    w = w / w.sum()
    keep = np.abs(z) <= _Z_CUTOFF
    z, w = z[keep], w[keep]
    z1, zv = (a.ravel() for a in np.meshgrid(z, z, indexing="ij"))
    weight = np.outer(w, w).ravel()
    fam = spec.family
    if fam is CopulaFamily.PRODUCT:
        z2 = zv.copy()
    elif fam is CopulaFamily.GAUSSIAN:
        a = spec.alpha
        z2 = a * z1 + math.sqrt(1.0 - a * a) * zv
    else:
        u2 = cop.conditional_quantile(spec, ndtr(zv), ndtr(z1))
        u2 = np.clip(u2, np.finfo(float).tiny, 1.0 - np.finfo(float).epsneg)
        z2 = ndtri(u2)
    return z1, z2, zv, weight


@functools.lru_cache(maxsize=256)
def score_moments(spec: CopulaSpec, quad: QuadratureRule, with_alpha: bool) -> ScoreMoments:
    """Moments ``I``, ``J``, ``K`` of the normal-margin scores under ``spec``."""
    if quad.order < 16:
        raise ParameterDomainError("continuous information needs quadrature order >= 16")
    z1, z2, zv, weight = _rosenblatt_nodes(spec, quad)
    u1 = np.clip(ndtr(z1), np.finfo(float).tiny, 1.0 - np.finfo(float).epsneg)
    u2 = np.clip(ndtr(z2), np.finfo(float).tiny, 1.0 - np.finfo(float).epsneg)
    phi1 = np.exp(-0.5 * z1 * z1) / math.sqrt(2.0 * math.pi)
    phi2 = np.exp(-0.5 * z2 * z2) / math.sqrt(2.0 * math.pi)
    if spec.family is CopulaFamily.GAUSSIAN:
        # exact normal-score form avoids the division by phi at extreme nodes
        a = spec.alpha
        d1 = -(z1 - a * z2) / (1.0 - a * a)
        d2 = -(z2 - a * z1) / (1.0 - a * a)
    else:
        d1 = -z1 + phi1 * np.asarray(cop.dlog_pdf_du1(spec, u1, u2))
        d2 = -z2 + phi2 * np.asarray(cop.dlog_pdf_du2(spec, u1, u2))
    cols = [d1, d2]
    if with_alpha:
        cols.append(np.asarray(cop.dlog_pdf_dalpha(spec, u1, u2)))
    scores = np.stack(cols, axis=-1)
    bad = ~np.all(np.isfinite(scores), axis=-1)
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        raise QuadratureError(
            f"non-finite score for {spec} at normal scores (z1={z1[i]:.6g}, v={zv[i]:.6g})",
            node=(float(z1[i]), float(zv[i])),
        )
    moment = (scores * weight[:, None]).T @ scores
    cross = -moment[:2, 2] if with_alpha else np.zeros(2)
    alpha = float(moment[2, 2]) if with_alpha else 0.0
    return ScoreMoments(moment[:2, :2].copy(), cross.copy(), alpha)


def _resolve(problem, params):
    return problem if params is None else problem.with_params(params)


def elementary_fim_continuous(
    problem: GaussianMarginProblem,
    x,
    params: LocalParameters | None = None,
    quad: QuadratureRule | None = None,
) -> np.ndarray:
    """Single-observation information of the normal-margin copula model.

    ``x`` may be a scalar (returns ``(p, p)``) or a 1-d array (``(n, p, p)``).
    """
    problem = _resolve(problem, params)
    quad = quad or QuadratureRule()
    mom = score_moments(problem.copula, quad, problem.estimate_alpha)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    g1 = trend_gradient(problem.trend1, xs)
    g2 = trend_gradient(problem.trend2, xs)
    k1, k2 = g1.shape[1], g2.shape[1]
    p = problem.n_params
    out = np.zeros((xs.size, p, p))
    i = mom.location
    out[:, :k1, :k1] = i[0, 0] * g1[:, :, None] * g1[:, None, :]
    out[:, :k1, k1 : k1 + k2] = i[0, 1] * g1[:, :, None] * g2[:, None, :]
    out[:, k1 : k1 + k2, :k1] = i[1, 0] * g2[:, :, None] * g1[:, None, :]
    out[:, k1 : k1 + k2, k1 : k1 + k2] = i[1, 1] * g2[:, :, None] * g2[:, None, :]
    if problem.estimate_alpha:
        out[:, :k1, -1] = out[:, -1, :k1] = mom.cross[0] * g1
        out[:, k1 : k1 + k2, -1] = out[:, -1, k1 : k1 + k2] = mom.cross[1] * g2
        out[:, -1, -1] = mom.alpha
    return out[0] if np.ndim(x) == 0 else out


def _probability_jacobian(problem: BinaryLogisticProblem, xs: np.ndarray):
    """Cells ``(n, 4)`` and their gradients ``dp/dtheta`` of shape ``(n, 4, p)``."""
    cells = cell_probs_raw(problem, xs)
    low = np.any(cells < PROB_CLAMP, axis=-1)
    if np.any(low):
        bad = float(xs[np.flatnonzero(low)[0]])
        raise DegenerateInformationError(
            f"cell probability below {PROB_CLAMP:g} at x={bad:.6g} under {problem.copula}", x=bad
        )
    spec = problem.copula
    pi1, q1, pi2, q2 = margins(problem, xs)
    basis = np.stack([np.ones_like(xs), xs], axis=-1)
    dpi1 = (pi1 * q1)[:, None] * basis
    dpi2 = (pi2 * q2)[:, None] * basis
    refl = reflected_copula(spec)

    def grads(s, u1, u2):
        out = [np.asarray(cop.partial_u1(s, u1, u2)), np.asarray(cop.partial_u2(s, u1, u2))]
        if problem.estimate_alpha:
            out.append(np.asarray(cop.partial_alpha(s, u1, u2)))
        return out

    # rows: d cell / d pi1, d cell / d pi2, d cell / d alpha
    if refl is None:
        c1, c2, *ca = grads(spec, pi1, pi2)
        rows = [(c1, c2, ca), (1.0 - c1, -c2, [-v for v in ca]),
                (-c1, 1.0 - c2, [-v for v in ca]), (c1 - 1.0, c2 - 1.0, ca)]
    else:
        # p10 = C_r(pi1, 1 - pi2), p01 = C_r(1 - pi1, pi2), p00 = C(1 - pi1, 1 - pi2);
        # d/dalpha of C_{-alpha} is minus the family derivative at -alpha
        c1, c2, *ca = grads(spec, pi1, pi2)
        a1, a2, *aa = grads(refl, pi1, q2)
        b1, b2, *ba = grads(refl, q1, pi2)
        d1, d2, *da = grads(spec, q1, q2)
        rows = [(c1, c2, ca), (a1, -a2, [-v for v in aa]),
                (-b1, b2, [-v for v in ba]), (-d1, -d2, da)]
    jac = np.zeros((xs.size, 4, problem.n_params))
    for c, (g1, g2, ga) in enumerate(rows):
        jac[:, c, 0:2] = g1[:, None] * dpi1
        jac[:, c, 2:4] = g2[:, None] * dpi2
        if ga:
            jac[:, c, 4] = ga[0]
    return cells, jac


def elementary_fim_binary(
    problem: BinaryLogisticProblem, x, params: LocalParameters | None = None
) -> np.ndarray:
    """Single-observation information of the bivariate binary copula model.

    Computed as ``sum_c dp_c dp_c^T / p_c`` over the four cells, which equals the
    multinomial form ``J^T (P^-1 + e e^T / p00) J`` but never forms ``dp00`` by
    cancellation. Parameter order is ``(b10, b11, b20, b21[, alpha])``. Vectorised over ``x``.
    """
    problem = _resolve(problem, params)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    cells, jac = _probability_jacobian(problem, xs)
    out = np.einsum("ncp,nc,ncq->npq", jac, 1.0 / cells, jac)
    out = 0.5 * (out + np.swapaxes(out, 1, 2))
    return out[0] if np.ndim(x) == 0 else out


def binary_fim_oracle(
    problem: BinaryLogisticProblem, x: float, params: LocalParameters | None = None
) -> np.ndarray:
    """Brute-force information: ``sum_cells p * s s^T`` with finite-difference scores.

    Intended for verification only; it never touches the closed form.
    """
    problem = _resolve(problem, params)
    theta = problem.params.as_vector()
    p = theta.size

    def log_cells(th):
        cells = cell_probs_raw(problem.with_params(_split(problem, th)), np.array([float(x)]))[0]
        if np.any(cells < PROB_CLAMP):
            raise DegenerateInformationError(f"degenerate cell at x={x}", x=float(x))
        return np.log(cells)

    grads = np.zeros((4, p))
    for j in range(p):
        h = _ORACLE_REL_STEP * max(1.0, abs(theta[j]))
        up, dn = theta.copy(), theta.copy()
        up[j] += h
        dn[j] -= h
        grads[:, j] = (log_cells(up) - log_cells(dn)) / (2.0 * h)
    probs = np.exp(log_cells(theta))
    return np.einsum("c,ci,cj->ij", probs, grads, grads)


def _split(problem, theta) -> LocalParameters:
    return LocalParameters(tuple(theta[: problem.k]), tuple(theta[problem.k :]))


def elementary_fim(problem, x, params=None, quad: QuadratureRule | None = None) -> np.ndarray:
    """Dispatch to the elementary information of either problem class."""
    if isinstance(problem, BinaryLogisticProblem):
        return elementary_fim_binary(problem, x, params)
    if isinstance(problem, GaussianMarginProblem):
        return elementary_fim_continuous(problem, x, params, quad)
    raise TypeError(f"unsupported problem type {type(problem).__name__}")


def candidate_fim(problem, xs, params=None, quad: QuadratureRule | None = None):
    """Elementary information on candidate points, skipping degenerate ones.

    Returns ``(ms, valid)`` where ``valid`` masks the points whose cells stay
    above the probability floor; ``ms`` holds only the valid points.
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    try:
        return elementary_fim(problem, xs, params, quad), np.ones(xs.size, dtype=bool)
    except DegenerateInformationError:
        pass
    cells = cell_probs_raw(_resolve(problem, params), xs)
    valid = np.all(cells >= PROB_CLAMP, axis=-1)
    if not np.any(valid):
        raise DegenerateInformationError("every candidate point has a degenerate cell", x=float(xs[0]))
    return elementary_fim(problem, xs[valid], params, quad), valid


def design_fim(design, problem, params=None, quad: QuadratureRule | None = None) -> np.ndarray:
    """``M(xi) = sum_i w_i m(x_i)``."""
    ms = elementary_fim(problem, np.asarray(design.points, dtype=float), params, quad)
    return np.einsum("i,ipq->pq", np.asarray(design.weights, dtype=float), ms)


def log_det(matrix) -> float:
    """``log det M`` for symmetric PSD ``M``; ``-inf`` when numerically singular."""
    m = np.asarray(matrix, dtype=float)
    m = 0.5 * (m + m.T)
    if m.size == 0:
        return 0.0
    # Symmetric equilibration keeps badly scaled parameters from masking rank.
    d = np.sqrt(np.abs(np.diag(m)))
    if np.any(d == 0.0):
        return -math.inf
    eig = np.linalg.eigvalsh(m / np.outer(d, d))
    if eig[0] <= _SING_RTOL * eig[-1]:
        return -math.inf
    return float(np.sum(np.log(eig)) + 2.0 * np.sum(np.log(d)))


def is_symmetric_psd(matrix, sym_tol=1e-10, psd_tol=1e-9) -> bool:
    m = np.asarray(matrix, dtype=float)
    scale = max(1.0, float(np.max(np.abs(m))))
    if np.max(np.abs(m - m.T)) > sym_tol * scale:
        return False
    return bool(np.linalg.eigvalsh(0.5 * (m + m.T))[0] >= -psd_tol * scale)
