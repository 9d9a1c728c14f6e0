"""Approximate design measures and the D-criterion machinery built on them.

Includes the sensitivity function ``d(x, xi) = tr(M(xi)^-1 m(x))``, the
equivalence-theorem certificate (``max_x d(x, xi) <= k + l``), D-efficiency
and the Frechet/Gateaux directional derivatives of ``log det``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .errors import DesignValidationError, SingularDesignError
from .fim import QuadratureRule, candidate_fim, design_fim, elementary_fim, log_det

WEIGHT_SUM_TOL = 1e-12
DEFAULT_GRID = 1001
DEFAULT_TOL_CERT = 1e-3
DEFAULT_PRUNE_W = 1e-4


@dataclass
class DesignMeasure:
    """Finite design: support ``points`` with positive ``weights`` summing to one."""

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        self.points = np.atleast_1d(np.asarray(self.points, dtype=float)).copy()
        self.weights = np.atleast_1d(np.asarray(self.weights, dtype=float)).copy()
        if self.points.ndim != 1 or self.points.shape != self.weights.shape:
            raise DesignValidationError("points and weights must be 1-d arrays of equal length")
        if self.points.size == 0:
            raise DesignValidationError("a design needs at least one support point")
        if not (np.all(np.isfinite(self.points)) and np.all(np.isfinite(self.weights))):
            raise DesignValidationError("design entries must be finite")
        if np.any(self.weights <= 0):
            raise DesignValidationError("design weights must be strictly positive")
        total = float(self.weights.sum())
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise DesignValidationError(f"design weights sum to {total!r}, not 1")
        self.points.flags.writeable = False
        self.weights.flags.writeable = False

    @classmethod
    def from_unnormalized(cls, points, weights) -> "DesignMeasure":
        w = np.asarray(weights, dtype=float)
        return cls(points, w / w.sum())

    @classmethod
    def single(cls, x: float) -> "DesignMeasure":
        return cls([x], [1.0])

    def __len__(self):
        return self.points.size

    def check_space(self, space) -> "DesignMeasure":
        a, b = space
        if np.any(self.points < a) or np.any(self.points > b):
            raise DesignValidationError(f"design points must lie in [{a}, {b}]")
        return self

    def is_canonical(self) -> bool:
        return bool(np.all(np.diff(self.points) > 0))

    def to_dict(self) -> dict:
        return {"points": self.points.tolist(), "weights": self.weights.tolist()}

    def __repr__(self):
        pts = ", ".join(f"{p:.4g}" for p in self.points)
        ws = ", ".join(f"{w:.4g}" for w in self.weights)
        return f"DesignMeasure(points=[{pts}], weights=[{ws}])"


def default_merge_tol(space) -> float:
    return 1e-3 * (space[1] - space[0])


def canonicalize(design: DesignMeasure, merge_tol_x: float, prune_tol_w: float = DEFAULT_PRUNE_W):
    """Sort, merge points closer than ``merge_tol_x``, drop weights below ``prune_tol_w``.

    Merged points sit at the weight-averaged location of their cluster.
    """
    order = np.argsort(design.points, kind="stable")
    pts = design.points[order]
    ws = design.weights[order]
    merged_p, merged_w = [], []
    start = 0
    for i in range(1, pts.size + 1):
        if i == pts.size or pts[i] - pts[i - 1] > merge_tol_x:
            w = ws[start:i].sum()
            merged_p.append(float(np.dot(pts[start:i], ws[start:i]) / w))
            merged_w.append(float(w))
            start = i
    merged_p = np.array(merged_p)
    merged_w = np.array(merged_w)
    keep = merged_w >= prune_tol_w
    if not np.any(keep):
        raise DesignValidationError("every support point fell below the pruning threshold")
    return DesignMeasure.from_unnormalized(merged_p[keep], merged_w[keep])


def _factor(m: np.ndarray):
    if not math.isfinite(log_det(m)):
        raise SingularDesignError("information matrix of the design is singular")
    return linalg.cho_factor(0.5 * (m + m.T), lower=True)


def sensitivity_from_matrices(M: np.ndarray, ms: np.ndarray) -> np.ndarray:
    """``tr(M^-1 m_i)`` for a stack ``ms`` of shape ``(n, p, p)``, via Cholesky solves."""
    fac = _factor(M)
    n, p, _ = ms.shape
    sol = linalg.cho_solve(fac, np.transpose(ms, (1, 0, 2)).reshape(p, n * p))
    sol = sol.reshape(p, n, p)
    return np.einsum("ini->n", sol)


def sensitivity(x, design: DesignMeasure, problem, params=None, quad: QuadratureRule | None = None):
    """Sensitivity function ``d(x, xi) = tr(M(xi)^-1 m(x))``; vectorised over ``x``."""
    M = design_fim(design, problem, params, quad)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    d = sensitivity_from_matrices(M, elementary_fim(problem, xs, params, quad))
    return float(d[0]) if np.ndim(x) == 0 else d


@dataclass
class CertificationReport:
    max_sensitivity: float
    argmax_x: float
    bound: int
    certified: bool
    tol_cert: float
    profile: list[tuple[float, float]] = field(default_factory=list)
    reason: str = ""

    @property
    def gap(self) -> float:
        return self.max_sensitivity / self.bound - 1.0

    def summary(self) -> str:
        verdict = "CERTIFIED D-optimal" if self.certified else "NOT certified"
        if not math.isfinite(self.max_sensitivity):
            return f"{verdict}: {self.reason}"
        text = (
            f"{verdict}: max d(x) = {self.max_sensitivity:.6f} at x = {self.argmax_x:.6g}, "
            f"bound k+l = {self.bound} (tol {self.tol_cert:g})"
        )
        return f"{text}; {self.reason}" if self.reason else text


def certify(
    design: DesignMeasure,
    problem,
    params=None,
    grid_size: int = DEFAULT_GRID,
    tol_cert: float = DEFAULT_TOL_CERT,
    quad: QuadratureRule | None = None,
) -> CertificationReport:
    """Check ``max_x d(x, xi) <= (k + l)(1 + tol_cert)`` on a grid plus the support.

    Grid points whose information is undefined (a cell probability below the
    floor) are left out of the maximum.
    """
    if grid_size < 101:
        raise ValueError("certification grid needs at least 101 points")
    p = problem.n_params if params is None else params.dimension
    a, b = problem.design_space
    xs = np.union1d(np.linspace(a, b, int(grid_size)), design.points)
    try:
        M = design_fim(design, problem, params, quad)
        ms, valid = candidate_fim(problem, xs, params, quad)
        d = sensitivity_from_matrices(M, ms)
    except SingularDesignError as exc:
        return CertificationReport(math.inf, math.nan, p, False, tol_cert, [], reason=str(exc))
    xs = xs[valid]
    i = int(np.argmax(d))
    ok = bool(d[i] <= p * (1.0 + tol_cert))
    return CertificationReport(
        float(d[i]), float(xs[i]), p, ok, tol_cert, list(zip(xs.tolist(), d.tolist()))
    )


def d_efficiency(xi: DesignMeasure, xi_prime: DesignMeasure, problem, params=None, quad=None) -> float:
    """``(|M(xi)| / |M(xi')|)^(1/p)``."""
    p = problem.n_params if params is None else params.dimension
    den = log_det(design_fim(xi_prime, problem, params, quad))
    if not math.isfinite(den):
        raise SingularDesignError("reference design xi' is singular")
    num = log_det(design_fim(xi, problem, params, quad))
    if not math.isfinite(num):
        return 0.0
    return math.exp((num - den) / p)


def efficiency_loss_percent(efficiency: float) -> float:
    return 100.0 * (1.0 - efficiency)


def gateaux_d(M1, M2) -> float:
    """Gateaux derivative of ``log det`` at ``M1`` in direction ``M2``: ``tr(M2 M1^-1)``."""
    M1 = np.asarray(M1, dtype=float)
    try:
        return float(np.trace(np.linalg.solve(M1, np.asarray(M2, dtype=float))))
    except np.linalg.LinAlgError:
        raise SingularDesignError("M1 is singular") from None


def frechet_d(M1, M2) -> float:
    """Frechet derivative of ``log det`` at ``M1`` towards ``M2``: ``tr(M2 M1^-1) - p``."""
    return gateaux_d(M1, M2) - np.asarray(M1).shape[0]
