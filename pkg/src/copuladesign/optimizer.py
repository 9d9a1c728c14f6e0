"""Fedorov-Wynn search for locally D-optimal designs and the efficiency studies.

The search runs on a fixed candidate grid whose elementary information
matrices are evaluated once. Each iteration adds mass at the maximiser of the
sensitivity function with the exact D-optimal step length, moves mass from
the weakest support point to the maximiser (vertex exchange), and finishes
with a multiplicative reweighting sweep. After the grid search converges,
support points are polished off-grid by bounded scalar maximisation of the
sensitivity function, near-duplicate points are consolidated, and the
weights are re-optimised.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import linalg, optimize

from . import copula as cop
from .design import (
    DEFAULT_GRID,
    DEFAULT_PRUNE_W,
    DEFAULT_TOL_CERT,
    CertificationReport,
    DesignMeasure,
    canonicalize,
    certify,
    d_efficiency,
    default_merge_tol,
    sensitivity_from_matrices,
)
from .errors import CopulaDesignError, InitializationError, ParameterDomainError
from .errors import DegenerateInformationError
from .fim import QuadratureRule, candidate_fim, elementary_fim, log_det

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class OptimizerConfig:
    grid_size: int = DEFAULT_GRID
    max_iters: int = 5000
    eps_bound: float = 1e-4
    refine_iters: int = 5000
    inner_sweeps: int = 1
    polish_rounds: int = 4
    merge_tol_x: float | None = None  # default 1e-3 * (b - a)
    prune_tol_w: float = DEFAULT_PRUNE_W
    tol_cert: float = DEFAULT_TOL_CERT
    cert_grid: int | None = None  # defaults to grid_size
    quad_order: int = 64

    def validate(self, n_params: int) -> "OptimizerConfig":
        if self.grid_size < n_params + 1:
            raise ParameterDomainError(
                f"grid_size={self.grid_size} must be at least k+l+1={n_params + 1}"
            )
        if not self.eps_bound > 0:
            raise ParameterDomainError("eps_bound must be positive")
        if self.max_iters < 1 or self.refine_iters < 0:
            raise ParameterDomainError("iteration limits must be positive")
        return self

    @property
    def quad(self) -> QuadratureRule:
        return QuadratureRule(self.quad_order)


@dataclass(frozen=True)
class TraceRecord:
    iteration: int
    phase: str
    criterion: float
    max_sensitivity: float
    support_size: int


@dataclass
class OptimizationTrace:
    records: list[TraceRecord] = field(default_factory=list)

    def add(self, phase, criterion, max_sens, support):
        self.records.append(TraceRecord(len(self.records), phase, criterion, max_sens, support))

    def criteria(self) -> np.ndarray:
        return np.array([r.criterion for r in self.records])

    def is_monotone(self, slack: float = 1e-10) -> bool:
        c = self.criteria()
        return bool(np.all(np.diff(c) >= -slack))

    def __len__(self):
        return len(self.records)


@dataclass
class OptimizationResult:
    design: DesignMeasure
    trace: OptimizationTrace
    report: CertificationReport
    converged: bool

    def __iter__(self):
        # allows ``design, trace, report = fedorov_wynn(...)``
        return iter((self.design, self.trace, self.report))


def d_step(d_max: float, p: int) -> float:
    """Exact line-search step towards a one-point design for the D-criterion."""
    return (d_max - p) / (p * (d_max - 1.0))


def _initial_weights(ms: np.ndarray, p: int) -> np.ndarray:
    n = ms.shape[0]
    for count in (p + 1, 2 * p, 4 * p, n):
        count = min(count, n)
        idx = np.unique(np.round(np.linspace(0, n - 1, count)).astype(int))
        w = np.zeros(n)
        w[idx] = 1.0 / idx.size
        if math.isfinite(log_det(np.einsum("i,ipq->pq", w, ms))):
            return w
    raise InitializationError("every equispaced initial design is singular for this problem")


def _multiplicative(ms, w, p, sweeps, tol=0.0):
    """In-place D-optimal multiplicative updates ``w_i <- w_i d_i / p`` on ``w > 0``."""
    support = np.flatnonzero(w > 0)
    sub = ms[support]
    ws = w[support]
    for _ in range(sweeps):
        M = np.einsum("i,ipq->pq", ws, sub)
        d = sensitivity_from_matrices(M, sub)
        if tol and np.max(np.abs(d - p)) <= tol * p:
            break
        ws = ws * d / p
        ws /= ws.sum()
    w[support] = ws
    return w


def _exchange(ms, w, p):
    """Vertex-exchange step: move mass from the weakest support point to the argmax of ``d``.

    The transfer ``delta`` maximises ``log det(M + delta (m_i - m_j))`` exactly:
    with ``lam`` the generalised eigenvalues of ``(m_i - m_j, M)`` the
    derivative is ``sum lam / (1 + delta lam)``, decreasing in ``delta``.
    """
    M = np.einsum("i,ipq->pq", w, ms)
    d = sensitivity_from_matrices(M, ms)
    i = int(np.argmax(d))
    support = np.flatnonzero(w > 0)
    j = int(support[np.argmin(d[support])])
    if i == j or d[i] <= d[j]:
        return w
    delta_m = ms[i] - ms[j]
    lam = linalg.eigh(0.5 * (delta_m + delta_m.T), 0.5 * (M + M.T), eigvals_only=True)

    def slope(t):
        return float(np.sum(lam / (1.0 + t * lam)))

    cap = float(w[j])
    if slope(cap) >= 0.0:
        step = cap
    else:
        step = optimize.brentq(slope, 0.0, cap, xtol=1e-15, rtol=1e-12)
    w[j] -= step
    w[i] += step
    if w[j] < 1e-14:
        w[j] = 0.0
    return w


def refine_weights(design: DesignMeasure, problem, params=None, iters: int = 1000, quad=None,
                   tol: float = 1e-12) -> DesignMeasure:
    """Optimise the weights of a fixed support by multiplicative iteration.

    Each step is monotone for the D-criterion and ``d(x_i) = k + l`` at the
    fixed point.
    """
    if len(design) == 1:
        return design
    p = problem.n_params if params is None else params.dimension
    ms = elementary_fim(problem, design.points, params, quad)
    w = _multiplicative(ms, design.weights.copy(), p, iters, tol)
    return DesignMeasure.from_unnormalized(design.points, w)


def _bounded_max(fn, lo, hi, tol):
    res = optimize.minimize_scalar(lambda t: -fn(t), bounds=(lo, hi), method="bounded",
                                   options={"xatol": tol})
    return float(res.x), -float(res.fun)


def fedorov_wynn(problem, params=None, config: OptimizerConfig | None = None) -> OptimizationResult:
    """Locally D-optimal approximate design for ``problem`` on its design interval."""
    config = (config or OptimizerConfig()).validate(
        problem.n_params if params is None else params.dimension
    )
    if params is not None:
        problem = problem.with_params(params)
    p = problem.n_params
    quad = config.quad
    a, b = problem.design_space
    grid = np.linspace(a, b, config.grid_size)
    ms, valid = candidate_fim(problem, grid, None, quad)
    if not np.all(valid):
        log.info("dropped %d degenerate candidate points", int(np.sum(~valid)))
        grid = grid[valid]
    merge_tol = default_merge_tol((a, b)) if config.merge_tol_x is None else config.merge_tol_x

    w = _initial_weights(ms, p)
    trace = OptimizationTrace()
    converged = False
    for _ in range(config.max_iters):
        M = np.einsum("i,ipq->pq", w, ms)
        d = sensitivity_from_matrices(M, ms)
        i = int(np.argmax(d))
        trace.add("exchange", log_det(M), float(d[i]), int(np.count_nonzero(w)))
        if d[i] <= p * (1.0 + config.eps_bound):
            converged = True
            break
        gamma = d_step(float(d[i]), p)
        w *= 1.0 - gamma
        w[i] += gamma
        w = _exchange(ms, w, p)
        w = _multiplicative(ms, w, p, config.inner_sweeps)
        # negligible mass only; real pruning happens after convergence
        w[w < 1e-14] = 0.0
        w /= w.sum()

    support = np.flatnonzero(w > 0)
    design = DesignMeasure.from_unnormalized(grid[support], w[support])
    design = canonicalize(design, merge_tol, config.prune_tol_w)
    design = _polish(design, problem, quad, config, trace)
    design = _consolidate(design, problem, quad, config, trace)

    report = certify(design, problem, None, config.cert_grid or config.grid_size, config.tol_cert, quad)
    if not converged:
        log.warning("Fedorov-Wynn hit max_iters=%d before the bound gap closed", config.max_iters)
        # an unfinished search never counts as certified, even if polishing closed the gap
        report = replace(report, certified=False,
                         reason=f"max_iters={config.max_iters} exhausted before the bound gap closed")
    return OptimizationResult(design, trace, report, converged)


def _polish(design, problem, quad, config, trace):
    """Move support points to local maxima of ``d`` and re-optimise the weights."""
    p = problem.n_params
    a, b = problem.design_space
    h = (b - a) / (config.grid_size - 1)
    merge_tol = default_merge_tol((a, b)) if config.merge_tol_x is None else config.merge_tol_x
    for _ in range(config.polish_rounds):
        design = refine_weights(design, problem, None, config.refine_iters, quad)
        M = _design_matrix(design, problem, quad)
        trace.add("refine", log_det(M), float(np.max(_sens(M, problem, design.points, quad))), len(design))
        moved = []
        for x in design.points:
            lo, hi = max(a, x - 3.0 * h), min(b, x + 3.0 * h)
            x_new, _ = _bounded_max(lambda t: float(_sens(M, problem, np.array([t]), quad)[0]), lo, hi, 1e-10 * (b - a))
            # keep endpoints exactly when the maximum sits there
            for edge in (a, b):
                if abs(x_new - edge) <= 1e-7 * (b - a) and _sens(M, problem, np.array([edge]), quad)[0] >= \
                        _sens(M, problem, np.array([x_new]), quad)[0]:
                    x_new = edge
            moved.append(x_new)
        candidate = DesignMeasure.from_unnormalized(moved, design.weights)
        candidate = refine_weights(candidate, problem, None, config.refine_iters, quad)
        if log_det(_design_matrix(candidate, problem, quad)) >= log_det(M):
            design = canonicalize(candidate, merge_tol, config.prune_tol_w)
    design = refine_weights(design, problem, None, config.refine_iters, quad)
    M = _design_matrix(design, problem, quad)
    trace.add("refine", log_det(M), float(np.max(_sens(M, problem, design.points, quad))), len(design))
    return design


def _design_matrix(design, problem, quad):
    return np.einsum("i,ipq->pq", design.weights, elementary_fim(problem, design.points, None, quad))


def _sens(M, problem, xs, quad):
    try:
        ms = elementary_fim(problem, np.atleast_1d(xs), None, quad)
    except DegenerateInformationError:
        return np.full(np.size(xs), -np.inf)
    return sensitivity_from_matrices(M, ms)


def _joint_optimum(design, problem, quad):
    """Maximise ``log det M`` jointly over support points and log-weights."""
    a, b = problem.design_space
    n = len(design)
    span = b - a

    def unpack(z):
        pts = a + span * np.clip(z[:n], 0.0, 1.0)
        lw = z[n:] - np.max(z[n:])
        w = np.exp(lw)
        return pts, w / w.sum()

    def objective(z):
        pts, w = unpack(z)
        try:
            ms = elementary_fim(problem, pts, None, quad)
        except DegenerateInformationError:
            return 1e300
        val = log_det(np.einsum("i,ipq->pq", w, ms))
        return -val if math.isfinite(val) else 1e300

    z0 = np.concatenate([(design.points - a) / span, np.log(design.weights)])
    bounds = [(0.0, 1.0)] * n + [(-30.0, 30.0)] * n
    # derivative-free: finite-difference gradients break down at active bounds
    res = optimize.minimize(objective, z0, method="Nelder-Mead", bounds=bounds,
                            options={"xatol": 1e-9, "fatol": 1e-14, "maxiter": 400 * n})
    pts, w = unpack(res.x if res.fun <= objective(z0) else z0)
    return DesignMeasure.from_unnormalized(pts, w)


def _consolidate(design, problem, quad, config, trace):
    """Collapse clusters of neighbouring support points when that costs nothing.

    Flat sensitivity near a peak leaves the grid search with several adjacent
    points sharing one peak's mass. Clusters closer than 2% of the design
    interval are merged, then points and weights are re-optimised jointly; the
    merged design is kept only if ``log det`` does not drop.
    """
    a, b = problem.design_space
    base = log_det(_design_matrix(design, problem, quad))
    merged = canonicalize(design, 0.02 * (b - a), config.prune_tol_w)
    if len(merged) == len(design):
        candidate = _joint_optimum(design, problem, quad)
    else:
        candidate = _joint_optimum(merged, problem, quad)
    candidate = refine_weights(candidate, problem, None, config.refine_iters, quad)
    candidate = _snap_edges(candidate, problem, quad)
    value = log_det(_design_matrix(candidate, problem, quad))
    if value >= base - 1e-10 * max(1.0, abs(base)):
        trace.add("consolidate", value, float("nan"), len(candidate))
        return canonicalize(candidate, default_merge_tol((a, b)), config.prune_tol_w)
    return design


def _snap_edges(design, problem, quad):
    """Move support points within 1e-6 of an endpoint onto it if ``log det`` is unchanged."""
    a, b = problem.design_space
    tol = 1e-6 * (b - a)
    pts = design.points.copy()
    pts[np.abs(pts - a) <= tol] = a
    pts[np.abs(pts - b) <= tol] = b
    if np.array_equal(pts, design.points):
        return design
    snapped = DesignMeasure(pts, design.weights)
    before = log_det(_design_matrix(design, problem, quad))
    after = log_det(_design_matrix(snapped, problem, quad))
    return snapped if after >= before - 1e-10 * max(1.0, abs(before)) else design


# ---------------------------------------------------------------------------
# efficiency studies
# ---------------------------------------------------------------------------


@dataclass
class LossRow:
    family: str
    tau: float
    alpha: float | None
    loss_percent: float | None
    status: str
    assumed_family: str = ""
    assumed_alpha: float | None = None
    message: str = ""

    @property
    def ok(self) -> bool:
        return self.status == "ok"


def _row_spec(family, tau, alpha=None):
    if alpha is None:
        return cop.alpha_from_tau(family, tau)
    if not cop.is_attainable(family, tau):
        raise cop.AttainabilityError(f"tau={tau} not attainable by {family}")
    return cop.CopulaSpec(family, alpha)


def ignorance_loss_table(problem_template, copula_rows, benchmark: DesignMeasure,
                         config: OptimizerConfig | None = None, solver=None) -> list[LossRow]:
    """Percent D-efficiency lost by using ``benchmark`` instead of each full-model optimum.

    ``copula_rows`` holds ``(family, tau)`` or ``(family, tau, alpha)`` tuples;
    an explicit alpha overrides the inverse-tau map. Losses are evaluated under
    the full model, which estimates alpha. ``solver(problem, config)`` replaces
    :func:`fedorov_wynn`, e.g. to share cached optima between tables.
    """
    config = config or OptimizerConfig()
    solver = solver or (lambda prob, cfg: fedorov_wynn(prob, None, cfg))
    rows = []
    for entry in copula_rows:
        family, tau = entry[0], float(entry[1])
        alpha = entry[2] if len(entry) > 2 else None
        try:
            spec = _row_spec(family, tau, alpha)
        except cop.AttainabilityError as exc:
            rows.append(LossRow(str(family), tau, None, None, "n.d.", message=str(exc)))
            continue
        try:
            full = problem_template.with_copula(spec, estimate_alpha=True)
            opt = solver(full, config)
            eff = d_efficiency(benchmark, opt.design, full, None, config.quad)
            rows.append(LossRow(spec.family.value, tau, spec.alpha, 100.0 * (1.0 - eff), "ok"))
        except CopulaDesignError as exc:
            rows.append(LossRow(spec.family.value, tau, spec.alpha, None, "error", message=str(exc)))
    return rows


def misspecification_table(problem_template, tau_rows, family_pairs,
                           config: OptimizerConfig | None = None, alphas=None,
                           solver=None) -> list[LossRow]:
    """Percent D-efficiency lost by optimising under an assumed copula when another is true.

    For each ``tau`` and ``(true, assumed)`` pair the loss is
    ``100 (1 - eff_T(xi_A, xi_T))`` with both designs evaluated under the true
    copula's full model. ``alphas`` optionally maps ``(family, tau)`` to alpha.
    """
    config = config or OptimizerConfig()
    solver = solver or (lambda prob, cfg: fedorov_wynn(prob, None, cfg))
    alphas = alphas or {}
    optima: dict = {}

    def optimum(family, tau):
        key = (cop.CopulaFamily.parse(family).value, tau)
        if key not in optima:
            spec = _row_spec(family, tau, alphas.get(key))
            full = problem_template.with_copula(spec, estimate_alpha=True)
            optima[key] = (spec, full, solver(full, config).design)
        return optima[key]

    rows = []
    for tau in tau_rows:
        tau = float(tau)
        for true_fam, assumed_fam in family_pairs:
            t_name = cop.CopulaFamily.parse(true_fam).value
            a_name = cop.CopulaFamily.parse(assumed_fam).value
            try:
                t_spec, t_full, xi_t = optimum(true_fam, tau)
                a_spec, _, xi_a = optimum(assumed_fam, tau)
            except cop.AttainabilityError as exc:
                rows.append(LossRow(t_name, tau, None, None, "n.d.", a_name, message=str(exc)))
                continue
            except CopulaDesignError as exc:
                rows.append(LossRow(t_name, tau, None, None, "error", a_name, message=str(exc)))
                continue
            if t_name == a_name:
                loss = 0.0
            else:
                loss = 100.0 * (1.0 - d_efficiency(xi_a, xi_t, t_full, None, config.quad))
            rows.append(LossRow(t_name, tau, t_spec.alpha, loss, "ok", a_name, a_spec.alpha))
    return rows


def with_overrides(config: OptimizerConfig, **kw) -> OptimizerConfig:
    return replace(config, **{k: v for k, v in kw.items() if v is not None})
