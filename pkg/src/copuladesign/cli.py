"""Command-line front end.

Verbs: optimize, check, efficiency, tau, sensitivity-profile, repro. Every
command that writes CSV also renders a PNG with the same stem next to it.

Exit codes: 0 ok/certified, 1 input error, 2 numerical error, 3 not
converged, 4 not certified, 5 reproduction mismatch.
"""

from __future__ import annotations

import argparse
import logging
import re
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import copula as cop
from . import plotting, repro
from .design import certify, d_efficiency, efficiency_loss_percent
from .errors import (
    AttainabilityError,
    BoundaryError,
    ConfigError,
    DegenerateInformationError,
    DesignValidationError,
    InitializationError,
    InternalConsistencyError,
    ParameterDomainError,
    QuadratureError,
    SingularDesignError,
)
from .files import ProblemConfig, load_design, save_design, write_csv
from .optimizer import OptimizerConfig, fedorov_wynn, with_overrides

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NUMERICAL = 2
EXIT_NOT_CONVERGED = 3
EXIT_NOT_CERTIFIED = 4
EXIT_REPRO_MISMATCH = 5

_INPUT_ERRORS = (ConfigError, DesignValidationError, ParameterDomainError, AttainabilityError,
                 BoundaryError, FileNotFoundError, ValueError)
_NUMERICAL_ERRORS = (SingularDesignError, QuadratureError, DegenerateInformationError,
                     InternalConsistencyError, InitializationError, FloatingPointError)

log = logging.getLogger("copuladesign")


def bundled_config(name: str) -> Path:
    """Path of a config shipped with the package, e.g. ``fedorov_linear.json``."""
    return Path(str(resources.files("copuladesign") / "configs" / name))


def _resolve_config_path(value: str) -> str:
    if Path(value).exists():
        return value
    bundled = bundled_config(value)
    return str(bundled) if bundled.exists() else value


def _load_config(args) -> ProblemConfig:
    cfg = ProblemConfig.load(_resolve_config_path(args.config))
    opt = with_overrides(cfg.optimizer, grid_size=args.grid, tol_cert=args.tol,
                         quad_order=args.quad_order)
    opt.validate(cfg.problem.n_params)
    return ProblemConfig(cfg.problem, opt, cfg.raw)


def _sibling(path: Path, suffix: str) -> Path:
    return path.with_name(path.stem + suffix)


def _print_design(design):
    print(f"{'x':>12}  {'weight':>10}")
    for x, w in zip(design.points, design.weights):
        print(f"{x:12.6f}  {w:10.6f}")


def _write_profile(path: Path, report, design, title):
    write_csv(path, ("x", "sensitivity"), report.profile)
    xs = np.array([p[0] for p in report.profile])
    d = np.array([p[1] for p in report.profile])
    png = plotting.plot_sensitivity(path.with_suffix(".png"), xs, d, design, report.bound, title)
    print(f"wrote {path} and {png}")


# ---------------------------------------------------------------------------
# verbs
# ---------------------------------------------------------------------------


def cmd_optimize(args) -> int:
    cfg = _load_config(args)
    result = fedorov_wynn(cfg.problem, None, cfg.optimizer)
    out = Path(args.out or "design.json")
    meta = {
        "problem_hash": cfg.problem_hash,
        "kind": cfg.kind,
        "copula": str(cfg.problem.copula),
        "parameters": cfg.problem.params.as_vector().tolist(),
        "certified": result.report.certified,
        "max_sensitivity": result.report.max_sensitivity,
        "converged": result.converged,
    }
    out.parent.mkdir(parents=True, exist_ok=True)
    save_design(out, result.design, meta)
    trace_rows = [(r.iteration, r.phase, r.criterion, r.max_sensitivity, r.support_size)
                  for r in result.trace.records]
    write_csv(_sibling(out, "_trace.csv"),
              ("iteration", "phase", "log_det", "max_sensitivity", "support_size"), trace_rows)
    _print_design(result.design)
    print(result.report.summary())
    _write_profile(_sibling(out, "_profile.csv"), result.report, result.design,
                   f"{cfg.kind}, {cfg.problem.copula}")
    print(f"wrote {out}")
    if not result.converged:
        return EXIT_NOT_CONVERGED
    return EXIT_OK if result.report.certified else EXIT_NOT_CERTIFIED


def cmd_check(args) -> int:
    cfg = _load_config(args)
    design, _ = load_design(args.design, cfg.problem.design_space)
    grid = args.grid or cfg.optimizer.cert_grid or cfg.optimizer.grid_size
    report = certify(design, cfg.problem, None, grid, cfg.optimizer.tol_cert, cfg.optimizer.quad)
    if not np.isfinite(report.max_sensitivity):
        print(report.summary(), file=sys.stderr)
        return EXIT_NUMERICAL
    print(f"max sensitivity {report.max_sensitivity:.10g} at x = {report.argmax_x:.10g}; "
          f"bound {report.bound}")
    print(report.summary())
    if args.profile:
        _write_profile(Path(args.profile), report, design, f"check: {cfg.problem.copula}")
    return EXIT_OK if report.certified else EXIT_NOT_CERTIFIED


def cmd_sensitivity_profile(args) -> int:
    cfg = _load_config(args)
    design, _ = load_design(args.design, cfg.problem.design_space)
    grid = args.grid or cfg.optimizer.grid_size
    report = certify(design, cfg.problem, None, grid, cfg.optimizer.tol_cert, cfg.optimizer.quad)
    if not np.isfinite(report.max_sensitivity):
        print(report.summary(), file=sys.stderr)
        return EXIT_NUMERICAL
    _write_profile(Path(args.out or "profile.csv"), report, design,
                   f"sensitivity: {cfg.problem.copula}")
    return EXIT_OK


def cmd_efficiency(args) -> int:
    cfg = _load_config(args)
    space = cfg.problem.design_space
    a, _ = load_design(args.design_a, space)
    b, _ = load_design(args.design_b, space)
    eff = d_efficiency(a, b, cfg.problem, None, cfg.optimizer.quad)
    print(f"D-efficiency {eff:.6f}")
    print(f"loss {efficiency_loss_percent(eff):.4f}%")
    return EXIT_OK


def cmd_tau(args) -> int:
    family = cop.CopulaFamily.parse(args.family)
    if args.alpha is not None:
        print(f"tau = {cop.tau_from_alpha(cop.CopulaSpec(family, args.alpha)):.10g}")
    else:
        print(f"alpha = {cop.alpha_from_tau(family, args.tau).alpha:.10g}")
    return EXIT_OK


def _slug(text: str) -> str:
    return re.sub(r"[^a-z0-9.]+", "_", text.lower()).strip("_")


def cmd_repro(args) -> int:
    config = with_overrides(OptimizerConfig(), grid_size=args.grid, quad_order=args.quad_order)
    out_dir = Path(args.out or "repro_out")
    out_dir.mkdir(parents=True, exist_ok=True)
    result = repro.run(args.target, config)
    stem = args.target.replace("-", "_")

    header = ("cell", "computed", "reference", "delta", "tolerance", "in_scope", "verdict", "note")
    rows = [(c.label, c.computed, c.reference, c.delta, c.tolerance, c.in_scope, c.verdict, c.note)
            for c in result.cells]
    write_csv(out_dir / f"{stem}_comparison.csv", header, rows)
    for name, (head, body) in result.tables.items():
        write_csv(out_dir / f"{stem}_{name}.csv", head, body)
    for prof in result.profiles:
        plotting.plot_sensitivity(out_dir / f"{stem}_{_slug(prof.name)}.png", prof.xs, prof.d,
                                  prof.design, prof.bound, prof.name)
    if result.loss_rows:
        plotting.plot_losses(out_dir / f"{stem}_losses.png", result.cells, args.target)

    for c in result.cells:
        delta = "" if c.delta is None else f" delta={c.delta:+.4g}"
        print(f"[{c.verdict:>7}] {c.label}: computed={_short(c.computed)} "
              f"reference={_short(c.reference)}{delta}")
    failures = result.failures
    print(f"{args.target}: {len(result.cells) - len(failures)}/{len(result.cells)} cells ok "
          f"({result.elapsed:.1f} s); output in {out_dir}")
    return EXIT_OK if not failures else EXIT_REPRO_MISMATCH


def _short(value) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _common(p, config_required=True):
    p.add_argument("--config", required=config_required,
                   help="problem config JSON (path, or name of a bundled config)")
    p.add_argument("--grid", type=int, help="candidate / certification grid size")
    p.add_argument("--tol", type=float, help="certification tolerance on the bound")
    p.add_argument("--quad-order", type=int, dest="quad_order", help="quadrature order per axis")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="copuladesign", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("optimize", help="compute a locally D-optimal design")
    _common(p)
    p.add_argument("--out", help="design file to write (default design.json)")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("check", help="certify a design via the equivalence theorem")
    p.add_argument("design")
    _common(p)
    p.add_argument("--profile", help="write the sensitivity profile CSV (and PNG) here")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("efficiency", help="D-efficiency of design A relative to design B")
    p.add_argument("design_a")
    p.add_argument("design_b")
    _common(p)
    p.set_defaults(func=cmd_efficiency)

    p = sub.add_parser("tau", help="convert between Kendall's tau and alpha")
    p.add_argument("family")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--tau", type=float)
    group.add_argument("--alpha", type=float)
    p.set_defaults(func=cmd_tau)

    p = sub.add_parser("sensitivity-profile", help="tabulate d(x) for a design")
    p.add_argument("design")
    _common(p)
    p.add_argument("--out", help="profile CSV to write (default profile.csv)")
    p.set_defaults(func=cmd_sensitivity_profile)

    p = sub.add_parser("repro", help="rerun a published study and compare cell by cell")
    p.add_argument("target", choices=repro.TARGETS)
    p.add_argument("--out", help="output directory (default repro_out)")
    p.add_argument("--grid", type=int, help="candidate grid size")
    p.add_argument("--quad-order", type=int, dest="quad_order", help="quadrature order per axis")
    p.set_defaults(func=cmd_repro)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; usage errors are input errors here
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        with np.errstate(over="ignore", under="ignore"):
            return args.func(args)
    except _NUMERICAL_ERRORS as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except _INPUT_ERRORS as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
