"""Problem configs, design files and CSV output.

A problem config is a JSON object::

    {
      "schema_version": 1,
      "kind": "continuous-linear",          # or "binary-logistic"
      "copula": {"family": "frank", "tau": 0.45},
      "design_space": [0, 1],
      "estimate_alpha": true,
      "optimizer": {"grid_size": 1001}
    }

Only ``schema_version`` and ``kind`` are required. Continuous problems also
accept ``trend1``/``trend2`` (lists of monomial powers) and ``beta``; binary
problems accept ``beta1``/``beta2`` as ``[intercept, slope]``. The copula
defaults to the product copula; any other family needs exactly one of
``alpha`` or ``tau``.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path

from . import copula as cop
from .design import DesignMeasure
from .errors import ConfigError, CopulaDesignError, DesignValidationError
from .models import BinaryLogisticProblem, GaussianMarginProblem, PolynomialTrend
from .optimizer import OptimizerConfig

SCHEMA_VERSION = 1
KINDS = ("continuous-linear", "binary-logistic")

_COMMON_KEYS = {"schema_version", "kind", "copula", "design_space", "estimate_alpha", "optimizer"}
_KIND_KEYS = {
    "continuous-linear": {"trend1", "trend2", "beta"},
    "binary-logistic": {"beta1", "beta2"},
}
_OPTIMIZER_KEYS = {f.name for f in dataclasses.fields(OptimizerConfig)}


@dataclass(frozen=True)
class ProblemConfig:
    """A parsed problem config: the problem object plus optimizer settings."""

    problem: object
    optimizer: OptimizerConfig
    raw: dict

    @property
    def kind(self) -> str:
        return self.raw["kind"]

    @property
    def problem_hash(self) -> str:
        """SHA-256 of the canonical JSON of the config, used to tie design files to problems."""
        text = json.dumps(self.raw, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()

    @classmethod
    def from_dict(cls, raw: dict) -> "ProblemConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        version = raw.get("schema_version")
        if version != SCHEMA_VERSION:
            raise ConfigError(f"unsupported schema_version {version!r}; expected {SCHEMA_VERSION}")
        kind = raw.get("kind")
        if kind not in KINDS:
            raise ConfigError(f"kind must be one of {KINDS}, got {kind!r}")
        unknown = set(raw) - _COMMON_KEYS - _KIND_KEYS[kind]
        if unknown:
            raise ConfigError(f"unknown config keys for {kind}: {sorted(unknown)}")
        try:
            spec = _parse_copula(raw.get("copula", {"family": "product"}))
            estimate = bool(raw.get("estimate_alpha", True))
            kw = {"copula": spec, "estimate_alpha": estimate}
            if "design_space" in raw:
                kw["design_space"] = _pair(raw["design_space"], "design_space")
            if kind == "continuous-linear":
                if "trend1" in raw:
                    kw["trend1"] = PolynomialTrend(tuple(raw["trend1"]))
                if "trend2" in raw:
                    kw["trend2"] = PolynomialTrend(tuple(raw["trend2"]))
                if "beta" in raw:
                    kw["beta"] = tuple(float(b) for b in raw["beta"])
                problem = GaussianMarginProblem(**kw)
            else:
                for key in ("beta1", "beta2"):
                    if key in raw:
                        kw[key] = _pair(raw[key], key)
                problem = BinaryLogisticProblem(**kw)
            optimizer = _parse_optimizer(raw.get("optimizer", {}))
            optimizer.validate(problem.n_params)
        except ConfigError:
            raise
        except (CopulaDesignError, TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
        return cls(problem, optimizer, raw)

    @classmethod
    def load(cls, path) -> "ProblemConfig":
        return cls.from_dict(_read_json(path))


def _pair(value, name):
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ConfigError(f"{name} must be a two-element list")
    return (float(value[0]), float(value[1]))


def _parse_copula(block) -> cop.CopulaSpec:
    if not isinstance(block, dict):
        raise ConfigError("copula must be an object with a 'family' key")
    unknown = set(block) - {"family", "alpha", "tau"}
    if unknown:
        raise ConfigError(f"unknown copula keys: {sorted(unknown)}")
    family = cop.CopulaFamily.parse(block.get("family", "product"))
    has_alpha, has_tau = "alpha" in block, "tau" in block
    if family is cop.CopulaFamily.PRODUCT:
        if has_alpha or has_tau:
            raise ConfigError("the product copula takes neither alpha nor tau")
        return cop.CopulaSpec(family)
    if has_alpha == has_tau:
        raise ConfigError(f"give exactly one of alpha or tau for the {family.value} copula")
    if has_tau:
        return cop.alpha_from_tau(family, float(block["tau"]))
    return cop.CopulaSpec(family, float(block["alpha"]))


def _parse_optimizer(block) -> OptimizerConfig:
    if not isinstance(block, dict):
        raise ConfigError("optimizer must be an object")
    unknown = set(block) - _OPTIMIZER_KEYS
    if unknown:
        raise ConfigError(f"unknown optimizer keys: {sorted(unknown)}")
    return OptimizerConfig(**block)


def _read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc


# ---------------------------------------------------------------------------
# design files
# ---------------------------------------------------------------------------


def save_design(path, design: DesignMeasure, metadata: dict | None = None) -> None:
    doc = {"schema_version": SCHEMA_VERSION, **design.to_dict(), "metadata": metadata or {}}
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def load_design(path, space=None) -> tuple[DesignMeasure, dict]:
    """Read a design file; the measure's invariants are enforced on load."""
    doc = _read_json(path)
    if not isinstance(doc, dict) or "points" not in doc or "weights" not in doc:
        raise ConfigError(f"{path} is not a design file (needs 'points' and 'weights')")
    try:
        design = DesignMeasure(doc["points"], doc["weights"])
    except (TypeError, ValueError) as exc:
        if isinstance(exc, DesignValidationError):
            raise
        raise DesignValidationError(f"{path}: {exc}") from exc
    if space is not None:
        design.check_space(space)
    return design, doc.get("metadata", {})


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------


def format_value(value) -> str:
    """17 significant digits for floats, empty for missing values."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return format(value, ".17g")
    return str(value)


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(v) for v in row])
    return path
