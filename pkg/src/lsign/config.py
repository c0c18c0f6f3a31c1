"""Flat ``key=value`` experiment configs."""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from pathlib import Path

from .euler import MODELS
from .oscillate import DEFAULT_EPSILON, DEFAULT_RATIO, ExponentProfile, get_preset, make_profile

SOURCES = ("delta", "symk", "synthetic", "spinor-synthetic", "spinor-ingest")
TASKS = ("windows", "cumulative", "moments", "rankin-check", "divisor-bound-check")
FIT_TASKS = {"cumulative", "moments"}
MIN_FIT_N = 1000


class ConfigError(ValueError):
    def __init__(self, problems: list[str]):
        super().__init__("\n".join(problems))
        self.problems = problems


@dataclass
class ExperimentConfig:
    source: str = "delta"
    N: int | None = None
    label: str = ""
    preset: str = ""
    outputs: str = "reports"
    tasks: list[str] = field(default_factory=list)
    j: int | None = None
    m: int | None = None
    model: str = "ramanujan-uniform"
    seed: int = 0
    path: str = ""
    weight: int | None = None
    symplectic: bool = False
    alpha: str | None = None
    beta: str | None = None
    gamma: str | None = None
    r: float | None = None
    epsilon: float = DEFAULT_EPSILON
    x_min: int = 1
    x_max: int | None = None
    ratio: float = DEFAULT_RATIO
    fit_x_min: int = 1000

    def resolved_label(self) -> str:
        if self.label:
            return self.label
        extra = {"symk": f"-j{self.j}", "synthetic": f"-m{self.m}-{self.model}-s{self.seed}",
                 "spinor-synthetic": f"-s{self.seed}"}.get(self.source, "")
        return f"{self.source}{extra}"

    def degree(self) -> int:
        return {"delta": 2, "symk": (self.j or 1) + 1, "synthetic": self.m or 2}.get(self.source, 4)

    def default_preset(self) -> str:
        if self.source == "delta":
            return "gl2-selfdual"
        if self.source == "symk":
            return f"glm-ramanujan({(self.j or 1) + 1})"
        if self.source == "synthetic":
            return f"glm({self.m})" if self.model == "lrs-extremal" else f"glm-ramanujan({self.m})"
        return "siegel-spinor"

    def profile(self) -> ExponentProfile:
        if self.preset == "explicit":
            prof = make_profile(self.alpha, self.beta, self.gamma, self.epsilon, r=self.r)
        else:
            prof = get_preset(self.preset or self.default_preset(), self.epsilon)
            if self.r is not None:
                prof = prof.with_r(self.r)
        return prof

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


_INT = {"N", "j", "m", "seed", "weight", "x_min", "x_max", "fit_x_min"}
_FLOAT = {"r", "epsilon", "ratio"}
_KEYS = {f.name for f in fields(ExperimentConfig)}


def _convert(key: str, value: str):
    if key in _INT:
        return int(value)
    if key in _FLOAT:
        return float(value)
    if key == "tasks":
        return [t.strip() for t in value.split(",") if t.strip()]
    if key == "symplectic":
        v = value.lower()
        if v not in ("true", "false", "1", "0", "yes", "no"):
            raise ValueError(f"expected a boolean, got {value!r}")
        return v in ("true", "1", "yes")
    if key in ("alpha", "beta", "gamma"):
        from fractions import Fraction

        Fraction(value)  # validates
        return value
    return value


def parse_assignments(lines: list[tuple[str, str]]) -> tuple[dict, dict, list[str]]:
    """Parse (location, text) pairs into values plus where each key was set."""
    values, where, problems = {}, {}, []
    for loc, raw in lines:
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            problems.append(f"{loc}: expected key=value, got {raw.strip()!r}")
            continue
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _KEYS:
            problems.append(f"{loc}: unknown key {key!r}")
            continue
        try:
            values[key] = _convert(key, value)
        except ValueError as exc:
            problems.append(f"{loc}: bad value for {key}: {exc}")
            continue
        where[key] = loc
    return values, where, problems


def load_config(path: str | Path | None, overrides: list[str] = ()) -> ExperimentConfig:
    lines = []
    if path is not None:
        path = Path(path)
        lines = [(f"{path}:{i}", text) for i, text in enumerate(path.read_text().splitlines(), start=1)]
    lines += [(f"--set[{i}]", text) for i, text in enumerate(overrides, start=1)]
    values, where, problems = parse_assignments(lines)
    cfg = ExperimentConfig(**values)
    problems += validate(cfg, where)
    if problems:
        raise ConfigError(problems)
    return cfg


def validate(cfg: ExperimentConfig, where: dict | None = None) -> list[str]:
    where = where or {}

    def loc(key):
        return where.get(key, "<config>")

    problems = []
    if cfg.source not in SOURCES:
        problems.append(f"{loc('source')}: source must be one of {SOURCES}")
        return problems
    for t in cfg.tasks:
        if t not in TASKS:
            problems.append(f"{loc('tasks')}: unknown task {t!r}; choose from {TASKS}")
    if cfg.source == "symk" and (cfg.j is None or cfg.j < 1):
        problems.append(f"{loc('j')}: source=symk needs j >= 1")
    if cfg.source == "synthetic":
        if cfg.m is None or cfg.m < 2:
            problems.append(f"{loc('m')}: source=synthetic needs m >= 2")
        if cfg.model not in MODELS:
            problems.append(f"{loc('model')}: model must be one of {MODELS}")
        elif cfg.model == "sato-tate" and cfg.m not in (None, 2):
            problems.append(f"{loc('model')}: sato-tate is only defined for m = 2")
    if cfg.source == "spinor-ingest":
        if not cfg.path:
            problems.append(f"{loc('path')}: source=spinor-ingest needs path")
        if "rankin-check" in cfg.tasks:
            problems.append(f"{loc('tasks')}: rankin-check needs Satake data, unavailable for ingested eigenvalues")
    elif cfg.N is None:
        problems.append(f"{loc('N')}: N is required")
    if cfg.N is not None and cfg.N < 1:
        problems.append(f"{loc('N')}: N must be positive")
    if cfg.N is not None and FIT_TASKS & set(cfg.tasks) and cfg.N < MIN_FIT_N:
        problems.append(f"{loc('N')}: fitting tasks need N >= {MIN_FIT_N}, got {cfg.N}")
    if cfg.ratio <= 1:
        problems.append(f"{loc('ratio')}: ratio must exceed 1")
    if cfg.x_min < 1:
        problems.append(f"{loc('x_min')}: x_min must be >= 1")
    if cfg.preset == "explicit":
        missing = [k for k in ("alpha", "beta", "gamma") if getattr(cfg, k) is None]
        if missing:
            problems.append(f"{loc('preset')}: explicit preset needs {', '.join(missing)}")
            return problems
    try:
        prof = cfg.profile()
    except ValueError as exc:
        problems.append(f"{loc('preset')}: {exc}")
        return problems
    if cfg.r is not None and not prof.threshold < prof.r < 1:
        problems.append(
            f"{loc('r')}: r = {prof.r} must satisfy {prof.threshold} < r < 1 "
            f"(lower bound {float(prof.threshold):.6f}, upper bound 1)"
        )
    return problems
