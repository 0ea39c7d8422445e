"""Experiment description files: one ``key=value`` per line, ``#`` starts a comment."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

from .analytic import CircleBenchmark, EllipseBenchmark
from .field import Box
from .solver import DEFAULT_LEVEL, GameConfig

EMIT_CHOICES = ("fields", "contours", "errors")

# Table 1, scale = 0.9.
DEFAULTS = {
    "gamma": 0.7,
    "epsilon": 0.08,
    "scale": 0.9,
    "h": 0.01,
    "l0": 160,
    "ds": 0.01,
    "horizon_T": 0.12,
}

_FLOAT_KEYS = {"gamma", "epsilon", "scale", "alpha1", "alpha2", "h", "ds", "horizon_T", "level", "R0",
               "domain_min_x", "domain_min_y", "domain_max_x", "domain_max_y"}
_INT_KEYS = {"l0", "r0", "threads"}
_STR_KEYS = {"outside", "symmetry", "benchmark", "out", "emit", "snapshots", "eval_box", "figures"}
KEYS = _FLOAT_KEYS | _INT_KEYS | _STR_KEYS

# Serialization order.
_ORDER = ("gamma", "epsilon", "scale", "alpha1", "alpha2", "h", "l0", "r0", "ds", "horizon_T",
          "domain_min_x", "domain_min_y", "domain_max_x", "domain_max_y", "level", "outside",
          "threads", "symmetry", "benchmark", "R0", "out", "emit", "snapshots", "eval_box", "figures")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentSpec:
    game: GameConfig
    benchmark: str = "circle"
    R0: float = 1.0
    out: Path = Path("out")
    emit: frozenset = frozenset({"errors"})
    snapshots: tuple[int, ...] = ()
    eval_box: Optional[Box] = None
    figures: bool = True

    def make_benchmark(self):
        if self.benchmark == "circle":
            return CircleBenchmark(self.game.gamma, self.R0)
        return EllipseBenchmark(self.game.gamma)

    def to_mapping(self) -> dict:
        g = self.game
        m = {
            "gamma": g.gamma, "epsilon": g.epsilon, "scale": g.scale, "alpha1": g.alpha1, "alpha2": g.alpha2,
            "h": g.h, "l0": g.l0, "r0": g.r0, "ds": g.ds, "horizon_T": g.horizon_T,
            "domain_min_x": g.domain.x0, "domain_min_y": g.domain.y0,
            "domain_max_x": g.domain.x1, "domain_max_y": g.domain.y1,
            "level": g.contour_level, "outside": g.outside, "threads": g.threads, "symmetry": g.symmetry,
            "benchmark": self.benchmark, "R0": self.R0, "out": str(self.out),
            "emit": ",".join(sorted(self.emit)),
            "snapshots": ",".join(str(k) for k in self.snapshots),
            "eval_box": str(self.eval_box) if self.eval_box else None,
            "figures": "yes" if self.figures else "no",
        }
        return {k: v for k, v in m.items() if v is not None and v != ""}

    def to_text(self) -> str:
        m = self.to_mapping()
        return "".join(f"{k}={_fmt(m[k])}\n" for k in _ORDER if k in m)


def _fmt(v) -> str:
    return repr(v) if isinstance(v, float) else str(v)


def parse_text(text: str) -> dict:
    values = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {n}: expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in KEYS:
            raise ConfigError(f"line {n}: unknown key {key!r}")
        values[key] = _convert(key, value)
    return values


def _convert(key: str, value: str):
    try:
        if key in _FLOAT_KEYS:
            return float(value)
        if key in _INT_KEYS:
            return int(value)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {value!r}") from exc
    return value


def build_spec(values: dict) -> ExperimentSpec:
    """Assemble a validated experiment from parsed values layered over the defaults."""
    v = dict(values)
    if "alpha1" in v or "alpha2" in v:
        base = {k: x for k, x in DEFAULTS.items() if k != "scale"}
    else:
        base = dict(DEFAULTS)
    if "r0" in v:
        base.pop("ds", None)
    merged = {**base, **v}
    try:
        domain = Box(
            merged.get("domain_min_x", -2.0), merged.get("domain_min_y", -2.0),
            merged.get("domain_max_x", 2.0), merged.get("domain_max_y", 2.0),
        )
        game = GameConfig(
            gamma=merged["gamma"], epsilon=merged["epsilon"], h=merged["h"], l0=merged["l0"],
            horizon_T=merged["horizon_T"], scale=merged.get("scale"), alpha1=merged.get("alpha1"),
            alpha2=merged.get("alpha2"), r0=merged.get("r0"), ds=merged.get("ds"), domain=domain,
            outside=merged.get("outside", "exact"), contour_level=merged.get("level", DEFAULT_LEVEL),
            threads=merged.get("threads", 1), symmetry=merged.get("symmetry", "auto"),
        )
        emit = frozenset(e for e in str(merged.get("emit", "errors")).split(",") if e)
        if not emit <= set(EMIT_CHOICES):
            raise ConfigError(f"emit must be a subset of {EMIT_CHOICES}, got {sorted(emit)}")
        benchmark = merged.get("benchmark", "circle")
        if benchmark not in ("circle", "ellipse"):
            raise ConfigError(f"unknown benchmark {benchmark!r}")
        if benchmark == "ellipse" and game.outside == "exact":
            # No exact solution exists for the ellipse; fall back to the initial datum.
            game = replace(game, outside="analytic")
        snaps = tuple(int(s) for s in str(merged.get("snapshots", "")).split(",") if s.strip())
        eval_box = Box.parse(merged["eval_box"]) if merged.get("eval_box") else None
        figures = str(merged.get("figures", "yes")).lower() in ("yes", "true", "1", "on")
        return ExperimentSpec(
            game=game, benchmark=benchmark, R0=merged.get("R0", 1.0), out=Path(merged.get("out", "out")),
            emit=emit, snapshots=snaps, eval_box=eval_box, figures=figures,
        )
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc


def parse_spec(text: str) -> ExperimentSpec:
    return build_spec(parse_text(text))


def load_spec(path, overrides: Optional[dict] = None) -> ExperimentSpec:
    values = parse_text(Path(path).read_text()) if path else {}
    values.update(overrides or {})
    return build_spec(values)
