"""Closed-form benchmark data and error measurement.

For the circle of radius ``R0`` the initial function
``u0 = max(|x|**(g+1) - R0**(g+1), 0)**2`` evolves exactly as

    u(x, t) = max(|x|**(g+1) - R0**(g+1) + (g+1) t, 0)**2,   0 <= t < R0**(g+1) / (g+1).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from .core_math import make_gamma_params
from .field import CIRCLE, ELLIPSE, Box, ClosedForm, ScalarField
from .solver import GameConfig, n_steps, solve_backward

ELLIPSE_ASPECT = 1.7


@dataclass(frozen=True)
class CircleBenchmark:
    gamma: float
    R0: float = 1.0

    def __post_init__(self):
        make_gamma_params(self.gamma)
        if not self.R0 > 0.0:
            raise ValueError(f"R0 must be positive, got {self.R0!r}")

    name = "circle"

    @property
    def t_max(self) -> float:
        return self.R0 ** (self.gamma + 1.0) / (self.gamma + 1.0)

    @property
    def u0(self) -> ClosedForm:
        return ClosedForm(CIRCLE, (self.gamma, self.R0, 0.0), symmetry="d4")

    def exact_at(self, t: float) -> ClosedForm:
        if not 0.0 <= t < self.t_max:
            raise ValueError(f"t={t!r} outside [0, t_max={self.t_max:.6g})")
        return ClosedForm(CIRCLE, (self.gamma, self.R0, (self.gamma + 1.0) * t), symmetry="d4")

    def level_radius(self, level: float, t: float) -> float:
        """Radius of the circle where the exact solution equals ``level >= 0``."""
        g1 = self.gamma + 1.0
        inner = self.R0**g1 - g1 * t
        if not 0.0 <= t < self.t_max:
            raise ValueError(f"t={t!r} outside [0, t_max={self.t_max:.6g})")
        return (inner + math.sqrt(level)) ** (1.0 / g1)

    def zero_radius(self, t: float) -> float:
        return self.level_radius(0.0, t)


@dataclass(frozen=True)
class EllipseBenchmark:
    """Initial ellipse ``x1**2 + 1.7 x2**2 = 1``; no exact solution."""

    gamma: float

    def __post_init__(self):
        make_gamma_params(self.gamma)

    name = "ellipse"

    @property
    def u0(self) -> ClosedForm:
        return ClosedForm(ELLIPSE, (self.gamma, ELLIPSE_ASPECT, 0.0), symmetry="d2")

    exact_at = None


def _xy(x):
    x = np.asarray(x, dtype=float)
    return x[..., 0], x[..., 1]


def u0_circle(x, b: CircleBenchmark):
    return b.u0(*_xy(x))


def exact_circle(x, t: float, b: CircleBenchmark):
    return b.exact_at(t)(*_xy(x))


def u0_ellipse(x, gamma: float):
    return EllipseBenchmark(gamma).u0(*_xy(x))


def error_norms(slc: ScalarField, exact, eval_box: Optional[Box] = None) -> tuple[float, float]:
    """Max and ``h**2``-weighted sum of ``|slice - exact|`` over the nodes.

    ``exact`` is either a function of ``(x, y)`` or an array of node values.
    With ``eval_box`` only nodes inside that box count.
    """
    if callable(exact):
        X, Y = slc.mesh()
        ref = np.asarray(exact(X, Y), dtype=float)
    else:
        ref = np.asarray(exact, dtype=float)
    diff = np.abs(slc.values - ref)
    if eval_box is not None:
        X, Y = slc.mesh()
        diff = diff[eval_box.contains(X, Y)]
    if diff.size == 0:
        raise ValueError("evaluation box contains no nodes")
    return float(diff.max()), float(slc.h**2 * diff.sum())


@dataclass
class ErrorReport:
    per_step: list[tuple[int, float, float, float]] = field(default_factory=list)

    @property
    def sup_linf(self) -> float:
        return max(r[2] for r in self.per_step)

    @property
    def sup_l1(self) -> float:
        return max(r[3] for r in self.per_step)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "t", "linf", "l1"])
        for k, t, linf, l1 in self.per_step:
            w.writerow([k, repr(t), repr(linf), repr(l1)])
        w.writerow(["sup", "", repr(self.sup_linf), repr(self.sup_l1)])
        return buf.getvalue()

    def write(self, path) -> None:
        Path(path).write_text(self.to_csv())

    @classmethod
    def from_csv(cls, text: str) -> "ErrorReport":
        rows = list(csv.reader(io.StringIO(text)))
        report = cls()
        for row in rows[1:]:
            if row[0] == "sup":
                continue
            report.per_step.append((int(row[0]), float(row[1]), float(row[2]), float(row[3])))
        return report


def track_errors(
    cfg: GameConfig,
    benchmark: CircleBenchmark,
    *,
    eval_box: Optional[Box] = None,
    observer: Optional[Callable] = None,
) -> ErrorReport:
    """Solve the benchmark and compare every slice with the exact solution."""
    K = n_steps(cfg)
    if K < 1:
        raise ValueError(f"horizon {cfg.horizon_T} is shorter than one time step")
    if not cfg.horizon_T < benchmark.t_max:
        raise ValueError(f"horizon {cfg.horizon_T} reaches the extinction time {benchmark.t_max:.6g}")
    report = ErrorReport()

    def record(k, t, slc):
        linf, l1 = error_norms(slc, benchmark.exact_at(t), eval_box)
        report.per_step.append((k, t, linf, l1))
        if observer is not None:
            observer(k, t, slc)

    solve_backward(cfg, benchmark.u0, record, exact_family=benchmark.exact_at)
    return report
