"""Backward-in-time min-max iteration for the game value function.

One step maps the slice at game time ``t + eps**2`` to the slice at ``t``::

    u(x) = min_{v, s} max_{b, beta = +-1} u_next(x + b eps s v + beta eps**2 f(s) v_perp)

with ``u_next`` read by bilinear interpolation.  Starting from ``u0`` at the
final game time, ``k`` steps give the forward flow at physical time
``k * eps**2``.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace
from typing import Callable, Optional

import numpy as np

from . import _kernels
from .controls import ControlSet, DirectionSet, direction_set, discretize_controls
from .core_math import AlphaWindow, GammaParams, alpha_window, alphas_from_scale, make_gamma_params
from .field import (
    AnalyticInitial,
    Box,
    ClampNearest,
    ClosedForm,
    OutsidePolicy,
    ScalarField,
    from_function,
    grid_shape,
    sample_index,
)

log = logging.getLogger(__name__)

DEFAULT_LEVEL = 0.07


class SolverFault(RuntimeError):
    """A step produced non-finite values (domain or outside policy misconfigured)."""


@dataclass(frozen=True)
class AnalyticExact:
    """Exterior points read a time-dependent closed form.

    ``family(t)`` returns the function to use when the slice being sampled
    represents physical time ``t``.
    """

    family: Callable[[float], Callable]

    def at(self, t: float) -> AnalyticInitial:
        return AnalyticInitial(self.family(t))


@dataclass(frozen=True)
class GameConfig:
    """Everything that defines one run of the scheme.

    Exactly one of ``scale`` or the pair ``(alpha1, alpha2)``, and exactly one
    of ``r0`` or ``ds``, must be set.  ``outside`` is one of ``"exact"``,
    ``"analytic"`` or ``"clamp"``; ``symmetry`` is ``"off"`` or ``"auto"``.
    """

    gamma: float
    epsilon: float
    h: float
    l0: int
    horizon_T: float
    scale: Optional[float] = None
    alpha1: Optional[float] = None
    alpha2: Optional[float] = None
    r0: Optional[int] = None
    ds: Optional[float] = None
    domain: Box = field(default_factory=lambda: Box(-2.0, -2.0, 2.0, 2.0))
    outside: str = "exact"
    contour_level: float = DEFAULT_LEVEL
    threads: int = 1
    symmetry: str = "off"

    def __post_init__(self):
        if (self.scale is None) == (self.alpha1 is None and self.alpha2 is None):
            raise ValueError("set either scale or both alpha1 and alpha2")
        if self.scale is None and (self.alpha1 is None or self.alpha2 is None):
            raise ValueError("alpha1 and alpha2 must be given together")
        if (self.r0 is None) == (self.ds is None):
            raise ValueError("set exactly one of r0 or ds")
        if self.outside not in ("exact", "analytic", "clamp"):
            raise ValueError(f"unknown outside policy {self.outside!r}")
        if self.symmetry not in ("off", "auto"):
            raise ValueError(f"unknown symmetry mode {self.symmetry!r}")
        if self.threads < 0:
            raise ValueError("threads must be >= 0")
        if not self.h > 0.0:
            raise ValueError(f"grid step must be positive, got {self.h!r}")

    def gamma_params(self) -> GammaParams:
        return make_gamma_params(self.gamma)

    def window(self) -> AlphaWindow:
        p = self.gamma_params()
        if self.scale is not None:
            return alphas_from_scale(p, self.scale)
        return alpha_window(p, self.alpha1, self.alpha2)

    def controls(self) -> ControlSet:
        return discretize_controls(self.epsilon, self.window(), self.gamma_params(), r0=self.r0, ds=self.ds)

    def directions(self) -> DirectionSet:
        return direction_set(self.l0)

    def replace(self, **changes) -> "GameConfig":
        return replace(self, **changes)

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def n_steps(cfg: GameConfig) -> int:
    return math.floor(cfg.horizon_T / cfg.epsilon**2 + 1e-9)


def validate(cfg: GameConfig) -> None:
    """Raise ``ValueError`` unless every derived quantity can be built."""
    cfg.controls()
    cfg.directions()
    grid_shape(cfg.domain, cfg.h)
    if n_steps(cfg) < 1:
        raise ValueError(f"horizon {cfg.horizon_T} is shorter than one time step {cfg.epsilon**2}")


def validate_scaling(cfg: GameConfig) -> list[str]:
    """Warnings about resolution and boundary influence; never raises."""
    warnings = []
    try:
        p = cfg.gamma_params()
        w = cfg.window()
    except ValueError as exc:
        return [f"cannot check scaling: {exc}"]
    eps = cfg.epsilon
    h_max = eps ** (4.0 / 3.0)
    if cfg.h >= h_max:
        warnings.append(
            f"grid step h={cfg.h:g} is not below eps**(4/3)={h_max:.4g}; "
            "interpolation cells are coarser than the control footprint"
        )
    tangential = eps * eps ** (-w.alpha2)
    normal = eps**2 * p.c_gamma * (eps**w.alpha1) ** p.cost_exponent
    reach = max(tangential, normal)
    half_width = 0.5 * min(cfg.domain.x1 - cfg.domain.x0, cfg.domain.y1 - cfg.domain.y0)
    if reach > 0.1 * half_width:
        warnings.append(
            f"largest displacement per step {reach:.3g} exceeds 10% of the domain half-width "
            f"{half_width:g}; the outside policy influences the solution"
        )
    return warnings


def control_offsets(cs: ControlSet, ds: DirectionSet, epsilon: float, h: float):
    """Per-(direction, step) displacements in node units, shape ``(n_dir, n_s)``."""
    step = epsilon * cs.s_values / h
    jump = epsilon * epsilon * cs.f_values / h
    ax = step[None, :] * ds.directions[:, 0:1]
    ay = step[None, :] * ds.directions[:, 1:2]
    cx = jump[None, :] * ds.perps[:, 0:1]
    cy = jump[None, :] * ds.perps[:, 1:2]
    return ax, ay, cx, cy


def _wedge(nx: int, ny: int, symmetry: str):
    """Rows and column ranges that determine the whole slice under ``symmetry``."""
    if symmetry == "off":
        rows = np.arange(ny, dtype=np.int64)
        return rows, np.zeros(ny, dtype=np.int64), np.full(ny, nx, dtype=np.int64)
    rows = np.arange(ny // 2, ny, dtype=np.int64)
    if symmetry == "d2":
        return rows, np.full(rows.size, nx // 2, dtype=np.int64), np.full(rows.size, nx, dtype=np.int64)
    # d4 on a square grid: the octant i >= j of the upper right quadrant.
    return rows, rows.copy(), np.full(rows.size, nx, dtype=np.int64)


def _unfold(out: np.ndarray, symmetry: str) -> None:
    ny, nx = out.shape
    if symmetry == "off":
        return
    if symmetry == "d4":
        q = out[ny // 2 :, nx // 2 :]
        upper = np.triu(q)
        q[...] = upper + np.triu(q, 1).T
    out[:, : nx // 2] = out[:, ::-1][:, : nx // 2]
    out[: ny // 2, :] = out[::-1, :][: ny // 2, :]


def _resolve_threads(threads: int) -> int:
    return threads if threads > 0 else (os.cpu_count() or 1)


def game_step(
    u_next: ScalarField,
    cs: ControlSet,
    ds: DirectionSet,
    epsilon: float,
    policy: OutsidePolicy = ClampNearest(),
    *,
    threads: int = 1,
    symmetry: str = "off",
) -> ScalarField:
    """One backward step of the game over every node of ``u_next``'s grid.

    ``symmetry`` ("off", "d2" or "d4") asserts that the data, the grid and the
    direction set are invariant under that group about the grid centre; only a
    fundamental region is then computed and the rest is mirrored.  The value
    at each node does not depend on ``threads``.
    """
    if len(cs.s_values) == 0 or ds.l0 == 0:
        raise ValueError("empty control or direction set")
    if isinstance(policy, AnalyticInitial) and not isinstance(policy.func, ClosedForm):
        return _game_step_vectorized(u_next, cs, ds, epsilon, policy)
    if symmetry == "d4" and u_next.nx != u_next.ny:
        raise ValueError("d4 symmetry needs a square grid")

    # Negated directions give the same four points with the signs swapped.
    ax, ay, cx, cy = control_offsets(cs, ds.half(), epsilon, u_next.h)
    if isinstance(policy, AnalyticInitial):
        mode = _kernels.ANALYTIC
        kind = policy.func.kind
        p0, p1, p2 = policy.func.params
    else:
        mode = _kernels.CLAMP
        kind, p0, p1, p2 = 0, 0.0, 0.0, 0.0
    u = np.ascontiguousarray(u_next.values)
    out = np.empty_like(u)
    rows, lo, hi = _wedge(u_next.nx, u_next.ny, symmetry)
    ox, oy = u_next.origin
    args = (ax, ay, cx, cy, mode, ox, oy, u_next.h, kind, p0, p1, p2)

    n_workers = min(_resolve_threads(threads), rows.size)
    if n_workers <= 1:
        _kernels.game_rows(u, out, rows, lo, hi, *args)
    else:
        chunks = np.array_split(np.arange(rows.size), n_workers)
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            jobs = [pool.submit(_kernels.game_rows, u, out, rows[c], lo[c], hi[c], *args) for c in chunks]
            for job in jobs:
                job.result()
    _unfold(out, symmetry)
    if not np.all(np.isfinite(out)):
        raise SolverFault("game step produced non-finite values")
    return u_next.with_values(out)


def _game_step_vectorized(u_next, cs, ds, epsilon, policy):
    # Generic exterior functions cannot enter the compiled kernel.
    ny, nx = u_next.values.shape
    jj, ii = np.meshgrid(np.arange(ny, dtype=float), np.arange(nx, dtype=float), indexing="ij")
    ax, ay, cx, cy = control_offsets(cs, ds.half(), epsilon, u_next.h)
    best = np.full((ny, nx), np.inf)
    for d in range(ax.shape[0]):
        for k in range(ax.shape[1]):
            worst = np.full((ny, nx), -np.inf)
            for b in (-1.0, 1.0):
                for beta in (-1.0, 1.0):
                    fx = (ii + b * ax[d, k]) + beta * cx[d, k]
                    fy = (jj + b * ay[d, k]) + beta * cy[d, k]
                    np.maximum(worst, _sample_array(u_next, fx, fy, policy), out=worst)
            np.minimum(best, worst, out=best)
    if not np.all(np.isfinite(best)):
        raise SolverFault("game step produced non-finite values")
    return u_next.with_values(best)


def _sample_array(fld: ScalarField, fx, fy, policy):
    v = fld.values
    ny, nx = v.shape
    outside = (fx < 0.0) | (fy < 0.0) | (fx > nx - 1) | (fy > ny - 1)
    gx = np.clip(fx, 0.0, nx - 1.0)
    gy = np.clip(fy, 0.0, ny - 1.0)
    i0 = np.minimum(gx.astype(np.int64), nx - 2)
    j0 = np.minimum(gy.astype(np.int64), ny - 2)
    tx = gx - i0
    ty = gy - j0
    res = (1.0 - ty) * ((1.0 - tx) * v[j0, i0] + tx * v[j0, i0 + 1]) + ty * (
        (1.0 - tx) * v[j0 + 1, i0] + tx * v[j0 + 1, i0 + 1]
    )
    if isinstance(policy, AnalyticInitial) and outside.any():
        ox, oy = fld.origin
        res[outside] = policy.func(ox + fx[outside] * fld.h, oy + fy[outside] * fld.h)
    return res


def resolve_symmetry(cfg: GameConfig, fld: ScalarField, u0) -> str:
    """Largest grid symmetry the run provably has, or ``"off"``."""
    if cfg.symmetry == "off" or not isinstance(u0, ClosedForm):
        return "off"
    ox, oy = fld.origin
    tol = 1e-9 * fld.h
    centred_x = abs(ox + (ox + (fld.nx - 1) * fld.h)) <= tol
    centred_y = abs(oy + (oy + (fld.ny - 1) * fld.h)) <= tol
    if not (centred_x and centred_y) or cfg.l0 % 2:
        return "off"
    if u0.symmetry == "d4" and cfg.l0 % 4 == 0 and fld.nx == fld.ny and abs(ox - oy) <= tol:
        return "d4"
    return "d2"


def make_policy(cfg: GameConfig, u0, exact_family: Optional[Callable] = None) -> OutsidePolicy:
    if cfg.outside == "clamp":
        return ClampNearest()
    if cfg.outside == "exact":
        if exact_family is None:
            raise ValueError("outside='exact' needs the exact solution family")
        return AnalyticExact(exact_family)
    return AnalyticInitial(u0)


Observer = Callable[[int, float, ScalarField], None]


def solve_backward(
    cfg: GameConfig,
    u0: Callable,
    observer: Optional[Observer] = None,
    *,
    exact_family: Optional[Callable] = None,
) -> ScalarField:
    """Play the game backward from ``u0`` for ``n_steps(cfg)`` steps.

    ``observer(k, k * eps**2, slice)`` is called for ``k = 0 .. K``; the slice
    after ``k`` steps approximates the flow at physical time ``k * eps**2``.
    ``exact_family(t)`` is required when ``cfg.outside == "exact"``.
    """
    validate(cfg)
    K = n_steps(cfg)
    cs = cfg.controls()
    ds = cfg.directions()
    policy = make_policy(cfg, u0, exact_family)
    u = from_function(u0, cfg.domain, cfg.h)
    sym = resolve_symmetry(cfg, u, u0)
    eps2 = cfg.epsilon**2
    log.info(
        "solving %d steps on a %dx%d grid, %d directions x %d step lengths, symmetry %s",
        K, u.nx, u.ny, ds.l0, len(cs.s_values), sym,
    )
    if observer is not None:
        observer(0, 0.0, u)
    for k in range(1, K + 1):
        step_policy = policy.at((k - 1) * eps2) if isinstance(policy, AnalyticExact) else policy
        u = game_step(u, cs, ds, cfg.epsilon, step_policy, threads=cfg.threads, symmetry=sym)
        log.debug("step %d/%d done", k, K)
        if observer is not None:
            observer(k, k * eps2, u)
    return u


def reference_game_step(u_next: ScalarField, cs: ControlSet, ds: DirectionSet, epsilon: float, policy) -> np.ndarray:
    """Plain nested-loop evaluation over every direction, step and sign.

    Slow; meant for checking :func:`game_step` on small grids.
    """
    v = u_next.values
    ny, nx = v.shape
    h = u_next.h
    out = np.empty_like(v)
    for j in range(ny):
        for i in range(nx):
            best = math.inf
            for (vx, vy), (px, py) in zip(ds.directions.tolist(), ds.perps.tolist()):
                for s, f in zip(cs.s_values.tolist(), cs.f_values.tolist()):
                    step = epsilon * s / h
                    jump = epsilon * epsilon * f / h
                    worst = -math.inf
                    for b in (-1.0, 1.0):
                        for beta in (-1.0, 1.0):
                            zx = (i + b * (step * vx)) + beta * (jump * px)
                            zy = (j + b * (step * vy)) + beta * (jump * py)
                            worst = max(worst, sample_index(v, zx, zy, policy, u_next.origin, h))
                    best = min(best, worst)
            out[j, i] = best
    return out
