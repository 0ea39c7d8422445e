"""Discrete control sets: step lengths ``s`` and unit directions ``v``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core_math import AlphaWindow, GammaParams, f_cost


@dataclass(frozen=True)
class ControlSet:
    s_values: np.ndarray
    s_lo: float
    s_hi: float
    f_values: np.ndarray

    @property
    def r0(self) -> int:
        return len(self.s_values) - 1

    @property
    def step(self) -> float:
        return (self.s_hi - self.s_lo) / self.r0


@dataclass(frozen=True)
class DirectionSet:
    """Unit vectors at angles ``2 pi l / l0`` and their counterclockwise perpendiculars.

    Entries are arranged so that the symmetries of the angle set hold
    bit-for-bit: ``directions[l0 - l]`` is the mirror image of
    ``directions[l]`` in the x axis, for even ``l0`` the second half is the
    exact negation of the first, and for ``l0`` divisible by 4 every entry is
    an exact quarter turn of the one ``l0 // 4`` places earlier.
    """

    directions: np.ndarray
    perps: np.ndarray

    @property
    def l0(self) -> int:
        return len(self.directions)

    def half(self) -> "DirectionSet":
        """First half of an even set; the rest are exact negations."""
        if self.l0 % 2:
            return self
        n = self.l0 // 2
        return DirectionSet(self.directions[:n], self.perps[:n])


def control_interval(epsilon: float, w: AlphaWindow) -> tuple[float, float]:
    epsilon = float(epsilon)
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon!r}")
    return math.pow(epsilon, w.alpha1), math.pow(epsilon, -w.alpha2)


def discretize_controls(
    epsilon: float,
    w: AlphaWindow,
    p: GammaParams,
    *,
    r0: int | None = None,
    ds: float | None = None,
) -> ControlSet:
    """Equidistant step lengths covering the control interval, endpoints included.

    Give either the cell count ``r0`` or a target spacing ``ds``.  In the
    latter case ``r0 = ceil(width / ds)`` and the spacing is recomputed so the
    upper endpoint is hit exactly.
    """
    if (r0 is None) == (ds is None):
        raise ValueError("give exactly one of r0 or ds")
    s_lo, s_hi = control_interval(epsilon, w)
    width = s_hi - s_lo
    if ds is not None:
        ds = float(ds)
        if not 0.0 < ds < width:
            raise ValueError(f"ds must lie in (0, {width:.6g}), got {ds!r}")
        r0 = math.ceil(width / ds)
    if int(r0) != r0 or r0 < 1:
        raise ValueError(f"r0 must be a positive integer, got {r0!r}")
    r0 = int(r0)
    step = width / r0
    s = s_lo + step * np.arange(r0 + 1, dtype=float)
    s[0] = s_lo
    s[-1] = s_hi
    s.setflags(write=False)
    f = np.asarray(f_cost(s, p), dtype=float)
    f.setflags(write=False)
    return ControlSet(s_values=s, s_lo=s_lo, s_hi=s_hi, f_values=f)


def _unit(l: int, l0: int) -> tuple[float, float]:
    if l0 % 4 == 0:
        q = l0 // 4
        turns, r = divmod(l, q)
        if 2 * r > q:
            y, x = _unit(q - r, l0)
        else:
            a = 2.0 * math.pi * r / l0
            x, y = math.cos(a), math.sin(a)
            if 2 * r == q:
                # cos and sin of pi/4 differ in the last bit.
                y = x
        for _ in range(turns):
            x, y = -y, x
        return x, y
    if l0 % 2 == 0 and 2 * l >= l0:
        x, y = _unit(l - l0 // 2, l0)
        return -x, -y
    if 2 * l > l0:
        x, y = _unit(l0 - l, l0)
        return x, -y
    a = 2.0 * math.pi * l / l0
    return math.cos(a), math.sin(a)


def direction_set(l0: int) -> DirectionSet:
    """Directions ``(cos, sin)(2 pi l / l0)`` for ``l = 0 .. l0 - 1``.

    The angle ``2 pi`` repeats ``l = 0`` and is left out.
    """
    if int(l0) != l0 or l0 < 3:
        raise ValueError(f"l0 must be an integer >= 3, got {l0!r}")
    l0 = int(l0)
    d = np.array([_unit(l, l0) for l in range(l0)], dtype=float)
    perp = np.column_stack([-d[:, 1], d[:, 0]])
    d.setflags(write=False)
    perp.setflags(write=False)
    return DirectionSet(directions=d, perps=perp)
