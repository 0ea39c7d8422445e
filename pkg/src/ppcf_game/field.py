"""Grid functions, bilinear sampling and the policy for points off the grid."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Union

import numpy as np
from numba import njit

# Closed-form kinds understood by the compiled kernels.
CIRCLE = 1
ELLIPSE = 2


@dataclass(frozen=True)
class Box:
    x0: float
    y0: float
    x1: float
    y1: float

    def __post_init__(self):
        if not (self.x1 > self.x0 and self.y1 > self.y0):
            raise ValueError(f"empty box {self}")

    @classmethod
    def parse(cls, text: str) -> "Box":
        parts = [float(t) for t in text.replace(" ", "").split(",")]
        if len(parts) != 4:
            raise ValueError(f"box needs four comma separated numbers, got {text!r}")
        return cls(*parts)

    def __str__(self) -> str:
        return f"{self.x0!r},{self.y0!r},{self.x1!r},{self.y1!r}"

    def contains(self, x, y):
        return (x >= self.x0) & (x <= self.x1) & (y >= self.y0) & (y <= self.y1)


@njit(cache=True, nogil=True)
def closed_form_value(kind, p0, p1, p2, x, y):
    """Scalar closed forms ``max(g(x, y), 0)**2``.

    CIRCLE:  g = |x|**(p0 + 1) - p1**(p0 + 1) + p2, with p0 = gamma, p1 = R0 and
             p2 = (gamma + 1) * t.
    ELLIPSE: g = (x**2 + p1 * y**2)**((p0 + 1) / 2) - 1 + p2.
    """
    if kind == CIRCLE:
        g = math.pow(math.sqrt(x * x + y * y), p0 + 1.0) - math.pow(p1, p0 + 1.0) + p2
    else:
        g = math.pow(x * x + p1 * y * y, 0.5 * (p0 + 1.0)) - 1.0 + p2
    if g <= 0.0:
        return 0.0
    return g * g


@njit(cache=True)
def _closed_form_array(kind, p0, p1, p2, x, y):
    out = np.empty(x.shape)
    xf = x.ravel()
    yf = y.ravel()
    of = out.ravel()
    for n in range(xf.size):
        of[n] = closed_form_value(kind, p0, p1, p2, xf[n], yf[n])
    return out


@dataclass(frozen=True)
class ClosedForm:
    """A benchmark function the compiled solver can evaluate anywhere in the plane.

    ``symmetry`` names the grid symmetries the function has about the origin:
    ``"d4"`` (square group) or ``"d2"`` (both axis reflections).
    """

    kind: int
    params: tuple[float, float, float]
    symmetry: str = "d2"

    def __call__(self, x, y):
        if np.ndim(x) == 0 and np.ndim(y) == 0:
            return closed_form_value(self.kind, *self.params, float(x), float(y))
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        return _closed_form_array(self.kind, *self.params, np.ascontiguousarray(x), np.ascontiguousarray(y))


@dataclass(frozen=True)
class ClampNearest:
    """Project exterior points onto the grid and interpolate there."""


@dataclass(frozen=True)
class AnalyticInitial:
    """Evaluate a fixed function of position at exterior points.

    ``func`` takes ``(x, y)``.  A :class:`ClosedForm` runs inside the compiled
    kernel; any other callable forces the slow vectorized path.
    """

    func: Callable


OutsidePolicy = Union[ClampNearest, AnalyticInitial]


@dataclass(frozen=True)
class ScalarField:
    """Values on the nodes ``origin + (i h, j h)``, stored as ``values[j, i]``."""

    origin: tuple[float, float]
    h: float
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = self.values
        if v.ndim != 2 or v.shape[0] < 2 or v.shape[1] < 2:
            raise ValueError(f"need at least a 2x2 grid, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("field contains non-finite values")
        if not self.h > 0.0:
            raise ValueError(f"grid step must be positive, got {self.h!r}")

    @property
    def nx(self) -> int:
        return self.values.shape[1]

    @property
    def ny(self) -> int:
        return self.values.shape[0]

    @property
    def xs(self) -> np.ndarray:
        return self.origin[0] + self.h * np.arange(self.nx)

    @property
    def ys(self) -> np.ndarray:
        return self.origin[1] + self.h * np.arange(self.ny)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.xs, self.ys)

    @property
    def box(self) -> Box:
        ox, oy = self.origin
        return Box(ox, oy, ox + (self.nx - 1) * self.h, oy + (self.ny - 1) * self.h)

    def with_values(self, values: np.ndarray) -> "ScalarField":
        return ScalarField(self.origin, self.h, values)

    def to_csv(self, path) -> None:
        """Write ``x,y,value`` rows in row-major node order at full precision."""
        X, Y = self.mesh()
        table = np.column_stack([X.ravel(), Y.ravel(), self.values.ravel()])
        np.savetxt(Path(path), table, fmt="%.17g", delimiter=",", header="x,y,value", comments="")


def grid_shape(domain: Box, h: float) -> tuple[int, int]:
    if not h > 0.0:
        raise ValueError(f"grid step must be positive, got {h!r}")
    # The tolerance keeps widths like 4 / 0.01 from losing a node to rounding.
    nx = math.floor((domain.x1 - domain.x0) / h + 1e-9) + 1
    ny = math.floor((domain.y1 - domain.y0) / h + 1e-9) + 1
    if nx < 2 or ny < 2:
        raise ValueError(f"box {domain} is smaller than one cell of size {h}")
    return nx, ny


def from_function(f: Callable, domain: Box, h: float) -> ScalarField:
    """Sample ``f(x, y)`` (vectorized over arrays) at the nodes of ``domain``."""
    nx, ny = grid_shape(domain, h)
    xs = domain.x0 + h * np.arange(nx)
    ys = domain.y0 + h * np.arange(ny)
    X, Y = np.meshgrid(xs, ys)
    values = np.broadcast_to(np.asarray(f(X, Y), dtype=float), X.shape).copy()
    return ScalarField((float(domain.x0), float(domain.y0)), float(h), values)


def sample_index(values: np.ndarray, fx: float, fy: float, policy: OutsidePolicy, origin, h) -> float:
    """Bilinear sample at fractional node coordinates ``(fx, fy)``.

    This is the reference definition the compiled kernel reproduces bit for
    bit: points outside ``[0, nx-1] x [0, ny-1]`` go to the policy, the lower
    cell corner is clamped so the last row and column are reachable.
    """
    ny, nx = values.shape
    if fx < 0.0 or fy < 0.0 or fx > nx - 1 or fy > ny - 1:
        if isinstance(policy, AnalyticInitial):
            return float(policy.func(origin[0] + fx * h, origin[1] + fy * h))
        fx = min(max(fx, 0.0), nx - 1.0)
        fy = min(max(fy, 0.0), ny - 1.0)
    i0 = min(int(fx), nx - 2)
    j0 = min(int(fy), ny - 2)
    tx = fx - i0
    ty = fy - j0
    v = values
    return (1.0 - ty) * ((1.0 - tx) * v[j0, i0] + tx * v[j0, i0 + 1]) + ty * (
        (1.0 - tx) * v[j0 + 1, i0] + tx * v[j0 + 1, i0 + 1]
    )


def _to_index(c: float, o: float, h: float) -> float:
    f = (c - o) / h
    r = round(f)
    # Snap round-off so node coordinates reproduce stored values exactly.
    if abs(f - r) <= 1e-9:
        return float(r)
    return f


def sample_bilinear(fld: ScalarField, point, policy: OutsidePolicy = ClampNearest()) -> float:
    x, y = float(point[0]), float(point[1])
    fx = _to_index(x, fld.origin[0], fld.h)
    fy = _to_index(y, fld.origin[1], fld.h)
    if isinstance(policy, AnalyticInitial) and (fx < 0.0 or fy < 0.0 or fx > fld.nx - 1 or fy > fld.ny - 1):
        return float(policy.func(x, y))
    return sample_index(fld.values, fx, fy, policy, fld.origin, fld.h)
