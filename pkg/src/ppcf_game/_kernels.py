"""Compiled inner loops of one backward game step.

Positions are in fractional node units: node ``(i, j)`` sits at ``(i, j)`` and
a control ``(v, s)`` displaces it by ``b * a + beta * c`` with
``a = (eps * s / h) * v`` and ``c = (eps**2 * f(s) / h) * v_perp``.
"""

import math

import numpy as np
from numba import njit

from .field import closed_form_value

CLAMP = 0
ANALYTIC = 1


@njit(cache=True, nogil=True, inline="always")
def _sample(u, fx, fy, mode, ox, oy, h, kind, p0, p1, p2):
    ny, nx = u.shape
    if fx < 0.0 or fy < 0.0 or fx > nx - 1 or fy > ny - 1:
        if mode == ANALYTIC:
            return closed_form_value(kind, p0, p1, p2, ox + fx * h, oy + fy * h)
        fx = min(max(fx, 0.0), nx - 1.0)
        fy = min(max(fy, 0.0), ny - 1.0)
    i0 = min(int(fx), nx - 2)
    j0 = min(int(fy), ny - 2)
    tx = fx - i0
    ty = fy - j0
    return (1.0 - ty) * ((1.0 - tx) * u[j0, i0] + tx * u[j0, i0 + 1]) + ty * (
        (1.0 - tx) * u[j0 + 1, i0] + tx * u[j0 + 1, i0 + 1]
    )


@njit(cache=True, nogil=True, inline="always")
def _max4(u, x, y, a_x, a_y, c_x, c_y, bsign, bound, mode, ox, oy, h, kind, p0, p1, p2):
    # Max over the four sign choices, abandoned as soon as it reaches `bound`.
    # `bsign` only picks which b is tried first.
    px = x + bsign * a_x
    py = y + bsign * a_y
    w = _sample(u, px + c_x, py + c_y, mode, ox, oy, h, kind, p0, p1, p2)
    if w >= bound:
        return w
    v = _sample(u, px - c_x, py - c_y, mode, ox, oy, h, kind, p0, p1, p2)
    if v > w:
        w = v
    if w >= bound:
        return w
    px = x - bsign * a_x
    py = y - bsign * a_y
    v = _sample(u, px + c_x, py + c_y, mode, ox, oy, h, kind, p0, p1, p2)
    if v > w:
        w = v
    if w >= bound:
        return w
    v = _sample(u, px - c_x, py - c_y, mode, ox, oy, h, kind, p0, p1, p2)
    if v > w:
        w = v
    return w


@njit(cache=True, nogil=True)
def game_rows(u, out, rows, col_lo, col_hi, ax, ay, cx, cy, mode, ox, oy, h, kind, p0, p1, p2):
    """Fill ``out[j, col_lo[n]:col_hi[n]]`` for ``j = rows[n]``.

    The value is the exact min over controls of the exact max over signs, so
    neither the warm start nor the early exits change it.
    """
    ny, nx = u.shape
    nd, ns = ax.shape
    dw = 0
    kw = 0
    for n in range(rows.size):
        j = rows[n]
        y = float(j)
        jl = max(j - 1, 0)
        jr = min(j + 1, ny - 1)
        for i in range(col_lo[n], col_hi[n]):
            x = float(i)
            gx = u[j, min(i + 1, nx - 1)] - u[j, max(i - 1, 0)]
            gy = u[jr, i] - u[jl, i]
            # Start from the previous node's minimizer to get a tight bound early.
            a_x = ax[dw, kw]
            a_y = ay[dw, kw]
            bsign = 1.0 if gx * a_x + gy * a_y >= 0.0 else -1.0
            best = _max4(u, x, y, a_x, a_y, cx[dw, kw], cy[dw, kw], bsign, np.inf,
                         mode, ox, oy, h, kind, p0, p1, p2)
            for d in range(nd):
                for k in range(ns):
                    a_x = ax[d, k]
                    a_y = ay[d, k]
                    bsign = 1.0 if gx * a_x + gy * a_y >= 0.0 else -1.0
                    w = _max4(u, x, y, a_x, a_y, cx[d, k], cy[d, k], bsign, best,
                              mode, ox, oy, h, kind, p0, p1, p2)
                    if w < best:
                        best = w
                        dw = d
                        kw = k
            out[j, i] = best
