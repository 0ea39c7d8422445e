"""Built-in consistency checks run by ``ppcf-game selfcheck``.

Inputs come from fixed formulas rather than a random generator so two runs
print the same lines.
"""

from __future__ import annotations

import math
from dataclasses import replace
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .controls import direction_set, discretize_controls
from .core_math import GammaParams, alphas_from_scale, make_gamma_params, phi, phi_s, s_maximizer
from .field import AnalyticInitial, ClampNearest, ClosedForm, CIRCLE, ScalarField
from .solver import game_step, reference_game_step


class Check(NamedTuple):
    name: str
    ok: bool
    detail: str


def _hash01(*idx) -> float:
    x = math.sin(sum((n + 1) * 12.9898 * (k + 0.5) for n, k in enumerate(idx))) * 43758.5453
    return x - math.floor(x)


@lru_cache(maxsize=4)
def _unit_grid(n: int) -> np.ndarray:
    return np.geomspace(0.01, 100.0, n)


def sup_gap(kappa: float, p: GammaParams, n: int = 100_000) -> float:
    """``|phi(kappa) - max phi_s(kappa, s)|`` over ``n`` step lengths log-spaced in ``[s*/100, 100 s*]``."""
    s = s_maximizer(kappa, p) * _unit_grid(n)
    return abs(phi(kappa, p) - float(np.max(phi_s(kappa, s, p))))


def stationarity(kappa: float, p: GammaParams) -> float:
    s = s_maximizer(kappa, p)
    d = 1e-6 * s
    return abs(phi_s(kappa, s + d, p) - phi_s(kappa, s - d, p)) / (2.0 * d)


def check_sup_representation(c_gamma_factor: float = 1.0, count: int = 200) -> Check:
    worst = 0.0
    for n in range(count):
        kappa = -0.01 - 9.99 * _hash01(n, 1)
        gamma = 0.35 + 0.6 * _hash01(n, 2)
        p = make_gamma_params(gamma)
        p = replace(p, c_gamma=p.c_gamma * c_gamma_factor)
        worst = max(worst, sup_gap(kappa, p))
    return Check("sup-representation", worst <= 1e-6, f"max gap {worst:.3e} over {count} (kappa, gamma)")


def check_stationarity() -> Check:
    worst = 0.0
    for gamma in (0.4, 0.5, 0.7, 0.9):
        p = make_gamma_params(gamma)
        for kappa in -np.geomspace(0.01, 10.0, 50):
            worst = max(worst, stationarity(float(kappa), p))
    return Check("maximizer stationarity", worst < 1e-4, f"max |d phi_s/ds| {worst:.3e}")


def _small_instance(n: int):
    nx = 3 + n % 7
    ny = 3 + (n // 7) % 7
    h = 0.1 + 0.2 * _hash01(n, 3)
    values = np.array([[_hash01(n, i, j) for i in range(nx)] for j in range(ny)])
    fld = ScalarField((-0.5 * (nx - 1) * h, -0.5 * (ny - 1) * h), h, values)
    gamma = 0.4 + 0.5 * _hash01(n, 4)
    p = make_gamma_params(gamma)
    w = alphas_from_scale(p, 0.1 + 0.8 * _hash01(n, 5))
    eps = 0.05 + 0.2 * _hash01(n, 6)
    cs = discretize_controls(eps, w, p, r0=1 + n % 4)
    ds = direction_set(3 + n % 6)
    if n % 2:
        policy = ClampNearest()
    else:
        policy = AnalyticInitial(ClosedForm(CIRCLE, (gamma, 0.3, 0.0)))
    return fld, cs, ds, eps, policy


def check_oracle(count: int = 50) -> Check:
    mismatched = 0
    for n in range(count):
        fld, cs, ds, eps, policy = _small_instance(n)
        fast = game_step(fld, cs, ds, eps, policy).values
        slow = reference_game_step(fld, cs, ds, eps, policy)
        mismatched += not np.array_equal(fast, slow)
    return Check("brute-force oracle", mismatched == 0, f"{count - mismatched}/{count} instances bitwise equal")


def check_monotone_and_shift(count: int = 50) -> list[Check]:
    order_ok = True
    shift_err = 0.0
    for n in range(count):
        fld, cs, ds, eps, _ = _small_instance(n)
        bump = np.array([[_hash01(n, i, j, 7) for i in range(fld.nx)] for j in range(fld.ny)])
        upper = fld.with_values(fld.values + bump)
        lo = game_step(fld, cs, ds, eps, ClampNearest()).values
        hi = game_step(upper, cs, ds, eps, ClampNearest()).values
        order_ok &= bool(np.all(lo <= hi))
        c = 0.25 + _hash01(n, 8)
        shifted = game_step(fld.with_values(fld.values + c), cs, ds, eps, ClampNearest()).values
        shift_err = max(shift_err, float(np.max(np.abs(shifted - (lo + c)))))
    return [
        Check("monotonicity", order_ok, f"{count} ordered pairs"),
        Check("constant shift", shift_err <= 1e-12, f"max deviation {shift_err:.3e}"),
    ]


def run_selfcheck(c_gamma_factor: float = 1.0) -> list[Check]:
    """All checks; ``c_gamma_factor != 1`` corrupts the cost to show the first one can fail."""
    return [
        check_sup_representation(c_gamma_factor),
        check_stationarity(),
        check_oracle(),
        *check_monotone_and_shift(),
    ]
