"""Scalar functions of the flow exponent gamma.

The speed of the level-set equation is ``phi(kappa) = -|kappa|**gamma`` for
``kappa <= 0`` and ``0`` otherwise.  For nonpositive curvature it has the
representation

    phi(kappa) = sup_{s > 0} (kappa * s**2 / 2 - f(s)),
    f(s) = c_gamma * s**(2 gamma / (gamma - 1)),
    c_gamma = (1 - gamma) * (2 gamma)**(gamma / (1 - gamma)),

which is what lets the minimizing player's step length ``s`` reproduce the
power law.  The step lengths are restricted to ``[eps**alpha1, eps**-alpha2]``
with exponents taken from the window in :func:`alpha_window`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

GAMMA_MIN = 1.0 / 3.0
GAMMA_MAX = 1.0


@dataclass(frozen=True)
class GammaParams:
    gamma: float
    c_gamma: float
    cost_exponent: float


@dataclass(frozen=True)
class AlphaWindow:
    """Admissible exponents of the control interval and the bounds they satisfy.

    ``m1 < alpha1 < m2`` and ``0 < alpha2 < m3`` where ``m3`` depends on
    ``alpha1``.
    """

    m1: float
    m2: float
    alpha1: float
    m3: float
    alpha2: float


def make_gamma_params(gamma: float) -> GammaParams:
    gamma = float(gamma)
    if not math.isfinite(gamma):
        raise ValueError(f"gamma must be finite, got {gamma!r}")
    if not GAMMA_MIN < gamma < GAMMA_MAX:
        raise ValueError(f"gamma must lie in (1/3, 1), got {gamma!r}")
    c_gamma = (1.0 - gamma) * math.pow(2.0 * gamma, gamma / (1.0 - gamma))
    return GammaParams(gamma=gamma, c_gamma=c_gamma, cost_exponent=2.0 * gamma / (gamma - 1.0))


def f_cost(s, p: GammaParams):
    """Penalty ``c_gamma * s**cost_exponent`` paid for a step of length ``s``.

    Accepts a scalar or an array; every entry must be positive.
    """
    if np.ndim(s) == 0:
        s = float(s)
        if not s > 0.0:
            raise ValueError(f"step length must be positive, got {s!r}")
        return p.c_gamma * math.pow(s, p.cost_exponent)
    s = np.asarray(s, dtype=float)
    if not np.all(s > 0.0):
        raise ValueError("step lengths must be positive")
    return p.c_gamma * np.power(s, p.cost_exponent)


def phi(kappa: float, p: GammaParams) -> float:
    kappa = float(kappa)
    if kappa >= 0.0:
        return 0.0
    return -math.pow(-kappa, p.gamma)


def phi_s(kappa, s, p: GammaParams):
    """Payoff ``kappa * s**2 / 2 - f(s)`` of a fixed step length ``s``."""
    return kappa * s * s / 2.0 - f_cost(s, p)


def s_maximizer(kappa: float, p: GammaParams) -> float:
    """Unique maximizer of ``s -> phi_s(kappa, s)`` for negative curvature."""
    kappa = float(kappa)
    if not kappa < 0.0:
        raise ValueError(f"an interior maximizer exists only for kappa < 0, got {kappa!r}")
    g = p.gamma
    base = (g - 1.0) / (2.0 * g * p.c_gamma) * kappa
    return math.pow(base, (g - 1.0) / 2.0)


def alpha1_bounds(p: GammaParams) -> tuple[float, float]:
    g = p.gamma
    return (1.0 - g) / (2.0 * g), min(1.0, (1.0 - g) / g)


def alpha2_bound(p: GammaParams, alpha1: float) -> float:
    g = p.gamma
    return min(alpha1 * 2.0 * g / (1.0 - g) - 1.0, 1.0 / 3.0)


def alpha_window(p: GammaParams, alpha1: float, alpha2: float) -> AlphaWindow:
    """Validate explicitly chosen exponents against the admissible window."""
    m1, m2 = alpha1_bounds(p)
    alpha1, alpha2 = float(alpha1), float(alpha2)
    if not m1 < alpha1 < m2:
        raise ValueError(f"alpha1={alpha1!r} outside ({m1:.6g}, {m2:.6g}) for gamma={p.gamma}")
    m3 = alpha2_bound(p, alpha1)
    if not 0.0 < alpha2 < m3:
        raise ValueError(f"alpha2={alpha2!r} outside (0, {m3:.6g}) for alpha1={alpha1}")
    return AlphaWindow(m1=m1, m2=m2, alpha1=alpha1, m3=m3, alpha2=alpha2)


def alphas_from_scale(p: GammaParams, scale: float) -> AlphaWindow:
    """Place both exponents at the same relative position ``scale`` of their ranges."""
    scale = float(scale)
    if not 0.0 < scale < 1.0:
        raise ValueError(f"scale must lie in (0, 1), got {scale!r}")
    m1, m2 = alpha1_bounds(p)
    alpha1 = m1 + scale * (m2 - m1)
    m3 = alpha2_bound(p, alpha1)
    return AlphaWindow(m1=m1, m2=m2, alpha1=alpha1, m3=m3, alpha2=scale * m3)
