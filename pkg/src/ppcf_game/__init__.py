"""Two-person game approximation of positive power curvature flow for plane curves.

The value function of a deterministic min-max game is computed backward in
time on a uniform grid; its level sets approximate curves moving with normal
speed ``max(0, kappa)**gamma`` for ``1/3 < gamma < 1``.
"""

from .core_math import (
    AlphaWindow,
    GammaParams,
    alpha_window,
    alphas_from_scale,
    f_cost,
    make_gamma_params,
    phi,
    phi_s,
    s_maximizer,
)
from .controls import ControlSet, DirectionSet, control_interval, direction_set, discretize_controls
from .field import AnalyticInitial, Box, ClampNearest, ClosedForm, ScalarField, from_function, sample_bilinear
from .solver import GameConfig, game_step, n_steps, solve_backward, validate_scaling
from .analytic import (
    CircleBenchmark,
    EllipseBenchmark,
    ErrorReport,
    error_norms,
    exact_circle,
    track_errors,
    u0_circle,
    u0_ellipse,
)
from .levelset import Contour, contour_metrics, extract_contour

__version__ = "0.1.0"

__all__ = [
    "AlphaWindow",
    "AnalyticInitial",
    "Box",
    "CircleBenchmark",
    "ClampNearest",
    "ClosedForm",
    "Contour",
    "ControlSet",
    "DirectionSet",
    "EllipseBenchmark",
    "ErrorReport",
    "GameConfig",
    "GammaParams",
    "ScalarField",
    "alpha_window",
    "alphas_from_scale",
    "contour_metrics",
    "control_interval",
    "direction_set",
    "discretize_controls",
    "error_norms",
    "exact_circle",
    "extract_contour",
    "f_cost",
    "from_function",
    "game_step",
    "make_gamma_params",
    "n_steps",
    "phi",
    "phi_s",
    "s_maximizer",
    "sample_bilinear",
    "solve_backward",
    "track_errors",
    "u0_circle",
    "u0_ellipse",
    "validate_scaling",
]
