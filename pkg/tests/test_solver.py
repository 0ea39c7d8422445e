import math

import numpy as np
import pytest

from ppcf_game.analytic import CircleBenchmark
from ppcf_game.controls import direction_set, discretize_controls
from ppcf_game.core_math import alphas_from_scale, make_gamma_params
from ppcf_game.field import CIRCLE, AnalyticInitial, Box, ClampNearest, ClosedForm, ScalarField, from_function
from ppcf_game.selfcheck import _small_instance
from ppcf_game.solver import (
    GameConfig,
    SolverFault,
    game_step,
    n_steps,
    reference_game_step,
    resolve_symmetry,
    solve_backward,
    validate,
    validate_scaling,
)


def small_cfg(**kw):
    base = dict(gamma=0.7, epsilon=0.2, h=0.1, l0=8, horizon_T=0.12, scale=0.5, r0=3,
                domain=Box(-1.0, -1.0, 1.0, 1.0))
    base.update(kw)
    return GameConfig(**base)


@pytest.mark.parametrize("n", range(0, 50, 7))
def test_kernel_matches_reference(n):
    fld, cs, ds, eps, policy = _small_instance(n)
    fast = game_step(fld, cs, ds, eps, policy).values
    np.testing.assert_array_equal(fast, reference_game_step(fld, cs, ds, eps, policy))


def test_vectorized_path_matches_kernel():
    fld, cs, ds, eps, _ = _small_instance(4)
    cf = ClosedForm(CIRCLE, (0.7, 0.3, 0.0))
    fast = game_step(fld, cs, ds, eps, AnalyticInitial(cf)).values
    slow = game_step(fld, cs, ds, eps, AnalyticInitial(lambda x, y: cf(x, y))).values
    np.testing.assert_array_equal(fast, slow)


def test_constant_field_is_fixed_point():
    fld, cs, ds, eps, _ = _small_instance(5)
    const = fld.with_values(np.full_like(fld.values, 2.5))
    np.testing.assert_array_equal(game_step(const, cs, ds, eps).values, const.values)


def test_step_never_exceeds_neighbourhood_max():
    fld, cs, ds, eps, _ = _small_instance(9)
    out = game_step(fld, cs, ds, eps).values
    assert out.max() <= fld.values.max()
    assert out.min() >= fld.values.min()


def test_non_finite_is_fault():
    fld, cs, ds, eps, _ = _small_instance(2)
    with pytest.raises(SolverFault):
        game_step(fld, cs, ds, eps, AnalyticInitial(lambda x, y: np.full(np.shape(x), np.nan)))


def test_thread_count_does_not_change_values():
    fld, cs, ds, eps, policy = _small_instance(13)
    one = game_step(fld, cs, ds, eps, policy, threads=1).values
    for t in (2, 3, 0):
        np.testing.assert_array_equal(game_step(fld, cs, ds, eps, policy, threads=t).values, one)


@pytest.mark.parametrize("mode,l0", [("d2", 6), ("d4", 8), ("d4", 12)])
def test_symmetry_reduction_matches_full(mode, l0):
    p = make_gamma_params(0.7)
    cs = discretize_controls(0.2, alphas_from_scale(p, 0.5), p, r0=5)
    ds = direction_set(l0)
    u0 = ClosedForm(CIRCLE, (0.7, 0.6, 0.0), "d4")
    fld = from_function(u0, Box(-1, -1, 1, 1), 0.1)
    policy = AnalyticInitial(u0)
    full = game_step(fld, cs, ds, 0.2, policy).values
    red = game_step(fld, cs, ds, 0.2, policy, symmetry=mode).values
    np.testing.assert_allclose(red, full, rtol=0, atol=1e-13)


def test_resolve_symmetry():
    u0 = ClosedForm(CIRCLE, (0.7, 1.0, 0.0), "d4")
    cfg = small_cfg(symmetry="auto")
    fld = from_function(u0, cfg.domain, cfg.h)
    assert resolve_symmetry(cfg, fld, u0) == "d4"
    assert resolve_symmetry(cfg.replace(l0=6), fld, u0) == "d2"
    assert resolve_symmetry(cfg.replace(l0=7), fld, u0) == "off"
    assert resolve_symmetry(cfg.replace(symmetry="off"), fld, u0) == "off"
    assert resolve_symmetry(cfg, fld, lambda x, y: x) == "off"
    shifted = from_function(u0, Box(-1, -1, 1.2, 1), 0.1)
    assert resolve_symmetry(cfg, shifted, u0) == "off"


def test_n_steps():
    cfg = small_cfg(epsilon=0.08, horizon_T=0.12)
    assert n_steps(cfg) == 18
    assert n_steps(small_cfg(epsilon=0.04, horizon_T=0.12)) == 75
    assert n_steps(small_cfg(epsilon=0.02, horizon_T=0.12)) == 300


def test_config_errors():
    with pytest.raises(ValueError):
        small_cfg(scale=None)
    with pytest.raises(ValueError):
        small_cfg(scale=None, alpha1=0.3)
    with pytest.raises(ValueError):
        small_cfg(ds=0.1)
    with pytest.raises(ValueError):
        small_cfg(outside="zero")
    with pytest.raises(ValueError):
        validate(small_cfg(horizon_T=0.01))
    with pytest.raises(ValueError):
        validate(small_cfg(gamma=0.3))
    validate(small_cfg(scale=None, alpha1=0.3, alpha2=0.1))


def test_scaling_warnings():
    cfg = GameConfig(gamma=0.7, epsilon=0.08, h=0.01, l0=160, horizon_T=0.12, scale=0.9, ds=0.01)
    warns = validate_scaling(cfg)
    # Normal jump 0.08**2 * c * s_lo**(-14/3) = 0.51097 > 0.2.
    assert len(warns) == 1 and "displacement" in warns[0] and "0.511" in warns[0]
    coarse = validate_scaling(cfg.replace(h=0.04))
    assert any("eps**(4/3)=0.03447" in w for w in coarse)
    big = cfg.replace(domain=Box(-10, -10, 10, 10))
    assert validate_scaling(big) == []


def test_solve_backward_observer_sequence():
    bench = CircleBenchmark(0.7, 0.8)
    cfg = small_cfg(epsilon=0.2, horizon_T=0.125)
    seen = []
    last = solve_backward(cfg, bench.u0, lambda k, t, s: seen.append((k, t, s.values.copy())),
                          exact_family=bench.exact_at)
    assert [k for k, _, _ in seen] == [0, 1, 2, 3]
    assert [t for _, t, _ in seen] == pytest.approx([0.0, 0.04, 0.08, 0.12])
    np.testing.assert_array_equal(seen[-1][2], last.values)
    np.testing.assert_array_equal(seen[0][2], from_function(bench.u0, cfg.domain, cfg.h).values)


def test_solve_backward_exact_needs_family():
    with pytest.raises(ValueError):
        solve_backward(small_cfg(), ClosedForm(CIRCLE, (0.7, 1.0, 0.0)))


def test_symmetry_auto_matches_off_in_full_solve():
    bench = CircleBenchmark(0.7, 0.8)
    cfg = small_cfg(epsilon=0.2, horizon_T=0.08, outside="analytic")
    a = solve_backward(cfg, bench.u0)
    b = solve_backward(cfg.replace(symmetry="auto"), bench.u0)
    np.testing.assert_allclose(a.values, b.values, rtol=0, atol=1e-13)


def test_level_set_shrinks():
    bench = CircleBenchmark(0.7, 0.8)
    cfg = small_cfg(epsilon=0.2, horizon_T=0.12, h=0.05, l0=16, r0=8, symmetry="auto")
    u = solve_backward(cfg, bench.u0, exact_family=bench.exact_at)
    u0 = from_function(bench.u0, cfg.domain, cfg.h)
    assert np.count_nonzero(u.values == 0) < np.count_nonzero(u0.values == 0)
