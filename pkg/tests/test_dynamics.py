import math

import numpy as np
import pytest

from geodiscord.discord import OptimizerConfig, closed_form, discord_formula, minimize_numeric
from geodiscord.dynamics import (
    PhaseFlipParams,
    TrajectoryPoint,
    decay_factor,
    detect_sudden_change,
    evolved_discord,
    phase_flip_kraus,
    sudden_change_time,
    trajectory,
)
from geodiscord.family import PauliFamilyState, coefficients_of, family_matrix, random_family_state, to_density_matrix
from geodiscord.qcore import ParameterError, apply_kraus, check_density_matrix

FIG_A1 = (0.8, 0.4, 0.5)
FIG_A2 = (3 / 7, 3 / 14, 0.8)
FIG_A3 = (0.8, 0.4, 0.0)


def formal(n, c):
    return PauliFamilyState(n, c, check=False)


def test_kraus_no_decay():
    k0, k1 = phase_flip_kraus(2, 1.0)
    np.testing.assert_array_equal(k0, np.eye(4))
    np.testing.assert_array_equal(k1, np.zeros((4, 4)))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
@pytest.mark.parametrize("gamma", [0.0, 0.3, 1.0])
def test_kraus_completeness(n, gamma):
    ops = phase_flip_kraus(n, gamma)
    np.testing.assert_allclose(sum(k.conj().T @ k for k in ops), np.eye(2**n), atol=1e-15)


@pytest.mark.parametrize("gamma", [-0.1, 1.1])
def test_kraus_rejects_gamma(gamma):
    with pytest.raises(ParameterError):
        phase_flip_kraus(2, gamma)


def test_full_dephasing():
    out = apply_kraus(family_matrix(2, FIG_A1), phase_flip_kraus(2, 0.0))
    np.testing.assert_allclose(out, family_matrix(2, (0, 0, 0.5)), atol=1e-15)


@pytest.mark.parametrize("n", [2, 3])
def test_half_decay_rescales_transverse_coefficients(n):
    out = apply_kraus(family_matrix(n, FIG_A1), phase_flip_kraus(n, 0.5))
    np.testing.assert_allclose(out, family_matrix(n, (0.4, 0.2, 0.5)), atol=1e-15)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_channel_output_is_state(rng, n):
    s = random_family_state(n, rng)
    check_density_matrix(apply_kraus(to_density_matrix(s), phase_flip_kraus(n, rng.uniform())))


def test_evolved_discord_examples():
    s = formal(2, FIG_A1)
    assert evolved_discord(s, 1.0) == closed_form(s, allow_unphysical=True)
    assert evolved_discord(s, 0.625) == pytest.approx(0.078125, abs=1e-15)
    assert evolved_discord(formal(2, FIG_A3), 0.5) == pytest.approx(0.01, abs=1e-15)


def test_evolved_discord_equals_closed_form_of_effective_state(rng):
    for n in (2, 3, 4):
        s = random_family_state(n, rng)
        g = rng.uniform()
        assert evolved_discord(s, g) == discord_formula(n, (g * s.c[0], g * s.c[1], s.c[2]))


@pytest.mark.parametrize("n", [2, 3])
def test_evolved_discord_matches_numeric_minimum_after_channel(rng, n):
    for _ in range(3):
        s = random_family_state(n, rng)
        g = float(rng.uniform())
        out = apply_kraus(to_density_matrix(s), phase_flip_kraus(n, g))
        res = minimize_numeric(out, OptimizerConfig(restarts=4, seed=0))
        assert res.value == pytest.approx(evolved_discord(s, g), abs=1e-6)


def test_sudden_change_time_examples():
    assert sudden_change_time(formal(2, FIG_A1), 1.0) == pytest.approx(2 * math.log(1.6), abs=1e-15)
    assert sudden_change_time(formal(2, FIG_A1), 1.0) == pytest.approx(0.940007, abs=1e-6)
    assert sudden_change_time(formal(2, FIG_A2), 1.0) is None
    assert sudden_change_time(formal(2, FIG_A3), 1.0) is None
    assert sudden_change_time(formal(2, (0.5, 0.1, -0.5)), 1.0) == 0.0


def test_sudden_change_time_solves_crossing(rng):
    for _ in range(20):
        s = random_family_state(3, rng)
        tau = rng.uniform(0.1, 3)
        t0 = sudden_change_time(s, tau)
        if t0 is None:
            continue
        top = max(abs(s.c[0]), abs(s.c[1]))
        assert t0 >= 0
        assert decay_factor(t0, tau) * top == pytest.approx(abs(s.c[2]), rel=1e-12)


def test_sudden_change_time_independent_of_n():
    for c in [FIG_A1, (0.3, -0.6, 0.2), (0.1, 0.1, 0.6)]:
        vals = {sudden_change_time(formal(n, c), 1.3) for n in (2, 3, 4, 5)}
        assert len(vals) == 1


def test_sudden_change_time_rejects_tau():
    with pytest.raises(ParameterError):
        sudden_change_time(formal(2, FIG_A1), 0.0)


def test_decay_factor_monotone():
    t = np.linspace(0, 5, 50)
    g = decay_factor(t, 0.7)
    assert g[0] == 1.0
    assert np.all(np.diff(g) < 0)


def test_params_validation():
    for bad in [(0, 1, 10), (1, 0, 10), (1, 1, 1)]:
        with pytest.raises(ParameterError):
            PhaseFlipParams(*bad)


def test_trajectory_inserts_kink_sample():
    s = formal(2, FIG_A1)
    pts = trajectory(s, PhaseFlipParams(1.0, 4.0, 200))
    assert len(pts) == 201
    assert pts[0].t == 0 and pts[0].discord == closed_form(s, allow_unphysical=True)
    t0 = 2 * math.log(1.6)
    at = [p for p in pts if p.t == t0]
    assert len(at) == 1 and at[0].discord == pytest.approx(0.078125, abs=1e-12)
    assert [p.t for p in pts] == sorted(p.t for p in pts)
    for p in pts:
        assert p.gamma == pytest.approx(math.exp(-p.t / 2), rel=1e-14)
        assert p.c_effective == (p.gamma * 0.8, p.gamma * 0.4, 0.5)


def test_trajectory_without_kink_has_uniform_grid():
    pts = trajectory(formal(2, FIG_A2), PhaseFlipParams(1.0, 4.0, 200))
    assert len(pts) == 200
    assert pts[-1].t == 4.0


def test_halving_across_n():
    params = PhaseFlipParams(1.0, 4.0, 50)
    runs = {n: trajectory(formal(n, FIG_A1), params) for n in (2, 3, 4)}
    for a, b, c in zip(runs[2], runs[3], runs[4]):
        assert a.t == b.t == c.t
        assert a.discord == 2 * b.discord == 4 * c.discord


def _one_sided_slopes(s, t0, tau=1.0, h=1e-5):
    d = lambda t: evolved_discord(s, float(decay_factor(t, tau)))
    return (d(t0) - d(t0 - h)) / h, (d(t0 + h) - d(t0)) / h, d


def test_kink_is_a_slope_jump_not_a_value_jump():
    s = formal(2, FIG_A1)
    t0 = sudden_change_time(s, 1.0)
    left, right, d = _one_sided_slopes(s, t0)
    # within-side variation of the difference quotient over the same step
    l2 = (d(t0 - 1e-5) - d(t0 - 2e-5)) / 1e-5
    r2 = (d(t0 + 2e-5) - d(t0 + 1e-5)) / 1e-5
    within = max(abs(left - l2), abs(right - r2))
    assert abs(right - left) > 10 * within
    assert abs(d(t0 + 1e-9) - d(t0 - 1e-9)) < 1e-9


@pytest.mark.parametrize("c", [FIG_A1, (0.9, 0.1, 0.3), (0.5, 0.2, 0.12), (-0.6, 0.3, 0.4)])
@pytest.mark.parametrize("insert", [True, False])
def test_detector_finds_kink(c, insert):
    s = formal(2, c)
    pts = trajectory(s, PhaseFlipParams(1.0, 4.0, 200))
    if not insert:
        grid = {4.0 * i / 199 for i in range(200)}
        pts = [p for p in pts if p.t in grid]
    assert detect_sudden_change(pts) == pytest.approx(sudden_change_time(s, 1.0), abs=1e-4)


@pytest.mark.parametrize("c", [FIG_A2, FIG_A3, (0, 0, 0.5), (1e-4, 0, 0.5), (0, 0, 0)])
def test_detector_quiet_on_smooth_curves(c):
    pts = trajectory(formal(2, c), PhaseFlipParams(1.0, 4.0, 200))
    assert detect_sudden_change(pts) is None


def test_detector_needs_enough_samples():
    pts = [TrajectoryPoint(t, 1.0, (0, 0, 0), abs(t - 0.5)) for t in np.linspace(0, 1, 5)]
    assert detect_sudden_change(pts) is None
