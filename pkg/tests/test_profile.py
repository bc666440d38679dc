import numpy as np
import pytest

from nsaclab import thermo
from nsaclab.errors import DomainError, StructureError
from nsaclab.landscape import LandscapeParams, gamma
from nsaclab.maxwell import maxwell_pair
from nsaclab.profile import (BACKWARD, FORWARD, ProfileTable, build_profile, gamma_along, hetero_y,
                             left_state, mirror, read_profile_csv, residual_check, right_state)
from nsaclab.thermo import ModelParams


def level_set_scan_y(c0, theta, params, n=400_001):
    """Brute force: scan Gamma(c0, y) on a dense y-grid for the saddle level crossing."""
    pair = maxwell_pair(theta, params)
    lp = LandscapeParams(theta, pair.pi_star)
    ys = np.linspace(0.0, 0.35, n)
    g = gamma(np.full_like(ys, c0), ys, lp, params) - pair.level
    k = np.flatnonzero(g[:-1] * g[1:] <= 0)[0]
    return ys[k] + (ys[k + 1] - ys[k]) * g[k] / (g[k] - g[k + 1])


def test_hetero_y_midpoint(params, theta_low):
    y = hetero_y(0.5, theta_low, params)
    assert y == pytest.approx(0.056, abs=0.006)
    assert y == pytest.approx(level_set_scan_y(0.5, theta_low, params), abs=1e-9)


def test_hetero_y_matches_scan_across_range(params, theta_low):
    for c in (0.31, 0.4, 0.62, 0.69):
        assert hetero_y(c, theta_low, params) == pytest.approx(level_set_scan_y(c, theta_low, params), abs=1e-8)


def test_hetero_y_vanishes_at_endpoints(params, theta_low):
    ys = hetero_y(np.array([0.3 + 1e-6, 0.7 - 1e-6]), theta_low, params)
    assert np.all(ys < 1e-5)


@pytest.mark.parametrize("c", [0.2, 0.3, 0.7, 0.85])
def test_hetero_y_outside_range(params, theta_low, c):
    with pytest.raises(StructureError):
        hetero_y(c, theta_low, params)


def test_profile_shape(fwd_profile):
    p = fwd_profile
    assert np.interp(0.0, p.x, p.c) == pytest.approx(0.5, abs=1e-12)
    assert p.x[-1] - p.x[0] >= 10.0
    assert p.direction == FORWARD
    assert np.all(np.diff(p.x) > 0)
    assert np.all(np.diff(p.c) > 0)
    assert np.all(np.diff(p.rho) > 0)
    assert p.c[0] == pytest.approx(0.3, abs=2e-4) and p.c[-1] == pytest.approx(0.7, abs=2e-4)


def test_profile_endpoint_pressure(fwd_profile):
    assert abs(fwd_profile.p[0] - fwd_profile.pi_star) <= 1e-6
    assert abs(fwd_profile.p[-1] - fwd_profile.pi_star) <= 1e-6


def test_gamma_constant_along_profile(params, fwd_profile):
    g = gamma_along(fwd_profile, params)
    assert np.max(np.abs(g - fwd_profile.endstates.level)) <= 1e-8


def test_residuals_converge_second_order(params, theta_low):
    r = [residual_check(build_profile(theta_low, params, n_samples=n), params) for n in (2001, 4001)]
    assert r[0][0] <= 1e-6 and r[0][1] <= 1e-4
    for k in range(2):
        assert 3.0 <= r[0][k] / r[1][k] <= 5.0


def test_residual_of_constant_table(params, theta_low):
    pair = maxwell_pair(theta_low, params)
    x = np.linspace(-5, 5, 101)
    one = np.ones_like(x)
    table = ProfileTable(x, pair.under.c * one, 0 * x, pair.under.rho * one, pair.pi_star * one,
                         pair, FORWARD, theta_low, params.delta)
    r_mom, r_ac = residual_check(table, params)
    assert r_mom <= 1e-12 and r_ac <= 1e-12


def test_delta_stretches_x(theta_low):
    a = build_profile(theta_low, ModelParams(delta=1.0))
    b = build_profile(theta_low, ModelParams(delta=4.0))
    assert np.array_equal(a.c, b.c)
    assert np.allclose(b.x, 2.0 * a.x, rtol=1e-13, atol=1e-12)
    assert residual_check(b, ModelParams(delta=4.0))[0] <= 1e-6


def test_width_grows_towards_critical_temperature(params):
    thetas = [0.90, 0.93, 0.96, 0.98, 0.99]
    profs = [build_profile(t, params, n_samples=501) for t in thetas]
    widths = [np.interp(0.9, (p.c - p.c[0]) / (p.c[-1] - p.c[0]), p.x)
              - np.interp(0.1, (p.c - p.c[0]) / (p.c[-1] - p.c[0]), p.x) for p in profs]
    amps = [p.endstates.over.c - p.endstates.under.c for p in profs]
    assert np.all(np.diff(widths) > 0)
    assert np.all(np.diff(amps) < 0)


def test_mirror_involution(fwd_profile):
    back = mirror(fwd_profile)
    twice = mirror(back)
    for name in ("x", "c", "y", "rho", "p"):
        assert np.array_equal(getattr(twice, name), getattr(fwd_profile, name))
    assert twice.direction == FORWARD


def test_backward_profile(params, theta_low, fwd_profile):
    back = build_profile(theta_low, params, direction=BACKWARD)
    assert back.direction == BACKWARD
    assert np.all(np.diff(back.c) < 0)
    assert left_state(back) == fwd_profile.endstates.over
    assert right_state(back) == fwd_profile.endstates.under
    m = mirror(fwd_profile)
    for name in ("x", "c", "y", "rho", "p"):
        assert np.array_equal(getattr(back, name), getattr(m, name))


def test_no_profile_above_critical_temperature(params, theta_high):
    with pytest.raises(StructureError):
        build_profile(theta_high, params)


def test_too_few_samples(params, theta_low):
    with pytest.raises(DomainError):
        build_profile(theta_low, params, n_samples=2)


def test_csv_round_trip(params, fwd_profile):
    back = read_profile_csv(fwd_profile.to_csv(), params)
    for name in ("x", "c", "y", "rho", "p"):
        assert np.array_equal(getattr(back, name), getattr(fwd_profile, name))
    assert back.theta == fwd_profile.theta
    assert back.direction == FORWARD
