import math

import numpy as np
import pytest
from scipy.optimize import fsolve

from nsaclab import thermo
from nsaclab.errors import StructureError
from nsaclab.maxwell import (NO_TWO_SADDLE, equilibrium_c, maxwell_pair, pi_star, saddle_gap)
from nsaclab.thermo import ModelParams, Polynomial

PARAMS = ModelParams()
P_STAR = thermo.critical_pressure(PARAMS)


def common_tangent(theta, params, guess):
    """Independent solve of G_c(lo) = G_c(hi) = 0 and G(lo) = G(hi) for (pi, lo, hi)."""
    def eqs(v):
        pi, lo, hi = v
        return [thermo.gibbs_c(pi, lo, theta, params), thermo.gibbs_c(pi, hi, theta, params),
                thermo.gibbs(pi, hi, theta, params) - thermo.gibbs(pi, lo, theta, params)]
    sol, info, ier, _ = fsolve(eqs, guess, full_output=True, xtol=1e-14)
    assert ier == 1
    return sol


def check_pair(pair, params):
    th = pair.theta
    p_u = thermo.pressure(pair.under.rho, pair.under.c, params)
    p_o = thermo.pressure(pair.over.rho, pair.over.c, params)
    assert abs(p_u - p_o) <= 1e-8
    assert abs(p_u - pair.pi_star) <= 1e-8
    assert abs(thermo.reaction_q(pair.under.rho, pair.under.c, th, params)) <= 1e-8
    assert abs(thermo.reaction_q(pair.over.rho, pair.over.c, th, params)) <= 1e-8
    assert pair.under.rho <= pair.over.rho


def test_equilibrium_roots_low_temperature():
    assert equilibrium_c(P_STAR, 0.92, PARAMS) == pytest.approx([0.3, 0.5, 0.7], abs=1e-8)


def test_equilibrium_single_root_high_temperature():
    roots = equilibrium_c(P_STAR, 1.16, PARAMS)
    assert roots == pytest.approx([0.5], abs=1e-8)
    # W_c is monotone for convex W
    c = np.linspace(0.01, 0.99, 99)
    assert np.all(np.diff(thermo.mixing_w(c, 1.16, PARAMS)[1]) > 0)


def test_equilibrium_triple_root_collapses():
    roots = equilibrium_c(P_STAR, 1.0, PARAMS)
    assert len(roots) == 1
    assert roots[0] == pytest.approx(0.5, abs=1e-4)


def test_saddle_gap_zero_at_p_star():
    assert abs(saddle_gap(P_STAR, 0.92, PARAMS)) <= 1e-12


def test_saddle_gap_sign():
    assert saddle_gap(P_STAR + 0.001, 0.92, PARAMS) < 0
    assert saddle_gap(P_STAR - 0.001, 0.92, PARAMS) > 0


def test_saddle_gap_slope_is_volume_difference():
    h = 1e-6
    for dpi in (-0.005, 0.0, 0.004):
        pi = P_STAR + dpi
        lo, _, hi = equilibrium_c(pi, 0.92, PARAMS)
        fd = (saddle_gap(pi + h, 0.92, PARAMS) - saddle_gap(pi - h, 0.92, PARAMS)) / (2 * h)
        assert fd == pytest.approx(thermo.tau_of(pi, hi, PARAMS) - thermo.tau_of(pi, lo, PARAMS), rel=1e-6)


def test_saddle_gap_strictly_monotone():
    gaps = [saddle_gap(P_STAR + d, 0.92, PARAMS) for d in np.linspace(-0.006, 0.006, 5)]
    assert np.all(np.diff(gaps) < 0)


def test_saddle_gap_above_critical_temperature():
    with pytest.raises(StructureError):
        saddle_gap(P_STAR, 1.16, PARAMS)


def test_pi_star_low_temperature():
    pi, pair = pi_star(0.92, PARAMS)
    assert abs(pi - P_STAR) <= 1e-10
    assert pair.under.c == pytest.approx(0.3, abs=1e-8)
    assert pair.over.c == pytest.approx(0.7, abs=1e-8)
    assert pair.under.rho == pytest.approx(0.60281, abs=1e-4)
    assert pair.over.rho == pytest.approx(1.00333, abs=1e-4)
    # densities from tau = c tau1 + (1 - c)/pi
    assert pair.under.rho == pytest.approx(1.0 / (0.15 + 0.7 / P_STAR), rel=1e-12)
    check_pair(pair, PARAMS)


def test_pi_star_half_gap():
    pi, pair = pi_star(0.98, PARAMS)
    assert abs(pi - P_STAR) <= 1e-10
    assert (pair.under.c, pair.over.c) == pytest.approx((0.4, 0.6), abs=1e-8)


def test_pi_star_above_critical_temperature():
    with pytest.raises(StructureError, match=NO_TWO_SADDLE):
        pi_star(1.16, PARAMS)


def test_pair_coalesces_at_critical_temperature():
    pair = maxwell_pair(PARAMS.theta_star, PARAMS)
    assert pair.under == pair.over
    assert pair.under.c == 0.5
    assert pair.pi_star == pytest.approx(P_STAR, abs=1e-14)


def test_pair_gap_shrinks_towards_critical_temperature():
    thetas = np.linspace(0.90, 0.999, 10)
    widths = [maxwell_pair(t, PARAMS).over.c - maxwell_pair(t, PARAMS).under.c for t in thetas]
    assert np.all(np.diff(widths) < 0)
    assert widths == pytest.approx([2 * math.sqrt((1 - t) / 2) for t in thetas], abs=1e-8)


@pytest.mark.parametrize("tau1", [0.2, 0.5, 0.8])
def test_pair_invariants_across_tau1(tau1):
    params = ModelParams(tau1=tau1)
    pair = maxwell_pair(params.theta_star - 0.05, params)
    check_pair(pair, params)


def test_asymmetric_w_against_common_tangent():
    params = ModelParams(w_spec=Polynomial(coeffs=[0, 0, 0, 0.1, 1], theta_coeffs=[0, 0, 1]))
    theta = params.theta_star - 0.08
    pi, pair = pi_star(theta, params)
    ref = common_tangent(theta, params, [P_STAR, 0.3, 0.7])
    assert pi == pytest.approx(ref[0], abs=1e-10)
    assert (pair.under.c, pair.over.c) == pytest.approx(tuple(ref[1:]), abs=1e-8)
    assert pi != pytest.approx(P_STAR, abs=1e-4)
    check_pair(pair, params)


def test_pair_serialises():
    d = maxwell_pair(0.92, PARAMS).to_dict()
    assert set(d) == {"theta", "pi_star", "level", "under", "over"}
    assert d["under"]["c"] == pytest.approx(0.3)
