"""Acceptance criteria, one test per criterion.

Each test gathers named checks, prints a single PASS/FAIL line and then
asserts that every check held.
"""

import json
import math

import numpy as np
import pytest

from nsaclab import thermo
from nsaclab.cli import dispatch
from nsaclab.errors import StructureError
from nsaclab.figure import PI_OFFSETS, THETA_OFFSETS, FigureStyle, count_panels, render_figure
from nsaclab.landscape import (DEFAULT_WINDOW, MAXIMUM, SADDLE, LandscapeParams, contours,
                               evaluate_grid, find_critical_points)
from nsaclab.maxwell import maxwell_pair, pi_star, saddle_gap
from nsaclab.pde1d import (PERIODIC, ZERO_GRADIENT, Grid1D, advance, init_double_profile,
                           init_from_profile, measure_drift, run)
from nsaclab.profile import (build_profile, gamma_along, hetero_y, mirror, residual_check)
from nsaclab.thermo import ModelParams, NegLog
from nsaclab.twave import DENSIFYING, RAREFYING, distance_to_profile


class Checks:
    def __init__(self, number, title):
        self.number, self.title = number, title
        self.items = []

    def add(self, name, ok, detail=""):
        self.items.append((name, bool(ok), detail))

    def finish(self, capsys):
        failed = [(n, d) for n, ok, d in self.items if not ok]
        status = "PASS" if not failed else "FAIL"
        line = f"ACCEPTANCE {self.number} [{status}] {self.title} ({len(self.items) - len(failed)}/{len(self.items)} checks)"
        with capsys.disabled():
            print("\n" + line)
            for n, d in failed:
                print(f"    failed: {n} {d}")
        assert not failed, "; ".join(f"{n} {d}" for n, d in failed)


def bisection(g, lo, hi):
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        lo, hi = (mid, hi) if g(mid) > 0 else (lo, mid)
    return 0.5 * (lo + hi)


# 1 -------------------------------------------------------------------------------


def test_criterion_1_critical_pressure(capsys):
    ck = Checks(1, "critical pressure")
    for tau1, approx, tol in [(0.5, 0.46391, 2e-5), (0.2, 0.3985, 2e-4)]:
        code = dispatch(["crit", "--tau1", str(tau1)])
        out = capsys.readouterr().out
        ck.add(f"crit exit code tau1={tau1}", code == 0, f"got {code}")
        p = json.loads(out)["p_star"]
        oracle = bisection(lambda x: tau1 * x - math.log(x) - 1.0, 1e-6, 1.0)
        res = abs(tau1 * p - math.log(p) - 1.0)
        ck.add(f"residual tau1={tau1}", res <= 1e-12, f"{res:.2e}")
        ck.add(f"bisection oracle tau1={tau1}", abs(p - oracle) <= 1e-12, f"{p!r} vs {oracle!r}")
        ck.add(f"quoted value tau1={tau1}", abs(p - approx) <= tol, f"{p:.7f}")
    ck.finish(capsys)


# 2 -------------------------------------------------------------------------------


def test_criterion_2_maxwell_states(capsys):
    ck = Checks(2, "Maxwell states and no-flux pressure")
    params = ModelParams()
    p_star = thermo.critical_pressure(params)
    theta = params.theta_star - 0.08
    pi, pair = pi_star(theta, params)
    ck.add("pi* = p*", abs(pi - p_star) <= 1e-10, f"{pi - p_star:.2e}")
    ck.add("c under", abs(pair.under.c - 0.3) <= 1e-8, f"{pair.under.c!r}")
    ck.add("c over", abs(pair.over.c - 0.7) <= 1e-8, f"{pair.over.c!r}")
    ck.add("rho under", abs(pair.under.rho - 0.60281) <= 1e-4, f"{pair.under.rho:.6f}")
    ck.add("rho over", abs(pair.over.rho - 1.00333) <= 1e-4, f"{pair.over.rho:.6f}")
    ck.add("rho ordering", pair.under.rho < pair.over.rho)
    for name, st in (("under", pair.under), ("over", pair.over)):
        q = thermo.reaction_q(st.rho, st.c, theta, params)
        p = thermo.pressure(st.rho, st.c, params)
        ck.add(f"q({name}) = 0", abs(q) <= 1e-8, f"{q:.2e}")
        ck.add(f"p({name}) = pi*", abs(p - pi) <= 1e-8, f"{p - pi:.2e}")
    at_crit = maxwell_pair(params.theta_star, params)
    ck.add("coalescence at theta*", at_crit.under == at_crit.over and at_crit.under.c == 0.5)
    try:
        pi_star(params.theta_star + 0.16, params)
        ck.add("structure error above theta*", False, "no error raised")
    except StructureError as exc:
        ck.add("structure error above theta*", "no two-saddle configuration" in str(exc))
    ck.finish(capsys)


# 3 -------------------------------------------------------------------------------


def test_criterion_3_figure_topology(capsys):
    ck = Checks(3, "figure topology")
    params = ModelParams()
    p_star = thermo.critical_pressure(params)
    svg = render_figure(params=params, style=FigureStyle(n_cells=120))
    ck.add("15 panels", count_panels(svg) == 15, f"{count_panels(svg)}")
    assert THETA_OFFSETS[0] == 0.16 and THETA_OFFSETS[-1] == -0.08
    for dpi in PI_OFFSETS:
        lp = LandscapeParams(params.theta_star + 0.16, p_star + dpi)
        kinds = [cp.kind for cp in find_critical_points(lp, params)]
        ck.add(f"top row dpi={dpi:+.3f}: one saddle", kinds == [SADDLE], f"{kinds}")
    theta = params.theta_star - 0.08
    for dpi in PI_OFFSETS:
        pi = p_star + dpi
        kinds = [cp.kind for cp in find_critical_points(LandscapeParams(theta, pi), params)]
        ck.add(f"bottom row dpi={dpi:+.3f}: saddle-maximum-saddle", kinds == [SADDLE, MAXIMUM, SADDLE],
               f"found {kinds}")
        try:
            gap = saddle_gap(pi, theta, params)
        except StructureError as exc:
            ck.add(f"bottom row dpi={dpi:+.3f}: gap sign", False, f"({exc})")
            continue
        if dpi == 0.0:
            ck.add("gap zero at p*", abs(gap) <= 1e-12, f"{gap:.2e}")
        else:
            ck.add(f"bottom row dpi={dpi:+.3f}: gap sign", np.sign(gap) == -np.sign(dpi), f"gap {gap:.3e}")
    lp = LandscapeParams(theta, p_star)
    crit = find_critical_points(lp, params)
    n = 400
    c_min, c_max, y_min, y_max = DEFAULT_WINDOW
    diag = math.hypot((c_max - c_min) / n, (y_max - y_min) / n)
    lines = contours(lp, params, DEFAULT_WINDOW, n, [crit[0].level])
    near = lambda pl, c0: np.min(np.hypot(pl.c - c0, pl.y)) <= diag
    joins = [pl for pl in lines if near(pl, crit[0].point.c) and near(pl, crit[-1].point.c)]
    ck.add("saddle-level contour joins both saddles", bool(joins))
    ck.add("orbit above the maximum", any(pl.y.max() > 0.04 for pl in joins))
    ck.add("orbit below the maximum", any(pl.y.min() < -0.04 for pl in joins))
    ck.finish(capsys)


# 4 -------------------------------------------------------------------------------


def test_criterion_4_no_flux_profile(capsys):
    ck = Checks(4, "no-flux profile")
    params = ModelParams()
    theta = params.theta_star - 0.08
    prof = build_profile(theta, params, n_samples=2001)
    dev = float(np.max(np.abs(gamma_along(prof, params) - prof.endstates.level)))
    ck.add("Gamma constant", dev <= 1e-8, f"{dev:.2e}")
    r1 = residual_check(prof, params)
    r2 = residual_check(build_profile(theta, params, n_samples=4001), params)
    ck.add("momentum residual", r1[0] <= 1e-6, f"{r1[0]:.2e}")
    ck.add("Allen-Cahn residual", r1[1] <= 1e-4, f"{r1[1]:.2e}")
    for k, name in enumerate(("momentum", "Allen-Cahn")):
        ratio = r1[k] / r2[k]
        ck.add(f"{name} residual ratio ~4", 3.0 <= ratio <= 5.0, f"{ratio:.2f}")
    twice = mirror(mirror(prof))
    ck.add("mirror involution", all(np.array_equal(getattr(twice, f), getattr(prof, f))
                                    for f in ("x", "c", "y", "rho", "p")))
    y = hetero_y(0.5, theta, params)
    ck.add("y(0.5) ~ 0.056", abs(y - 0.056) <= 0.006, f"{y:.6f}")
    # brute force: crossing of the saddle level along the c = 0.5 column of a 2D grid
    lp = LandscapeParams(theta, prof.pi_star)
    cs, ys, Z = evaluate_grid(lp, params, (0.25, 0.75, 0.0, 0.2), 2000)
    col = Z[np.argmin(np.abs(cs - 0.5))] - prof.endstates.level
    k = np.flatnonzero(col[:-1] * col[1:] <= 0)[0]
    y_scan = ys[k] + (ys[k + 1] - ys[k]) * col[k] / (col[k] - col[k + 1])
    ck.add("y(0.5) matches level-set scan", abs(y - y_scan) <= 1e-6, f"{y:.8f} vs {y_scan:.8f}")
    ck.finish(capsys)


# 5 -------------------------------------------------------------------------------


def test_criterion_5_traveling_waves(capsys, wave, params):
    ck = Checks(5, "traveling waves")
    assert params.nu == 1.0
    for m in (1e-3, 5e-3, 1e-2, 2e-2):
        for sign in (1, -1):
            mm = sign * m
            fwd = wave(mm, "Forward")
            bwd = wave(mm, "Backward")
            ck.add(f"forward m={mm:+g}", fwd.classification == (DENSIFYING if mm > 0 else RAREFYING),
                   fwd.classification)
            ck.add(f"backward m={mm:+g}", bwd.classification == (RAREFYING if mm > 0 else DENSIFYING),
                   bwd.classification)
    theta = params.theta_star - 0.08
    prof = build_profile(theta, params)
    for family, base in (("Forward", prof), ("Backward", mirror(prof))):
        ladder = [0.02, 0.01, 0.005, 0.0025, 0.00125]
        dist = [distance_to_profile(wave(m, family), base) for m in ladder]
        ck.add(f"{family} distance decreases as m halves", bool(np.all(np.diff(dist) < 0)),
               " ".join(f"{d:.2e}" for d in dist))
    ck.finish(capsys)


# 6 -------------------------------------------------------------------------------


def test_criterion_6_dynamics(capsys, wave, params):
    ck = Checks(6, "dynamics")
    theta = params.theta_star - 0.08
    prof = build_profile(theta, params)

    grid = Grid1D.spanning(-40.0, 40.0, 2048, ZERO_GRADIENT)
    s0 = init_from_profile(prof, grid)
    res = run(s0, grid, params, theta, 50.0, snapshot_every=5.0)
    speed = measure_drift(res.snapshots, grid, 0.5)
    l2 = float(np.sqrt(np.sum((res.state.c - s0.c) ** 2) * grid.dx))
    ck.add("stationary drift", abs(speed) <= 1e-3, f"{speed:.2e}")
    ck.add("stationary L2(c)", l2 <= 5e-3, f"{l2:.2e}")

    w = wave(0.005, "Forward")
    shift = 0.1
    u_left = w.left.u + shift
    predicted = u_left - w.m / w.left.rho
    tgrid = Grid1D.spanning(-60.0, 60.0, 2048, ZERO_GRADIENT)
    tres = run(init_from_profile(w, tgrid, u_shift=shift), tgrid, params, theta, 40.0, snapshot_every=4.0)
    measured = measure_drift(tres.snapshots, tgrid, 0.5 * (w.left.c + w.right.c))
    ck.add("traveling wave frame speed", abs(measured - predicted) <= 0.1 * abs(predicted),
           f"{measured:.6f} vs {predicted:.6f}")

    pgrid = Grid1D.spanning(0.0, 160.0, 1024, PERIODIC)
    ps = init_double_profile(prof, pgrid)
    m0 = ps.mass(pgrid)
    ps1, n = advance(ps, pgrid, params, theta, 1e9, max_steps=1000)
    drift = abs(ps1.mass(pgrid) - m0) / m0
    ck.add("periodic mass per 1000 steps", n == 1000 and drift <= 1e-13, f"{drift:.2e}")
    ck.finish(capsys)


# 7 -------------------------------------------------------------------------------


def test_criterion_7_identities(capsys):
    ck = Checks(7, "thermodynamic identities")
    params = ModelParams()
    rng = np.random.default_rng(2024)
    worst_p = worst_q = worst_rt = worst_lg = 0.0
    h = 1e-5
    for _ in range(300):
        c = rng.uniform(0.02, 0.98)
        tau = c * params.tau1 + rng.uniform(0.05, 3.0)
        theta = params.theta_star + rng.choice([-0.08, 0.0, 0.16])
        U = lambda t, x: float(thermo.energy(t, x, theta, params))
        p = float(thermo.pressure(1 / tau, c, params))
        q = float(thermo.reaction_q(1 / tau, c, theta, params))
        fd_p = -(U(tau + h, c) - U(tau - h, c)) / (2 * h)
        fd_q = -(U(tau, c + h) - U(tau, c - h)) / (2 * h)
        worst_p = max(worst_p, abs(fd_p - p) / abs(p))
        worst_q = max(worst_q, abs(fd_q - q) / max(abs(q), 1e-3))
        worst_rt = max(worst_rt, abs(float(thermo.tau_of(p, c, params)) - tau) / max(1.0, tau))
        if p < 1.0 / params.tau1:
            worst_lg = max(worst_lg, abs(thermo.legendre_gibbs(NegLog(), p, c, params)
                                         - float(thermo.gibbs_hat(p, c, params))))
    ck.add("p vs FD of U", worst_p <= 1e-6, f"{worst_p:.2e}")
    ck.add("q vs FD of U", worst_q <= 1e-6, f"{worst_q:.2e}")
    ck.add("tau_of(pressure) round trip", worst_rt <= 1e-10, f"{worst_rt:.2e}")
    ck.add("legendre_gibbs = gibbs_hat", worst_lg <= 1e-10, f"{worst_lg:.2e}")
    cs = np.linspace(0.02, 0.98, 49)
    gcc = max(float(np.max(np.abs(np.diff(thermo.gibbs_hat(p, cs, params), 2)))) for p in (0.1, 0.46, 1.0, 1.9))
    ck.add("Ghat_cc = 0", gcc <= 1e-10, f"{gcc:.2e}")
    bad = 0
    for dth in (-0.08, 0.0, 0.16):
        for c in np.linspace(0.05, 0.95, 20):
            for tau in np.linspace(0.3, 3.0, 20):
                if tau - c * params.tau1 >= 0.05:
                    bad += not thermo.delta_identity(tau, c, params.theta_star + dth, params)[1]
    ck.add("sgn Delta = sgn W_cc", bad == 0, f"{bad} mismatches")
    ck.finish(capsys)
