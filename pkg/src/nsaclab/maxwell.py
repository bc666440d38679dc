"""Maxwell states: equal-level saddles of the landscape and their fluid states.

Chemical equilibria at pressure ``pi`` are roots of G_c(pi, ., theta); the
outer two are saddles of Gamma at levels G(pi, c, theta). The pressure at
which both saddle levels agree is ``pi_star(theta)``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from . import thermo
from .errors import ConvergenceError, StructureError
from .roots import safeguarded_newton, scan_roots
from .thermo import ModelParams

log = logging.getLogger(__name__)

NO_TWO_SADDLE = "no two-saddle configuration"


@dataclass(frozen=True)
class StatePoint:
    rho: float
    c: float


@dataclass(frozen=True)
class MaxwellPair:
    under: StatePoint
    over: StatePoint
    pi_star: float
    level: float
    theta: float

    def to_dict(self) -> dict:
        return {
            "theta": self.theta,
            "pi_star": self.pi_star,
            "level": self.level,
            "under": {"rho": self.under.rho, "c": self.under.c},
            "over": {"rho": self.over.rho, "c": self.over.c},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MaxwellPair":
        st = lambda s: StatePoint(float(s["rho"]), float(s["c"]))
        return cls(st(d["under"]), st(d["over"]), float(d["pi_star"]), float(d["level"]), float(d["theta"]))


def equilibrium_c(pi: float, theta: float, params: ModelParams, step: float = 1e-4) -> list[float]:
    """Sorted roots in (0, 1) of G_c(pi, c, theta)."""
    n = int(round(1.0 / step))
    grid = np.linspace(0.0, 1.0, n + 1)[1:-1]
    kappa = params.tau1 * pi - math.log(pi) - 1.0
    f = lambda c: kappa + float(thermo.mixing_w(c, theta, params)[1])
    fp = lambda c: float(thermo.mixing_w(c, theta, params)[2])
    fx = kappa + thermo.mixing_w(grid, theta, params)[1]
    return scan_roots(f, fp, grid, fx, ftol=1e-12)


def _outer_saddles(pi: float, theta: float, params: ModelParams) -> tuple[float, float]:
    roots = equilibrium_c(pi, theta, params)
    if len(roots) < 3:
        raise StructureError(f"{NO_TWO_SADDLE} at pi={pi:.6g} ({len(roots)} equilibrium root(s))")
    if len(roots) > 3:
        log.warning("%d equilibrium roots at pi=%.6g; using the outermost pair", len(roots), pi)
    return roots[0], roots[-1]


def saddle_gap(pi: float, theta: float, params: ModelParams) -> float:
    """G(pi, c_high) - G(pi, c_low) for the outermost equilibria."""
    lo, hi = _outer_saddles(pi, theta, params)
    return float(thermo.gibbs(pi, hi, theta, params) - thermo.gibbs(pi, lo, theta, params))


def _gap_slope(pi: float, theta: float, params: ModelParams) -> float:
    # envelope theorem: d/dpi G(pi, c(pi)) = tau(pi, c)
    lo, hi = _outer_saddles(pi, theta, params)
    return float(thermo.tau_of(pi, hi, params) - thermo.tau_of(pi, lo, params))


def _three_root_edge(center: float, direction: float, theta: float, params: ModelParams,
                     h0: float = 0.05, limits=(1e-4, 10.0)) -> float:
    """Farthest point from ``center`` (trial steps h0 / 2**k) that keeps two saddles."""
    h = h0
    for _ in range(60):
        x = center + direction * h
        if limits[0] < x < limits[1]:
            try:
                _outer_saddles(x, theta, params)
                return x
            except StructureError:
                pass
        h *= 0.5
    raise StructureError(f"{NO_TWO_SADDLE} near pi={center:.6g}")


def _coalesced_pair(theta: float, params: ModelParams) -> MaxwellPair:
    c0 = params.w_spec.c_star
    target = -float(thermo.mixing_w(c0, theta, params)[1])
    t1 = params.tau1
    # kappa(pi) = tau1 pi - log pi - 1 decreases on (0, 1/tau1)
    g = lambda p: t1 * p - math.log(p) - 1.0 - target
    pi = safeguarded_newton(g, lambda p: t1 - 1.0 / p, 1e-8, 1.0 / t1, ftol=1e-15)
    rho = 1.0 / float(thermo.tau_of(pi, c0, params))
    level = float(thermo.gibbs(pi, c0, theta, params))
    st = StatePoint(rho, c0)
    return MaxwellPair(st, st, pi, level, theta)


def pi_star(theta: float, params: ModelParams, tol: float = 1e-12) -> tuple[float, MaxwellPair]:
    """The equal-saddle-level pressure and the Maxwell pair at ``theta``."""
    dtheta = theta - params.theta_star
    if abs(dtheta) <= 1e-14:
        pair = _coalesced_pair(theta, params)
        return pair.pi_star, pair
    if dtheta > 0.0:
        raise StructureError(f"{NO_TWO_SADDLE} above the critical temperature")
    p0 = thermo.critical_pressure(params)
    try:
        _outer_saddles(p0, theta, params)
        center = p0
    except StructureError:
        center = _locate_three_root_pressure(theta, params, p0)
    lo = _three_root_edge(center, -1.0, theta, params)
    hi = _three_root_edge(center, +1.0, theta, params)
    g_lo, g_hi = saddle_gap(lo, theta, params), saddle_gap(hi, theta, params)
    if g_lo * g_hi > 0.0:
        raise ConvergenceError(f"saddle gap does not change sign on [{lo:.6g}, {hi:.6g}]")
    f = lambda p: saddle_gap(p, theta, params)
    fp = lambda p: _gap_slope(p, theta, params)
    x0 = center if lo < center < hi else None
    pi = safeguarded_newton(f, fp, lo, hi, x0=x0, ftol=tol)
    c_lo, c_hi = _outer_saddles(pi, theta, params)
    rho_lo = 1.0 / float(thermo.tau_of(pi, c_lo, params))
    rho_hi = 1.0 / float(thermo.tau_of(pi, c_hi, params))
    a, b = StatePoint(rho_lo, c_lo), StatePoint(rho_hi, c_hi)
    under, over = (a, b) if rho_lo <= rho_hi else (b, a)
    level = float(thermo.gibbs(pi, c_lo, theta, params))
    return pi, MaxwellPair(under, over, pi, level, theta)


def _locate_three_root_pressure(theta: float, params: ModelParams, p0: float) -> float:
    """Scan pressures around p0 for one with three equilibria (asymmetric W)."""
    for h in np.geomspace(1e-4, 5.0, 200):
        for x in (p0 - h, p0 + h):
            if 1e-4 < x < 10.0:
                try:
                    _outer_saddles(x, theta, params)
                    return float(x)
                except StructureError:
                    continue
    raise StructureError(f"{NO_TWO_SADDLE} at theta={theta:.6g}")


def maxwell_pair(theta: float, params: ModelParams) -> MaxwellPair:
    return pi_star(theta, params)[1]
