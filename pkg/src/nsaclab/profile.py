"""No-flux planar phase boundaries as heteroclinic level curves of Gamma.

Along a no-flux profile Gamma(c, y) equals the common saddle level, so the
upper heteroclinic branch y(c) > 0 is found pointwise and the spatial
coordinate follows from dx = sqrt(delta) dc / y.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, replace

import numpy as np

from . import thermo
from .errors import ConvergenceError, DomainError, StructureError
from .landscape import LandscapeParams, gamma, p_root
from .maxwell import MaxwellPair, pi_star
from .thermo import ModelParams

FORWARD = "Forward"
BACKWARD = "Backward"


@dataclass(frozen=True)
class ProfileTable:
    x: np.ndarray
    c: np.ndarray
    y: np.ndarray
    rho: np.ndarray
    p: np.ndarray
    endstates: MaxwellPair
    direction: str
    theta: float
    delta: float

    @property
    def pi_star(self) -> float:
        return self.endstates.pi_star

    def __len__(self):
        return len(self.x)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# theta={self.theta!r} pi_star={self.pi_star!r} delta={self.delta!r} "
                  f"direction={self.direction}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "c", "y", "rho", "p"])
        for row in zip(self.x, self.c, self.y, self.rho, self.p):
            w.writerow([repr(float(v)) for v in row])
        return buf.getvalue()


def read_profile_csv(text: str, params: ModelParams) -> ProfileTable:
    lines = text.splitlines()
    meta = dict(tok.split("=", 1) for tok in lines[0].lstrip("# ").split())
    data = np.loadtxt(lines[2:], delimiter=",", ndmin=2)
    theta = float(meta["theta"])
    pair = pi_star(theta, params)[1]
    return ProfileTable(data[:, 0], data[:, 1], data[:, 2], data[:, 3], data[:, 4], pair,
                        meta.get("direction", FORWARD), theta, float(meta["delta"]))


def _pair_for(theta: float, params: ModelParams, pair: MaxwellPair | None) -> MaxwellPair:
    if theta >= params.theta_star:
        raise StructureError("no two-saddle configuration at or above the critical temperature")
    return pair if pair is not None else pi_star(theta, params)[1]


def hetero_y(c, theta: float, params: ModelParams, pair: MaxwellPair | None = None,
             maxiter: int = 200):
    """Upper heteroclinic branch: y > 0 with Gamma(c, y) equal to the saddle level.

    Solved by bracketed Newton in s = y**2 on [0, 1 - c + c tau1 pi], the
    interval on which Gamma decreases in y.
    """
    pair = _pair_for(theta, params, pair)
    c_arr = np.atleast_1d(np.asarray(c, dtype=float))
    c_lo, c_hi = sorted((pair.under.c, pair.over.c))
    if np.any(c_arr <= c_lo) or np.any(c_arr >= c_hi):
        raise StructureError(f"c outside the heteroclinic range ({c_lo:.6g}, {c_hi:.6g})")
    pi, level, t1 = pair.pi_star, pair.level, params.tau1
    lp = LandscapeParams(theta, pi)

    def phi(s):
        return gamma(c_arr, np.sqrt(s), lp, params) - level

    def dphi(s):
        P = p_root(c_arr, np.sqrt(s), pi, params)
        F_p = 2.0 * c_arr * t1 * P + 1.0 - c_arr - c_arr * t1 * pi + s
        return -(1.0 - c_arr + c_arr * t1 * pi - s) / (2.0 * F_p)

    lo = np.zeros_like(c_arr)
    hi = 1.0 - c_arr + c_arr * t1 * pi
    if np.any(phi(hi) >= 0.0):
        raise ConvergenceError("saddle level not reached on the decreasing branch")
    # leading order: Gamma ~ G(pi, c) - y**2 / 2
    s = np.clip(2.0 * phi(lo), 0.0, hi)
    for _ in range(maxiter):
        f = phi(s)
        lo = np.where(f > 0.0, s, lo)
        hi = np.where(f < 0.0, s, hi)
        step = f / dphi(s)
        s_new = s - step
        bad = ~((s_new > lo) & (s_new < hi)) | ~np.isfinite(s_new)
        s_new = np.where(bad, 0.5 * (lo + hi), s_new)
        if np.all((np.abs(f) <= 1e-16) | (np.abs(s_new - s) <= 4e-16 * np.abs(s))):
            s = s_new
            break
        s = s_new
    else:
        raise ConvergenceError("hetero_y Newton did not converge")
    y = np.sqrt(s)
    return float(y[0]) if np.ndim(c) == 0 else y


def cosine_grid(a: float, b: float, n: int) -> np.ndarray:
    k = np.arange(n)
    g = 0.5 * (a + b) - 0.5 * (b - a) * np.cos(np.pi * k / (n - 1))
    g[0], g[-1] = a, b
    return g


def build_profile(theta: float, params: ModelParams, n_samples: int = 2001,
                  clip_eps: float = 1e-4, direction: str = FORWARD,
                  pair: MaxwellPair | None = None) -> ProfileTable:
    """Sampled no-flux profile from the under state (left) to the over state."""
    if n_samples < 3:
        raise DomainError("need at least 3 samples")
    pair = _pair_for(theta, params, pair)
    c_lo, c_hi = sorted((pair.under.c, pair.over.c))
    c = cosine_grid(c_lo + clip_eps, c_hi - clip_eps, n_samples)
    y = hetero_y(c, theta, params, pair)
    sd = np.sqrt(params.delta)
    inv = sd / y
    x = np.concatenate([[0.0], np.cumsum(0.5 * (inv[1:] + inv[:-1]) * np.diff(c))])
    x -= np.interp(0.5 * (c_lo + c_hi), c, x)
    P = p_root(c, y, pair.pi_star, params)
    rho = 1.0 / thermo.tau_of(P, c, params)
    if pair.under.c > pair.over.c:
        # under state on the left regardless of which c it carries
        x, c, y, rho, P = -x[::-1], c[::-1], -y[::-1], rho[::-1], P[::-1]
    table = ProfileTable(x, c, y, rho, P, pair, FORWARD, theta, params.delta)
    return mirror(table) if direction == BACKWARD else table


def mirror(profile: ProfileTable) -> ProfileTable:
    """Spatial reflection x -> -x; flips the direction label."""
    flip = BACKWARD if profile.direction == FORWARD else FORWARD
    return replace(
        profile,
        x=-profile.x[::-1],
        c=profile.c[::-1].copy(),
        y=-profile.y[::-1],
        rho=profile.rho[::-1].copy(),
        p=profile.p[::-1].copy(),
        direction=flip,
    )


def left_state(profile: ProfileTable):
    pair = profile.endstates
    return pair.under if profile.direction == FORWARD else pair.over


def right_state(profile: ProfileTable):
    pair = profile.endstates
    return pair.over if profile.direction == FORWARD else pair.under


def _nonuniform_derivative(x: np.ndarray, f: np.ndarray) -> np.ndarray:
    """Second-order three-point derivative at interior nodes of a nonuniform grid."""
    h0 = x[1:-1] - x[:-2]
    h1 = x[2:] - x[1:-1]
    return (-h1 / (h0 * (h0 + h1)) * f[:-2]
            + (h1 - h0) / (h0 * h1) * f[1:-1]
            + h0 / (h1 * (h0 + h1)) * f[2:])


def residual_check(profile: ProfileTable, params: ModelParams) -> tuple[float, float]:
    """Sup-norm residuals of the steady u = 0 momentum and Allen-Cahn equations.

    Momentum: p + delta rho c'**2 - pi.  Allen-Cahn: delta (rho c')' + rho q.
    Derivatives are finite differences on the sampled (nonuniform) x-grid.
    """
    x, c, rho = profile.x, profile.c, profile.rho
    delta = params.delta
    cx = _nonuniform_derivative(x, c)
    inner = slice(1, -1)
    p = thermo.pressure(rho[inner], c[inner], params)
    r_mom = p + delta * rho[inner] * cx**2 - profile.pi_star
    flux = rho[inner] * cx
    dflux = _nonuniform_derivative(x[inner], flux)
    q = thermo.reaction_q(rho[2:-2], c[2:-2], profile.theta, params)
    r_ac = delta * dflux + rho[2:-2] * q
    return float(np.max(np.abs(r_mom))), float(np.max(np.abs(r_ac)))


def gamma_along(profile: ProfileTable, params: ModelParams) -> np.ndarray:
    lp = LandscapeParams(profile.theta, profile.pi_star)
    return gamma(profile.c, profile.y, lp, params)
