"""Traveling-wave phase boundaries for small mass flux m != 0.

In the wave frame (speed 0) mass conservation gives rho u = m, and the
momentum and concentration equations integrate once to the first-order
system in (u, c, d) with d = c':

    nu u' = m u + p(rho, c) + delta rho d**2 - j
    c'    = d
    delta rho d' = sqrt(delta) m d - rho q - delta rho' d,   rho' = -(m / u**2) u'

``j`` is the far-field momentum flux. For m > 0 the left endstate has a
one-dimensional unstable manifold, which is shot toward the right endstate;
``j`` is adjusted until the orbit lands on it. Waves with m < 0 are obtained
as spatial mirror images of the opposite family at -m, which is an exact
symmetry of the steady equations.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from . import thermo
from .errors import ConvergenceError, DomainError, StructureError
from .maxwell import MaxwellPair, pi_star
from .profile import BACKWARD, FORWARD
from .thermo import FluidState, ModelParams

log = logging.getLogger(__name__)

DENSIFYING = "Densifying"
RAREFYING = "Rarefying"


@dataclass(frozen=True)
class TwState:
    u: float
    c: float
    d: float

    def as_array(self) -> np.ndarray:
        return np.array([self.u, self.c, self.d])


@dataclass(frozen=True)
class ShootConfig:
    eps: float = 1e-6
    rtol: float = 1e-10
    atol: float = 1e-13
    x_max: float = 3000.0
    ladder_steps: int = 5
    # rungs below this are skipped; tiny m is stiff and needs no continuation
    ladder_floor: float = 1e-3
    method: str = "LSODA"
    j_xtol: float = 1e-15
    max_expand: int = 40


@dataclass(frozen=True)
class TravelingWave:
    m: float
    j: float
    left: FluidState
    right: FluidState
    x: np.ndarray
    rho: np.ndarray
    u: np.ndarray
    c: np.ndarray
    d: np.ndarray
    family: str
    theta: float
    classification: str = field(init=False)

    def __post_init__(self):
        dens = self.m * (self.right.rho - self.left.rho) > 0.0
        object.__setattr__(self, "classification", DENSIFYING if dens else RAREFYING)

    def summary(self) -> dict:
        st = lambda s: {"rho": s.rho, "u": s.u, "c": s.c}
        return {
            "m": self.m,
            "j": self.j,
            "theta": self.theta,
            "family": self.family,
            "classification": self.classification,
            "left": st(self.left),
            "right": st(self.right),
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "rho", "u", "c", "d"])
        for row in zip(self.x, self.rho, self.u, self.c, self.d):
            w.writerow([repr(float(v)) for v in row])
        return buf.getvalue()


# -- right-hand side -------------------------------------------------------------


def _check_nu(params: ModelParams):
    if not params.nu > 0.0:
        raise DomainError("traveling waves need 2 mu + lambda > 0")


def tw_rhs(z, m: float, j: float, theta: float, params: ModelParams) -> np.ndarray:
    u, c, d = z
    if not u * m > 0.0:
        raise DomainError("u m must be positive")
    delta, nu = params.delta, params.nu
    rho = m / u
    p, _, _, q, _, _ = thermo.scalar_partials(rho, c, theta, params)
    du = (m * u + p + delta * rho * d * d - j) / nu
    drho = -(m / (u * u)) * du
    dd = (math.sqrt(delta) * m * d - rho * q - delta * drho * d) / (delta * rho)
    return np.array([du, d, dd])


def tw_jacobian(z, m: float, j: float, theta: float, params: ModelParams) -> np.ndarray:
    """Analytic Jacobian of :func:`tw_rhs` with respect to (u, c, d)."""
    u, c, d = z
    delta, nu = params.delta, params.nu
    sd = math.sqrt(delta)
    rho = m / u
    p, p_r, p_c, q, q_r, q_c = thermo.scalar_partials(rho, c, theta, params)
    rho_u = -rho / u
    rho_uu = 2.0 * m / u**3
    R = m * u + p + delta * rho * d * d - j
    R_u = m + (p_r + delta * d * d) * rho_u
    R_c = p_c
    R_d = 2.0 * delta * rho * d
    du = R / nu
    drho = rho_u * du
    N = sd * m * d - rho * q - delta * drho * d
    drho_u = rho_uu * du + rho_u * R_u / nu
    N_u = -rho_u * q - rho * q_r * rho_u - delta * d * drho_u
    N_c = -rho * q_c - delta * d * rho_u * R_c / nu
    N_d = sd * m - delta * drho - delta * d * rho_u * R_d / nu
    dr = delta * rho
    return np.array([
        [R_u / nu, R_c / nu, R_d / nu],
        [0.0, 0.0, 1.0],
        [N_u / dr - N * rho_u / (dr * rho), N_c / dr, N_d / dr],
    ])


# -- endstates -----------------------------------------------------------------


def _solve_endstate(m: float, j: float, theta: float, params: ModelParams,
                    rho: float, c: float, tol: float = 1e-10, maxiter: int = 30):
    m2 = m * m
    for it in range(maxiter):
        p, p_r, p_c, q, q_r, q_c = thermo.scalar_partials(rho, c, theta, params)
        F = np.array([q, p + m2 / rho - j])
        if np.max(np.abs(F)) <= tol and it > 0:
            return rho, c, it
        J = np.array([[q_r, q_c], [p_r - m2 / rho**2, p_c]])
        try:
            step = np.linalg.solve(J, F)
        except np.linalg.LinAlgError:
            break
        rho, c = rho - step[0], c - step[1]
        if not (rho > 0.0 and 0.0 < c < 1.0) or not math.isfinite(rho):
            break
        try:
            thermo.pressure(rho, c, params)
        except DomainError:
            break
    raise ConvergenceError(f"endstate Newton failed (m={m:g} too large?)")


def endstates(m: float, j: float, theta: float, params: ModelParams,
              seed: MaxwellPair, family: str = FORWARD) -> tuple[FluidState, FluidState]:
    """Endstates with q = 0 and p + m**2 tau = j, continued from the Maxwell pair."""
    a, b = (seed.under, seed.over) if family == FORWARD else (seed.over, seed.under)
    out = []
    for st in (a, b):
        rho, c, _ = _solve_endstate(m, j, theta, params, st.rho, st.c)
        out.append(FluidState(float(rho), float(m / rho), float(c)))
    return out[0], out[1]


# -- shooting ------------------------------------------------------------------


@dataclass
class _Shot:
    j: float
    miss: float
    sol: object
    x_end: float
    left: FluidState
    right: FluidState


def _unstable_direction(left: FluidState, m: float, j: float, theta: float,
                        params: ModelParams, toward: float) -> tuple[float, np.ndarray]:
    z = np.array([left.u, left.c, 0.0])
    ev, vec = np.linalg.eig(tw_jacobian(z, m, j, theta, params))
    pos = [k for k in range(3) if ev[k].real > 0.0]
    if len(pos) != 1:
        raise ConvergenceError(f"expected one unstable direction at the left endstate, got {len(pos)}")
    k = pos[0]
    v = vec[:, k].real
    if v[1] == 0.0:
        raise ConvergenceError("unstable direction does not move c")
    v = v / abs(v[1])
    if np.sign(v[1]) != np.sign(toward):
        v = -v
    return float(ev[k].real), v


def _shoot(j: float, m: float, theta: float, params: ModelParams, seed: MaxwellPair,
           family: str, cfg: ShootConfig, dense: bool = False) -> _Shot:
    left, right = endstates(m, j, theta, params, seed, family)
    orient = 1.0 if right.c > left.c else -1.0
    span = abs(right.c - left.c)
    _, v = _unstable_direction(left, m, j, theta, params, orient)
    z0 = np.array([left.u, left.c, 0.0]) + cfg.eps * span * v

    def rhs(x, z):
        if not z[0] * m > 0.0:
            return np.full(3, np.nan)
        return tw_rhs(z, m, j, theta, params)

    def jac(x, z):
        return tw_jacobian(z, m, j, theta, params)

    def turn(x, z):
        return orient * z[2]
    turn.terminal = True
    turn.direction = -1

    def arrive(x, z):
        return orient * (z[1] - right.c)
    arrive.terminal = True
    arrive.direction = 1

    def blowup(x, z):
        return z[0] * m - 1e-3 * m * m
    blowup.terminal = True

    sol = solve_ivp(rhs, (0.0, cfg.x_max), z0, method=cfg.method, jac=jac, rtol=cfg.rtol,
                    atol=[cfg.atol * abs(m), cfg.atol, cfg.atol], events=(turn, arrive, blowup),
                    dense_output=dense)
    if sol.status == -1:
        raise ConvergenceError(f"integration failed at j={j!r}: {sol.message}")
    if len(sol.t_events[0]):
        zt = sol.y_events[0][0]
        miss = orient * (zt[1] - right.c)
        x_end = sol.t_events[0][0]
    elif len(sol.t_events[1]):
        zt = sol.y_events[1][0]
        miss = orient * zt[2]
        x_end = sol.t_events[1][0]
    else:
        raise ConvergenceError(f"shot at j={j!r} neither turned nor arrived (blow-up or x_max)")
    return _Shot(j, float(miss), sol, float(x_end), left, right)


def _solve_j(m: float, theta: float, params: ModelParams, seed: MaxwellPair, family: str,
             cfg: ShootConfig, j_guess: float, h0: float) -> float:
    miss = lambda j: _shoot(j, m, theta, params, seed, family, cfg).miss
    f0 = miss(j_guess)
    if f0 == 0.0:
        return j_guess
    h = h0
    for _ in range(cfg.max_expand):
        for jj in (j_guess - h, j_guess + h):
            try:
                fj = miss(jj)
            except ConvergenceError:
                continue
            if fj * f0 <= 0.0:
                a, b = sorted((j_guess, jj))
                return brentq(miss, a, b, xtol=cfg.j_xtol, rtol=1e-15, maxiter=200)
        h *= 2.0
    raise ConvergenceError(f"no sign-changing bracket for j around {j_guess!r} (m={m:g})")


def _family_flip(family: str) -> str:
    return BACKWARD if family == FORWARD else FORWARD


def connect(m: float, theta: float, params: ModelParams, family: str = FORWARD,
            cfg: ShootConfig | None = None, pair: MaxwellPair | None = None) -> TravelingWave:
    """Traveling wave with mass flux ``m`` continued from the no-flux boundary."""
    cfg = cfg or ShootConfig()
    _check_nu(params)
    if theta >= params.theta_star:
        raise StructureError("no two-saddle configuration at or above the critical temperature")
    if m == 0.0:
        raise DomainError("use the profile module for m = 0")
    if m < 0.0:
        return mirror_wave(connect(-m, theta, params, _family_flip(family), cfg, pair))
    if pair is None:
        pair = pi_star(theta, params)[1]
    j = pair.pi_star
    js: list[tuple[float, float]] = []
    ladder = [m * 2.0 ** (k - cfg.ladder_steps + 1) for k in range(cfg.ladder_steps)]
    ladder = [mk for mk in ladder if mk >= cfg.ladder_floor] or [m]
    for mk in ladder:
        if len(js) >= 2:
            (m1, j1), (m2, j2) = js[-2], js[-1]
            guess = j2 + (j2 - j1) / (m2 - m1) * (mk - m2)
            h = max(abs(guess - j2), 1e-9)
        elif js:
            guess = js[-1][1] * 2.0 - pair.pi_star
            h = max(abs(js[-1][1] - pair.pi_star), 1e-9)
        else:
            tl = 1.0 / pair.under.rho
            tr = 1.0 / pair.over.rho
            guess = pair.pi_star + mk * mk * 0.5 * (tl + tr)
            h = max(mk * 1e-2, 1e-9)
        j = _solve_j(mk, theta, params, pair, family, cfg, guess, h)
        js.append((mk, j))
    shot = _shoot(j, m, theta, params, pair, family, cfg, dense=True)
    return _assemble(shot, m, theta, family)


def _assemble(shot: _Shot, m: float, theta: float, family: str, n: int = 4001) -> TravelingWave:
    # cut where the orbit is closest to the right endstate
    xs = np.linspace(0.0, shot.x_end, n)
    z = shot.sol.sol(xs)
    u, c, d = z
    k = int(np.argmin(np.abs(c - shot.right.c)))
    xs, u, c, d = xs[: k + 1], u[: k + 1], c[: k + 1], d[: k + 1]
    c_mid = 0.5 * (shot.left.c + shot.right.c)
    order = np.argsort(c) if shot.right.c > shot.left.c else np.argsort(-c)
    x0 = np.interp(c_mid if shot.right.c > shot.left.c else -c_mid,
                   c[order] if shot.right.c > shot.left.c else -c[order], xs[order])
    return TravelingWave(m, shot.j, shot.left, shot.right, xs - x0, m / u, u, c, d, family, theta)


def mirror_wave(w: TravelingWave) -> TravelingWave:
    """x -> -x, u -> -u: a wave of the opposite family with mass flux -m."""
    flip = lambda s: FluidState(s.rho, -s.u, s.c)
    return TravelingWave(-w.m, w.j, flip(w.right), flip(w.left), -w.x[::-1], w.rho[::-1].copy(),
                         -w.u[::-1], w.c[::-1].copy(), -w.d[::-1], _family_flip(w.family), w.theta)


def first_integrals(w: TravelingWave, params: ModelParams) -> tuple[float, float]:
    """Max deviations of rho u from m and of m u + p + delta rho c'**2 - nu u' from j.

    u' is a finite difference of the sampled table, so the check is
    independent of the right-hand side used to integrate.
    """
    mass = np.max(np.abs(w.rho * w.u - w.m))
    du = np.gradient(w.u, w.x, edge_order=2)
    p = thermo.pressure(w.rho, w.c, params)
    flux = w.m * w.u + p + params.delta * w.rho * w.d**2 - params.nu * du
    return float(mass), float(np.max(np.abs(flux - w.j)))


def distance_to_profile(w: TravelingWave, profile) -> float:
    """Sup distance in (rho, c) to a no-flux profile of the same family.

    Both tables are aligned so that c crosses its own endstate midpoint at
    x = 0; the comparison runs over the common x-range.
    """
    if profile.direction != w.family:
        raise DomainError("profile and wave belong to different families")
    lo = max(w.x[0], profile.x[0])
    hi = min(w.x[-1], profile.x[-1])
    xs = np.linspace(lo, hi, 4001)
    dc = np.abs(np.interp(xs, w.x, w.c) - np.interp(xs, profile.x, profile.c))
    dr = np.abs(np.interp(xs, w.x, w.rho) - np.interp(xs, profile.x, profile.rho))
    return float(max(dc.max(), dr.max()))
