"""Explicit 1D finite-volume scheme for the Navier-Stokes-Allen-Cahn system.

Conserved fields are (rho, rho u, rho c) on a uniform grid:

    (rho)_t     + (rho u)_x                                      = 0
    (rho u)_t   + (rho u**2 + p - nu u_x + delta rho c_x**2)_x      = 0
    (rho c)_t   + (rho c u - sqrt(delta) rho c_x)_x              = rho q / sqrt(delta)

Convective fluxes use the local Lax-Friedrichs (Rusanov) flux; the viscous,
capillary and diffusive parts are central differences evaluated at faces, so
every term except the reaction source is in flux form. Time stepping is the
two-stage SSP Runge-Kutta method.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import thermo
from . import _kernel
from .errors import DomainError, MeasureError, StateError
from .thermo import ModelParams

log = logging.getLogger(__name__)

PERIODIC = "periodic"
ZERO_GRADIENT = "zerograd"

# compiled rates for f = -log with the quartic W; the numpy path is the reference
USE_KERNEL = True


@dataclass(frozen=True)
class Grid1D:
    n_cells: int
    dx: float
    x0: float = 0.0
    bc: str = PERIODIC

    def __post_init__(self):
        if self.n_cells < 16:
            raise DomainError("need at least 16 cells")
        if not self.dx > 0.0:
            raise DomainError("dx must be positive")
        if self.bc not in (PERIODIC, ZERO_GRADIENT):
            raise DomainError(f"unknown boundary condition {self.bc!r}")

    @classmethod
    def spanning(cls, x_min: float, x_max: float, n_cells: int, bc: str = PERIODIC) -> "Grid1D":
        return cls(n_cells, (x_max - x_min) / n_cells, x_min, bc)

    @property
    def centers(self) -> np.ndarray:
        return self.x0 + (np.arange(self.n_cells) + 0.5) * self.dx

    @property
    def length(self) -> float:
        return self.n_cells * self.dx


@dataclass(frozen=True)
class SimState:
    rho: np.ndarray
    mom: np.ndarray
    rc: np.ndarray
    t: float = 0.0

    @property
    def u(self) -> np.ndarray:
        return self.mom / self.rho

    @property
    def c(self) -> np.ndarray:
        return self.rc / self.rho

    def mass(self, grid: Grid1D) -> float:
        return float(np.sum(self.rho) * grid.dx)

    def momentum(self, grid: Grid1D) -> float:
        return float(np.sum(self.mom) * grid.dx)

    @classmethod
    def from_primitive(cls, rho, u, c, t: float = 0.0) -> "SimState":
        rho = np.asarray(rho, dtype=float)
        return cls(rho.copy(), rho * u, rho * c, t)


def _pad(a: np.ndarray, bc: str, ng: int = 2) -> np.ndarray:
    return np.pad(a, ng, mode="wrap" if bc == PERIODIC else "edge")


def validate(state: SimState, params: ModelParams | None = None) -> None:
    tau1 = params.tau1 if params is not None else 0.0
    bad = _kernel.first_invalid(state.rho, state.rc, tau1)
    if bad < 0:
        return
    raise StateError(f"state left the admissible domain in cell {bad} "
                     f"(rho={state.rho[bad]:.6g}, c={state.rc[bad] / state.rho[bad]:.6g})", int(bad))


def _fast_model(params: ModelParams) -> bool:
    return (USE_KERNEL and isinstance(params.f_spec, thermo.NegLog)
            and isinstance(params.w_spec, thermo.QuarticSymmetric))


def _kernel_args(grid: Grid1D, params: ModelParams, theta: float, muscl: bool):
    w = params.w_spec
    return (grid.dx, params.delta, params.nu, params.tau1, w.a, w.b, w.c_star,
            theta - params.theta_star, grid.bc == PERIODIC, muscl)


def rates(state: SimState, grid: Grid1D, params: ModelParams, theta: float,
          muscl: bool = True):
    """Time derivatives of (rho, rho u, rho c)."""
    if _fast_model(params):
        return _kernel.rates(state.rho, state.mom, state.rc,
                             *_kernel_args(grid, params, theta, muscl))
    return rates_numpy(state, grid, params, theta, muscl)


def _vanleer(dm, dp):
    prod = dm * dp
    with np.errstate(invalid="ignore", divide="ignore"):
        s = 2.0 * prod / (dm + dp)
    return np.where(prod > 0.0, s, 0.0)


def rates_numpy(state: SimState, grid: Grid1D, params: ModelParams, theta: float,
                muscl: bool = True):
    """Reference implementation of :func:`rates` for any energy model."""
    dx, delta, nu = grid.dx, params.delta, params.nu
    sd = math.sqrt(delta)
    rho = _pad(state.rho, grid.bc)
    mom = _pad(state.mom, grid.bc)
    rc = _pad(state.rc, grid.bc)
    u = mom / rho
    c = rc / rho
    slopes = []
    for v in (rho, u, c):
        s = np.zeros_like(v)
        if muscl:
            s[1:-1] = _vanleer(v[1:-1] - v[:-2], v[2:] - v[1:-1])
        slopes.append(s)
    # faces between cells NG-1+k and NG+k, k = 0..n
    L = slice(1, -2)
    R = slice(2, -1)
    prim_l = [v[L] + 0.5 * s[L] for v, s in zip((rho, u, c), slopes)]
    prim_r = [v[R] - 0.5 * s[R] for v, s in zip((rho, u, c), slopes)]

    def convective(r, uu, cc):
        p = thermo.pressure(r, cc, params)
        a = np.sqrt(thermo.sound_speed_sq(r, cc, params))
        m = r * uu
        return (m, m * uu + p, m * cc), (r, m, r * cc), np.abs(uu) + a

    fl, ul, sl = convective(*prim_l)
    fr, ur, sr = convective(*prim_r)
    alpha = np.maximum(sl, sr)
    f = [0.5 * (a + b) - 0.5 * alpha * (qr - ql) for a, b, ql, qr in zip(fl, fr, ul, ur)]
    rho_f = 0.5 * (rho[L] + rho[R])
    cx_f = (c[R] - c[L]) / dx
    ux_f = (u[R] - u[L]) / dx
    f_rho = f[0]
    f_mom = f[1] - nu * ux_f + delta * rho_f * cx_f**2
    f_rc = f[2] - sd * rho_f * cx_f

    inner = slice(2, -2)
    q = thermo.reaction_q(rho[inner], c[inner], theta, params)
    d_rho = -(f_rho[1:] - f_rho[:-1]) / dx
    d_mom = -(f_mom[1:] - f_mom[:-1]) / dx
    d_rc = -(f_rc[1:] - f_rc[:-1]) / dx + rho[inner] * q / sd
    return d_rho, d_mom, d_rc


def stable_dt(state: SimState, grid: Grid1D, params: ModelParams, cfl: float) -> float:
    """cfl * min(dx / max(|u| + a), dx**2 / (2 D_max)), D_max = max(nu / rho, sqrt(delta))."""
    if _fast_model(params):
        return _kernel.dt_limit(state.rho, state.mom, state.rc, params.tau1, params.nu,
                                params.delta, grid.dx, cfl)
    rho, c = state.rho, state.c
    a = np.sqrt(thermo.sound_speed_sq(rho, c, params))
    smax = float(np.max(np.abs(state.u) + a))
    d_max = max(float(np.max(params.nu / rho)), math.sqrt(params.delta))
    return cfl * min(grid.dx / smax, grid.dx**2 / (2.0 * d_max))


def step(state: SimState, grid: Grid1D, params: ModelParams, theta: float,
         cfl: float = 0.5, dt: float | None = None, muscl: bool = True) -> SimState:
    """One SSP-RK2 step; ``dt`` defaults to the CFL/parabolic limit."""
    if not 0.0 < cfl <= 1.0:
        raise DomainError("cfl must lie in (0, 1]")
    if dt is None:
        dt = stable_dt(state, grid, params, cfl)
    k1 = rates(state, grid, params, theta, muscl)
    s1 = SimState(state.rho + dt * k1[0], state.mom + dt * k1[1], state.rc + dt * k1[2], state.t + dt)
    validate(s1, params)
    k2 = rates(s1, grid, params, theta, muscl)
    out = SimState(
        0.5 * (state.rho + s1.rho + dt * k2[0]),
        0.5 * (state.mom + s1.mom + dt * k2[1]),
        0.5 * (state.rc + s1.rc + dt * k2[2]),
        state.t + dt,
    )
    validate(out, params)
    return out


def advance(state: SimState, grid: Grid1D, params: ModelParams, theta: float, t_end: float,
            cfl: float = 0.5, muscl: bool = True, max_steps: int = 10**8) -> tuple[SimState, int]:
    """Step until ``t_end`` (the last step is shortened to land on it)."""
    if not 0.0 < cfl <= 1.0:
        raise DomainError("cfl must lie in (0, 1]")
    if _fast_model(params):
        rho, mom, rc, t, n, bad = _kernel.advance(
            state.rho, state.mom, state.rc, state.t, t_end,
            *_kernel_args(grid, params, theta, muscl), cfl, max_steps)
        if bad >= 0:
            raise StateError(f"state left the admissible domain in cell {bad} at t={t:.6g}", int(bad))
        return SimState(rho, mom, rc, t), int(n)
    n = 0
    while state.t < t_end - 1e-12 and n < max_steps:
        dt = min(stable_dt(state, grid, params, cfl), t_end - state.t)
        state = step(state, grid, params, theta, cfl, dt=dt, muscl=muscl)
        n += 1
    return state, n


@dataclass
class RunResult:
    state: SimState
    snapshots: list[SimState] = field(default_factory=list)
    free_energy: list[tuple[float, float]] = field(default_factory=list)
    steps: int = 0


def run(state: SimState, grid: Grid1D, params: ModelParams, theta: float, t_end: float,
        cfl: float = 0.5, snapshot_every: float | None = None, muscl: bool = True) -> RunResult:
    """Advance to ``t_end`` recording snapshots and the free energy."""
    if not t_end > state.t:
        raise DomainError("t_end must lie after the current time")
    res = RunResult(state)
    times = []
    if snapshot_every:
        if not snapshot_every > 0.0:
            raise DomainError("snapshot interval must be positive")
        n = int(math.floor((t_end - state.t) / snapshot_every + 1e-9))
        times = [state.t + k * snapshot_every for k in range(1, n + 1)]
        if times and t_end - times[-1] <= 1e-9 * snapshot_every:
            times.pop()
    times.append(t_end)
    if snapshot_every:
        res.snapshots.append(state)
        res.free_energy.append((state.t, free_energy(state, grid, params, theta)))
    for t_next in times:
        state, n = advance(state, grid, params, theta, float(t_next), cfl, muscl)
        res.steps += n
        if snapshot_every:
            res.snapshots.append(state)
            res.free_energy.append((state.t, free_energy(state, grid, params, theta)))
    res.state = state
    e = [v for _, v in res.free_energy]
    if len(e) > 1 and np.any(np.diff(e) > 1e-10 * max(1.0, abs(e[0]))):
        log.warning("free energy increased during the run")
    return res


# -- initial data --------------------------------------------------------------


def _table_fields(obj):
    """(x, rho, u, c, left, right) from a ProfileTable or TravelingWave."""
    if hasattr(obj, "endstates"):
        from .profile import left_state, right_state
        lft, rgt = left_state(obj), right_state(obj)
        return obj.x, obj.rho, np.zeros_like(obj.x), obj.c, (lft.rho, 0.0, lft.c), (rgt.rho, 0.0, rgt.c)
    lft, rgt = obj.left, obj.right
    return obj.x, obj.rho, obj.u, obj.c, (lft.rho, lft.u, lft.c), (rgt.rho, rgt.u, rgt.c)


def _sample(obj, xs: np.ndarray, center: float):
    x, rho, u, c, lft, rgt = _table_fields(obj)
    xl = xs - center
    out = []
    for col, k in ((rho, 0), (u, 1), (c, 2)):
        out.append(np.interp(xl, x, col, left=lft[k], right=rgt[k]))
    return out


def init_from_profile(obj, grid: Grid1D, center: float = 0.0, u_shift: float = 0.0) -> SimState:
    """Cell-centre samples of a profile or traveling wave; far fields are endstates.

    ``u_shift`` adds a uniform velocity (Galilean boost to the lab frame).
    """
    x = _table_fields(obj)[0]
    xs = grid.centers
    if x[0] + center < grid.x0 or x[-1] + center > grid.x0 + grid.length:
        raise DomainError("grid does not span the profile")
    rho, u, c = _sample(obj, xs, center)
    return SimState.from_primitive(rho, u + u_shift, c)


def init_double_profile(profile, grid: Grid1D) -> SimState:
    """Forward profile at the first quarter, its mirror at the third quarter.

    The left endstate fills both edges, so the data is periodic.
    """
    from .profile import mirror

    if profile.direction != "Forward":
        raise DomainError("double-profile init expects a Forward profile")
    L = grid.length
    half = 0.25 * L
    if profile.x[0] < -half or profile.x[-1] > half:
        raise DomainError("grid too small for a double profile")
    xs = grid.centers
    back = mirror(profile)
    mid = grid.x0 + 0.5 * L
    fwd = _sample(profile, xs, grid.x0 + half)
    bwd = _sample(back, xs, grid.x0 + 3.0 * half)
    first = xs < mid
    rho, u, c = (np.where(first, a, b) for a, b in zip(fwd, bwd))
    return SimState.from_primitive(rho, u, c)


def init_constant(rho: float, u: float, c: float, grid: Grid1D) -> SimState:
    n = grid.n_cells
    return SimState.from_primitive(np.full(n, rho), np.full(n, u), np.full(n, c))


# -- diagnostics ---------------------------------------------------------------


def interface_position(x: np.ndarray, c: np.ndarray, level: float, window=None) -> float:
    """First linear-interpolated crossing of ``level`` inside ``window``."""
    if window is not None:
        sel = (x >= window[0]) & (x <= window[1])
        x, c = x[sel], c[sel]
    g = c - level
    idx = np.flatnonzero(g[:-1] * g[1:] < 0.0)
    exact = np.flatnonzero(g == 0.0)
    if exact.size and (not idx.size or exact[0] <= idx[0]):
        return float(x[exact[0]])
    if not idx.size:
        raise MeasureError(f"no crossing of c = {level:g}")
    i = idx[0]
    return float(x[i] + (x[i + 1] - x[i]) * g[i] / (g[i] - g[i + 1]))


def measure_drift(trajectory: list[SimState], grid: Grid1D, level: float, window=None) -> float:
    """Interface speed from a least-squares line through crossing positions."""
    if len(trajectory) < 2:
        raise MeasureError("need at least two snapshots")
    xs = grid.centers
    t = np.array([s.t for s in trajectory])
    pos = np.array([interface_position(xs, s.c, level, window) for s in trajectory])
    slope, _ = np.polyfit(t, pos, 1)
    return float(slope)


def _cx(c: np.ndarray, grid: Grid1D) -> np.ndarray:
    cp = _pad(c, grid.bc, 1)
    return (cp[2:] - cp[:-2]) / (2.0 * grid.dx)


def free_energy(state: SimState, grid: Grid1D, params: ModelParams, theta: float) -> float:
    rho, c = state.rho, state.c
    bulk = rho * thermo.energy(1.0 / rho, c, theta, params)
    grad = 0.5 * params.delta * rho * _cx(c, grid) ** 2
    kin = 0.5 * rho * state.u**2
    return float(np.sum(bulk + grad + kin) * grid.dx)


def free_energy_parts(state: SimState, grid: Grid1D, params: ModelParams, theta: float):
    rho, c = state.rho, state.c
    bulk = float(np.sum(rho * thermo.energy(1.0 / rho, c, theta, params)) * grid.dx)
    grad = float(np.sum(0.5 * params.delta * rho * _cx(c, grid) ** 2) * grid.dx)
    kin = float(np.sum(0.5 * rho * state.u**2) * grid.dx)
    return bulk, grad, kin


def snapshot_csv(state: SimState, grid: Grid1D) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "rho", "u", "c"])
    for row in zip(grid.centers, state.rho, state.u, state.c):
        w.writerow([repr(float(v)) for v in row])
    return buf.getvalue()
