"""Compiled finite-volume kernel for the default model (f = -log, quartic W).

Mirrors ``pde1d._rates_numpy`` cell by cell; ``advance`` runs the SSP-RK2
time loop without returning to Python between steps.
"""

import math

import numpy as np
from numba import njit

NG = 2


@njit(cache=True)
def _ghost(a, periodic):
    n = a.shape[0]
    out = np.empty(n + 2 * NG)
    out[NG:NG + n] = a
    for g in range(NG):
        if periodic:
            out[g] = a[n - NG + g]
            out[NG + n + g] = a[g]
        else:
            out[g] = a[0]
            out[NG + n + g] = a[n - 1]
    return out


@njit(cache=True)
def _vanleer(dm, dp):
    prod = dm * dp
    if prod <= 0.0:
        return 0.0
    return 2.0 * prod / (dm + dp)


@njit(cache=True)
def _face_flux(r, u, c, tau1):
    """Convective flux, conserved state and signal speed at one point."""
    tau = 1.0 / r
    gap = tau - c * tau1
    om = 1.0 - c
    p = om / gap
    a = math.sqrt(om * tau * tau / (gap * gap))
    mom = r * u
    return mom, mom * u + p, mom * c, mom, r * c, abs(u) + a


@njit(cache=True)
def rates(rho_c, mom_c, rc_c, dx, delta, nu, tau1, wa, wb, cstar, dtheta, periodic, muscl):
    n = rho_c.shape[0]
    rho = _ghost(rho_c, periodic)
    mom = _ghost(mom_c, periodic)
    rc = _ghost(rc_c, periodic)
    m = n + 2 * NG
    u = np.empty(m)
    c = np.empty(m)
    for i in range(m):
        u[i] = mom[i] / rho[i]
        c[i] = rc[i] / rho[i]
    sr = np.zeros(m)
    su = np.zeros(m)
    sc = np.zeros(m)
    if muscl:
        for i in range(1, m - 1):
            sr[i] = _vanleer(rho[i] - rho[i - 1], rho[i + 1] - rho[i])
            su[i] = _vanleer(u[i] - u[i - 1], u[i + 1] - u[i])
            sc[i] = _vanleer(c[i] - c[i - 1], c[i + 1] - c[i])
    sd = math.sqrt(delta)
    f_rho = np.empty(n + 1)
    f_mom = np.empty(n + 1)
    f_rc = np.empty(n + 1)
    for k in range(n + 1):
        L = NG - 1 + k
        R = L + 1
        fl0, fl1, fl2, ml, rcl, sl = _face_flux(rho[L] + 0.5 * sr[L], u[L] + 0.5 * su[L],
                                               c[L] + 0.5 * sc[L], tau1)
        fr0, fr1, fr2, mr, rcr, srr = _face_flux(rho[R] - 0.5 * sr[R], u[R] - 0.5 * su[R],
                                                c[R] - 0.5 * sc[R], tau1)
        alpha = max(sl, srr)
        rl = rho[L] + 0.5 * sr[L]
        rr = rho[R] - 0.5 * sr[R]
        f_rho[k] = 0.5 * (fl0 + fr0) - 0.5 * alpha * (rr - rl)
        fm = 0.5 * (fl1 + fr1) - 0.5 * alpha * (mr - ml)
        fc = 0.5 * (fl2 + fr2) - 0.5 * alpha * (rcr - rcl)
        rho_f = 0.5 * (rho[L] + rho[R])
        cx = (c[R] - c[L]) / dx
        ux = (u[R] - u[L]) / dx
        f_mom[k] = fm - nu * ux + delta * rho_f * cx * cx
        f_rc[k] = fc - sd * rho_f * cx
    d_rho = np.empty(n)
    d_mom = np.empty(n)
    d_rc = np.empty(n)
    for i in range(n):
        g = i + NG
        tau = 1.0 / rho[g]
        om = 1.0 - c[g]
        t2 = (tau - c[g] * tau1) / om
        e = c[g] - cstar
        wc = 4.0 * wa * e * e * e + 2.0 * wb * dtheta * e
        q = -(math.log(t2) - (t2 - tau1) / t2 + wc)
        d_rho[i] = -(f_rho[i + 1] - f_rho[i]) / dx
        d_mom[i] = -(f_mom[i + 1] - f_mom[i]) / dx
        d_rc[i] = -(f_rc[i + 1] - f_rc[i]) / dx + rho[g] * q / sd
    return d_rho, d_mom, d_rc


@njit(cache=True)
def dt_limit(rho, mom, rc, tau1, nu, delta, dx, cfl):
    smax = 0.0
    dmax = math.sqrt(delta)
    for i in range(rho.shape[0]):
        tau = 1.0 / rho[i]
        c = rc[i] / rho[i]
        gap = tau - c * tau1
        s = abs(mom[i] / rho[i]) + math.sqrt((1.0 - c) * tau * tau / (gap * gap))
        if s > smax:
            smax = s
        if nu / rho[i] > dmax:
            dmax = nu / rho[i]
    return cfl * min(dx / smax, dx * dx / (2.0 * dmax))


@njit(cache=True)
def first_invalid(rho, rc, tau1):
    """Index of the first cell outside the thermodynamic domain, else -1."""
    for i in range(rho.shape[0]):
        if not rho[i] > 0.0:
            return i
        c = rc[i] / rho[i]
        if not (c > 0.0 and c < 1.0):
            return i
        if not (1.0 / rho[i] - c * tau1 > 1e-12):
            return i
    return -1


@njit(cache=True)
def advance(rho, mom, rc, t, t_end, dx, delta, nu, tau1, wa, wb, cstar, dtheta,
            periodic, muscl, cfl, max_steps):
    """SSP-RK2 steps until ``t_end``; returns (rho, mom, rc, t, steps, bad_cell)."""
    steps = 0
    while t < t_end - 1e-12 and steps < max_steps:
        dt = dt_limit(rho, mom, rc, tau1, nu, delta, dx, cfl)
        if dt > t_end - t:
            dt = t_end - t
        a0, a1, a2 = rates(rho, mom, rc, dx, delta, nu, tau1, wa, wb, cstar, dtheta, periodic, muscl)
        r1 = rho + dt * a0
        m1 = mom + dt * a1
        c1 = rc + dt * a2
        bad = first_invalid(r1, c1, tau1)
        if bad >= 0:
            return rho, mom, rc, t, steps, bad
        b0, b1, b2 = rates(r1, m1, c1, dx, delta, nu, tau1, wa, wb, cstar, dtheta, periodic, muscl)
        r2 = 0.5 * (rho + r1 + dt * b0)
        m2 = 0.5 * (mom + m1 + dt * b1)
        c2 = 0.5 * (rc + c1 + dt * b2)
        bad = first_invalid(r2, c2, tau1)
        if bad >= 0:
            return rho, mom, rc, t, steps, bad
        rho, mom, rc = r2, m2, c2
        t += dt
        steps += 1
    return rho, mom, rc, t, steps, -1
