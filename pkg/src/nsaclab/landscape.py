"""The reduced landscape Gamma(c, y) whose level sets carry planar profiles.

    Gamma(c, y) = Ghat(P(c, y), c) + W(c, theta) + y**2 / 2

with ``P`` the positive root of (p - pi)(c tau1 p + 1 - c) + y**2 p = 0.
Here ``y = sqrt(delta) c'``, so the root encodes the no-flux momentum balance
p + rho y**2 = pi and Gamma itself does not depend on delta.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np
from skimage import measure

from . import thermo
from .errors import DomainError
from .roots import scan_roots
from .thermo import ModelParams

SADDLE = "Saddle"
MAXIMUM = "Maximum"
MINIMUM = "Minimum"
DEGENERATE = "Degenerate"

DEFAULT_WINDOW = (0.02, 0.98, -0.35, 0.35)
DEFAULT_CELLS = 400


@dataclass(frozen=True)
class PhasePoint:
    c: float
    y: float


@dataclass(frozen=True)
class LandscapeParams:
    theta: float
    pi: float

    def __post_init__(self):
        if not self.pi > 0.0:
            raise DomainError(f"pi must be positive, got {self.pi}")


@dataclass(frozen=True)
class CriticalPoint:
    point: PhasePoint
    kind: str
    level: float
    eigenvalues: tuple[float, float] = (0.0, 0.0)


def _coefs(c, y, pi, tau1):
    a = c * tau1
    b = 1.0 - c - c * tau1 * pi + y * y
    k = -(1.0 - c) * pi
    return a, b, k


def p_root(c, y, pi, params: ModelParams):
    """Positive root of c tau1 p**2 + (1 - c - c tau1 pi + y**2) p - (1 - c) pi."""
    c = np.asarray(c, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(~((c > 0.0) & (c < 1.0))):
        raise DomainError("mass fraction outside (0, 1)")
    if not pi > 0.0:
        raise DomainError("pi must be positive")
    a, b, k = _coefs(c, y, pi, params.tau1)
    disc = np.sqrt(b * b - 4.0 * a * k)
    # a > 0 > k: roots of opposite sign; pick the cancellation-free branch
    qq = -0.5 * (b + np.where(b >= 0.0, disc, -disc))
    return np.where(b >= 0.0, k / qq, qq / np.where(a > 0.0, a, 1.0))


def gamma(c, y, lp: LandscapeParams, params: ModelParams):
    P = p_root(c, y, lp.pi, params)
    return thermo.gibbs_hat(P, c, params) + thermo.mixing_w(c, lp.theta, params)[0] + 0.5 * np.asarray(y) ** 2


def gamma_derivatives(c: float, y: float, lp: LandscapeParams, params: ModelParams):
    """Gradient and Hessian of Gamma by implicit differentiation of the root.

    Returns ``(grad, hess)`` ordered (c, y).
    """
    t1, pi = params.tau1, lp.pi
    P = float(p_root(c, y, pi, params))
    _, wc, wcc = (float(v) for v in thermo.mixing_w(c, lp.theta, params))
    # constraint F(p, c, y) and its partials
    F_p = 2.0 * c * t1 * P + 1.0 - c - c * t1 * pi + y * y
    F_c = (P - pi) * (t1 * P - 1.0)
    F_y = 2.0 * y * P
    F_pp = 2.0 * c * t1
    F_pc = 2.0 * t1 * P - 1.0 - t1 * pi
    F_py = 2.0 * y
    F_yy = 2.0 * P
    # Ghat partials at (P, c)
    G_p = c * t1 + (1.0 - c) / P
    G_pp = -(1.0 - c) / (P * P)
    G_pc = t1 - 1.0 / P
    G_c = t1 * P - np.log(P) - 1.0

    P_c = -F_c / F_p
    P_y = -F_y / F_p
    P_cc = -(2.0 * F_pc * P_c + F_pp * P_c * P_c) / F_p
    P_cy = -(F_pc * P_y + F_py * P_c + F_pp * P_c * P_y) / F_p
    P_yy = -(F_yy + 2.0 * F_py * P_y + F_pp * P_y * P_y) / F_p

    g_c = G_p * P_c + G_c + wc
    g_y = G_p * P_y + y
    h_cc = G_pp * P_c * P_c + G_p * P_cc + 2.0 * G_pc * P_c + wcc
    h_cy = G_pp * P_c * P_y + G_p * P_cy + G_pc * P_y
    h_yy = G_pp * P_y * P_y + G_p * P_yy + 1.0
    return np.array([g_c, g_y]), np.array([[h_cc, h_cy], [h_cy, h_yy]])


def classify(hess: np.ndarray, tol: float = 1e-8) -> tuple[str, tuple[float, float]]:
    ev = np.linalg.eigvalsh(hess)
    pair = (float(ev[0]), float(ev[1]))
    if np.any(np.abs(ev) < tol):
        return DEGENERATE, pair
    if ev[0] > 0:
        return MINIMUM, pair
    if ev[1] < 0:
        return MAXIMUM, pair
    return SADDLE, pair


def axis_roots(lp: LandscapeParams, params: ModelParams, eps: float = 1e-3,
               step: float = 1e-3) -> list[float]:
    """Roots of G_c(pi, ., theta) on (eps, 1 - eps), sign scan plus Newton polish."""
    n = int(round((1.0 - 2.0 * eps) / step))
    grid = np.linspace(eps, 1.0 - eps, n + 1)
    f = lambda c: float(thermo.gibbs_c(lp.pi, c, lp.theta, params))
    fp = lambda c: float(thermo.mixing_w(c, lp.theta, params)[2])
    fx = thermo.gibbs_c(lp.pi, grid, lp.theta, params)
    return scan_roots(f, fp, grid, fx, ftol=1e-13)


def find_critical_points(lp: LandscapeParams, params: ModelParams,
                         eps: float = 1e-3) -> list[CriticalPoint]:
    """Critical points of Gamma, all on y = 0, classified by the Hessian.

    Off the axis, dGamma/dy = -y (1 - c + c tau1 pi - y**2) / F_p, which
    vanishes only on y**2 = 1 - c + c tau1 pi, outside any window used here.
    """
    out = []
    for c in axis_roots(lp, params, eps=eps):
        _, hess = gamma_derivatives(c, 0.0, lp, params)
        kind, ev = classify(hess)
        out.append(CriticalPoint(PhasePoint(c, 0.0), kind, float(gamma(c, 0.0, lp, params)), ev))
    return out


def off_axis_critical_y2(c, pi, params: ModelParams):
    """The y**2 at which dGamma/dy vanishes off the axis."""
    return 1.0 - c + c * params.tau1 * pi


def evaluate_grid(lp: LandscapeParams, params: ModelParams, window=DEFAULT_WINDOW,
                  n_cells: int = DEFAULT_CELLS):
    c_min, c_max, y_min, y_max = _check_window(window)
    cs = np.linspace(c_min, c_max, n_cells + 1)
    ys = np.linspace(y_min, y_max, n_cells + 1)
    C, Y = np.meshgrid(cs, ys, indexing="ij")
    return cs, ys, gamma(C, Y, lp, params)


def _check_window(window):
    c_min, c_max, y_min, y_max = (float(v) for v in window)
    if not (0.0 < c_min < c_max < 1.0) or not y_min < y_max:
        raise DomainError(f"invalid window {window}")
    return c_min, c_max, y_min, y_max


@dataclass(frozen=True)
class Polyline:
    level: float
    c: np.ndarray
    y: np.ndarray


def contours(lp: LandscapeParams, params: ModelParams, window=DEFAULT_WINDOW,
             n_cells: int = DEFAULT_CELLS, levels=(), grid=None) -> list[Polyline]:
    """Marching-squares isolines of Gamma on a regular grid over ``window``."""
    if grid is None:
        grid = evaluate_grid(lp, params, window, n_cells)
    cs, ys, Z = grid
    out = []
    for level in levels:
        if not np.isfinite(level):
            raise DomainError("contour levels must be finite")
        if level < Z.min() or level > Z.max():
            continue
        for path in measure.find_contours(Z, level):
            ic, iy = path[:, 0], path[:, 1]
            out.append(Polyline(float(level),
                                np.interp(ic, np.arange(len(cs)), cs),
                                np.interp(iy, np.arange(len(ys)), ys)))
    return out


def contours_csv(polylines: list[Polyline]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["polyline", "level", "c", "y"])
    for k, pl in enumerate(polylines):
        for c, y in zip(pl.c, pl.y):
            w.writerow([k, repr(pl.level), repr(float(c)), repr(float(y))])
    return buf.getvalue()


def panel_levels(crit: list[CriticalPoint], n_around: int = 12, base: float = 1e-3) -> list[float]:
    """Saddle level(s) plus ``n_around`` levels geometrically spaced about them."""
    saddles = [cp.level for cp in crit if cp.kind in (SADDLE, DEGENERATE)]
    if not saddles:
        saddles = [cp.level for cp in crit]
    if not saddles:
        return []
    ref = float(np.mean(saddles))
    half = n_around // 2
    offsets = [base * 2.0**k for k in range(half)]
    levels = set(saddles)
    levels.update(ref + o for o in offsets)
    levels.update(ref - o for o in offsets)
    return sorted(levels)
