"""Scalar root finding: sign-change scans and safeguarded Newton."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .errors import ConvergenceError


def safeguarded_newton(
    f: Callable[[float], float],
    fprime: Callable[[float], float],
    lo: float,
    hi: float,
    x0: float | None = None,
    ftol: float = 1e-13,
    xtol: float = 1e-15,
    maxiter: int = 200,
) -> float:
    """Newton iteration kept inside a sign-change bracket.

    A Newton step that leaves the current bracket, or fails to halve it,
    is replaced by a bisection step. ``f(lo)`` and ``f(hi)`` must differ in
    sign (or one of them vanish).
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise ConvergenceError(f"no sign change on [{lo}, {hi}]: f={flo:.3e}, {fhi:.3e}")
    # orient so that f(a) < 0 < f(b)
    a, b = (lo, hi) if flo < 0.0 else (hi, lo)
    x = 0.5 * (lo + hi) if x0 is None or not (min(lo, hi) < x0 < max(lo, hi)) else x0
    dx_old = abs(hi - lo)
    dx = dx_old
    fx = f(x)
    best_x, best_f = x, abs(fx)
    for _ in range(maxiter):
        if fx == 0.0:
            return x
        if fx < 0.0:
            a = x
        else:
            b = x
        dfx = fprime(x)
        lo_, hi_ = min(a, b), max(a, b)
        newton_ok = dfx != 0.0 and math.isfinite(dfx)
        if newton_ok:
            x_new = x - fx / dfx
            newton_ok = lo_ < x_new < hi_ and abs(2.0 * fx) <= abs(dx_old * dfx)
        dx_old = dx
        if newton_ok:
            dx = x - x_new
            x = x_new
        else:
            x_new = 0.5 * (lo_ + hi_)
            dx = x - x_new
            x = x_new
        fx = f(x)
        if abs(fx) < best_f:
            best_x, best_f = x, abs(fx)
        if best_f <= ftol and abs(dx) <= max(xtol, 4e-16 * abs(x)):
            return best_x
        if hi_ - lo_ <= max(xtol, 4e-16 * abs(x)):
            return best_x
    if best_f <= ftol:
        return best_x
    raise ConvergenceError(f"safeguarded Newton did not converge (|f|={best_f:.3e})")


def sign_change_brackets(x: np.ndarray, fx: np.ndarray) -> list[tuple[float, float]]:
    """Sub-intervals of a sampled grid on which ``fx`` changes sign.

    Exact zeros at a node yield a degenerate bracket ``(x_i, x_i)``.
    """
    out: list[tuple[float, float]] = []
    for i in range(len(x) - 1):
        if fx[i] == 0.0:
            out.append((float(x[i]), float(x[i])))
        elif fx[i] * fx[i + 1] < 0.0:
            out.append((float(x[i]), float(x[i + 1])))
    if len(x) and fx[-1] == 0.0:
        out.append((float(x[-1]), float(x[-1])))
    return out


def scan_roots(
    f: Callable[[float], float],
    fprime: Callable[[float], float],
    x: np.ndarray,
    fx: np.ndarray | None = None,
    ftol: float = 1e-13,
    dedupe: float = 1e-8,
) -> list[float]:
    """All roots of ``f`` detected by sign changes on the grid ``x``, polished."""
    if fx is None:
        fx = np.array([f(float(xi)) for xi in x])
    roots: list[float] = []
    for lo, hi in sign_change_brackets(x, fx):
        r = lo if lo == hi else safeguarded_newton(f, fprime, lo, hi, ftol=ftol)
        if not roots or abs(r - roots[-1]) > dedupe:
            roots.append(r)
    return roots
