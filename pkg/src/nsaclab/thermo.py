"""Closed-form thermodynamics of the incompressible/compressible mixture.

The specific internal energy is

    U(tau, c) = Uhat(tau, c) + W(c, theta),
    Uhat(tau, c) = (1 - c) f(tau2),   tau2 = (tau - c tau1) / (1 - c),

where phase 1 is incompressible with specific volume ``tau1`` and phase 2
has energy ``f`` (``f = -log`` by default). Pressure and transformation
rate are ``p = -U_tau`` and ``q = -U_c``. Every function here accepts
scalars or numpy arrays.

All derivatives of ``Uhat`` follow from ``f, f', f''``:

    Uhat_tau     = f'(tau2)
    Uhat_c       = -f(tau2) + f'(tau2) (tau2 - tau1)
    Uhat_tautau  = f''(tau2) / (1 - c)
    Uhat_tauc    = f''(tau2) (tau2 - tau1) / (1 - c)
    Uhat_cc      = f''(tau2) (tau2 - tau1)**2 / (1 - c)

so the Hessian of ``Uhat`` is singular and ``sgn(Delta) = sgn(W_cc)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Union

import numpy as np

from .errors import ConvergenceError, DomainError, RangeError
from .roots import safeguarded_newton

GUARD = 1e-12


# -- mixing energy -----------------------------------------------------------


@dataclass(frozen=True)
class QuarticSymmetric:
    """W(c, theta) = a (c - c_star)**4 + b (theta - theta_star) (c - c_star)**2."""

    a: float = 1.0
    b: float = 1.0
    c_star: float = 0.5
    kind: str = field(default="QuarticSymmetric", init=False)

    def __post_init__(self):
        if self.a <= 0 or self.b <= 0:
            raise DomainError("QuarticSymmetric needs positive a and b")
        if not 0.0 < self.c_star < 1.0:
            raise DomainError("c_star must lie in (0, 1)")

    def evaluate(self, c, dtheta):
        e = np.asarray(c, dtype=float) - self.c_star
        bt = self.b * dtheta
        w = self.a * e**4 + bt * e**2
        wc = 4.0 * self.a * e**3 + 2.0 * bt * e
        wcc = 12.0 * self.a * e**2 + 2.0 * bt
        return w, wc, wcc

    def to_dict(self) -> dict:
        return {"kind": self.kind, "a": self.a, "b": self.b, "c_star": self.c_star}


@dataclass(frozen=True)
class Polynomial:
    """W(c, theta) = sum_k (coeffs[k] + theta_coeffs[k] (theta - theta_star)) (c - c_star)**k."""

    coeffs: tuple[float, ...]
    theta_coeffs: tuple[float, ...] = ()
    c_star: float = 0.5
    kind: str = field(default="Polynomial", init=False)

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(v) for v in self.coeffs))
        object.__setattr__(self, "theta_coeffs", tuple(float(v) for v in self.theta_coeffs))
        if not 0.0 < self.c_star < 1.0:
            raise DomainError("c_star must lie in (0, 1)")

    def _combined(self, dtheta):
        n = max(len(self.coeffs), len(self.theta_coeffs))
        a = np.zeros(n)
        a[: len(self.coeffs)] += self.coeffs
        a[: len(self.theta_coeffs)] += dtheta * np.asarray(self.theta_coeffs)
        return a

    def evaluate(self, c, dtheta):
        e = np.asarray(c, dtype=float) - self.c_star
        poly = np.polynomial.Polynomial(self._combined(dtheta))
        d1 = poly.deriv(1)
        d2 = poly.deriv(2)
        return poly(e), d1(e), d2(e)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "coeffs": list(self.coeffs),
            "theta_coeffs": list(self.theta_coeffs),
            "c_star": self.c_star,
        }


MixingEnergySpec = Union[QuarticSymmetric, Polynomial]


# -- phase-2 energy ------------------------------------------------------------


@dataclass(frozen=True)
class NegLog:
    """f(tau2) = -log(tau2)."""

    kind: str = field(default="NegLog", init=False)

    def f(self, t):
        return -np.log(t)

    def df(self, t):
        return -1.0 / np.asarray(t, dtype=float)

    def d2f(self, t):
        return 1.0 / np.asarray(t, dtype=float) ** 2

    def to_dict(self) -> dict:
        return {"kind": self.kind}


@dataclass(frozen=True)
class Custom:
    """User-supplied phase-2 energy with f' < 0 < f'' on (tau1, inf).

    ``df_inf`` is the limit of f' at infinity (0 for most energies).
    """

    f: Callable
    df: Callable
    d2f: Callable
    name: str = "custom"
    df_inf: float = 0.0
    kind: str = field(default="Custom", init=False)

    def check(self, tau1: float, samples: np.ndarray | None = None) -> bool:
        if samples is None:
            samples = tau1 + np.geomspace(1e-3, 1e3, 200)
        return bool(np.all(self.df(samples) < 0.0) and np.all(self.d2f(samples) > 0.0))

    def to_dict(self) -> dict:
        raise TypeError(f"custom phase-2 energy {self.name!r} is not serializable")


Phase2EnergySpec = Union[NegLog, Custom]


# -- parameters ----------------------------------------------------------------


@dataclass(frozen=True)
class ModelParams:
    tau1: float = 0.5
    delta: float = 1.0
    mu: float = 0.5
    lambda_v: float = 0.0
    theta_star: float = 1.0
    w_spec: MixingEnergySpec = field(default_factory=QuarticSymmetric)
    f_spec: Phase2EnergySpec = field(default_factory=NegLog)

    def __post_init__(self):
        if not 0.0 < self.tau1 < 1.0:
            raise DomainError(f"tau1 must lie in (0, 1), got {self.tau1}")
        if not self.delta > 0.0:
            raise DomainError(f"delta must be positive, got {self.delta}")
        if self.mu < 0.0 or 2.0 * self.mu + self.lambda_v < 0.0:
            raise DomainError("viscosities need mu >= 0 and 2 mu + lambda >= 0")

    @property
    def nu(self) -> float:
        """Longitudinal viscosity 2 mu + lambda."""
        return 2.0 * self.mu + self.lambda_v

    def to_dict(self) -> dict:
        return {
            "tau1": self.tau1,
            "delta": self.delta,
            "mu": self.mu,
            "lambda": self.lambda_v,
            "theta_star": self.theta_star,
            "W": self.w_spec.to_dict(),
            "f": self.f_spec.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "ModelParams":
        known = {"tau1", "delta", "mu", "lambda", "theta_star", "W", "f"}
        unknown = set(d) - known
        if unknown:
            raise DomainError(f"unknown model keys: {sorted(unknown)}")
        kw: dict[str, Any] = {}
        for key, attr in [("tau1", "tau1"), ("delta", "delta"), ("mu", "mu"),
                          ("lambda", "lambda_v"), ("theta_star", "theta_star")]:
            if key in d:
                kw[attr] = float(d[key])
        if "W" in d:
            kw["w_spec"] = _w_from_dict(d["W"])
        if "f" in d:
            kind = d["f"].get("kind")
            if kind != "NegLog":
                raise DomainError(f"unsupported f kind {kind!r}")
            kw["f_spec"] = NegLog()
        return cls(**kw)


def _w_from_dict(d: dict) -> MixingEnergySpec:
    d = dict(d)
    kind = d.pop("kind", "QuarticSymmetric")
    try:
        if kind == "QuarticSymmetric":
            return QuarticSymmetric(**d)
        if kind == "Polynomial":
            return Polynomial(**d)
    except TypeError as exc:
        raise DomainError(str(exc)) from None
    raise DomainError(f"unknown W kind {kind!r}")


@dataclass(frozen=True)
class FluidState:
    rho: float
    u: float
    c: float

    def __post_init__(self):
        for name in ("rho", "u", "c"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not self.rho > 0.0:
            raise DomainError(f"density must be positive, got {self.rho}")
        if not GUARD <= self.c <= 1.0 - GUARD:
            raise DomainError(f"mass fraction outside (0, 1), got {self.c}")

    @property
    def tau(self) -> float:
        return 1.0 / self.rho

    def tau2(self, params: ModelParams) -> float:
        return (self.tau - self.c * params.tau1) / (1.0 - self.c)


# -- domain helpers ------------------------------------------------------------


def _check_c(c):
    c = np.asarray(c, dtype=float)
    if np.any(~(c >= GUARD)) or np.any(~(1.0 - c >= GUARD)):
        raise DomainError("mass fraction outside (0, 1)")
    return c


def _tau2(tau, c, params: ModelParams):
    c = _check_c(c)
    tau = np.asarray(tau, dtype=float)
    gap = tau - c * params.tau1
    if np.any(~(gap >= GUARD)):
        raise DomainError("specific volume at or below c*tau1")
    t2 = gap / (1.0 - c)
    if isinstance(params.f_spec, Custom) and np.any(t2 <= params.tau1):
        raise DomainError("tau2 outside (tau1, inf) for custom f")
    return t2, c


def _rho_to_tau(rho):
    rho = np.asarray(rho, dtype=float)
    if np.any(~(rho > 0.0)):
        raise DomainError("density must be positive")
    return 1.0 / rho


# -- energies and derivatives --------------------------------------------------


def u_hat(tau, c, params: ModelParams):
    """Mixture energy (1 - c) f(tau2)."""
    t2, c = _tau2(tau, c, params)
    return (1.0 - c) * params.f_spec.f(t2)


def mixing_w(c, theta, params: ModelParams):
    """(W, W_c, W_cc) at temperature ``theta``."""
    c = _check_c(c)
    return params.w_spec.evaluate(c, theta - params.theta_star)


def energy(tau, c, theta, params: ModelParams):
    return u_hat(tau, c, params) + mixing_w(c, theta, params)[0]


def u_hat_derivatives(tau, c, params: ModelParams):
    """First and second partial derivatives of Uhat.

    Returns ``(U_tau, U_c, U_tautau, U_tauc, U_cc)``.
    """
    t2, c = _tau2(tau, c, params)
    fs = params.f_spec
    f0, f1, f2 = fs.f(t2), fs.df(t2), fs.d2f(t2)
    s = t2 - params.tau1
    om = 1.0 - c
    return f1, -f0 + f1 * s, f2 / om, f2 * s / om, f2 * s * s / om


def pressure(rho, c, params: ModelParams):
    """p = -U_tau = -f'(tau2); for f = -log this is (1 - c)/(tau - c tau1)."""
    t2, _ = _tau2(_rho_to_tau(rho), c, params)
    return -params.f_spec.df(t2)


def reaction_q(rho, c, theta, params: ModelParams):
    """Transformation rate q = -U_c."""
    tau = _rho_to_tau(rho)
    t2, c = _tau2(tau, c, params)
    fs = params.f_spec
    uc = -fs.f(t2) + fs.df(t2) * (t2 - params.tau1)
    return -(uc + params.w_spec.evaluate(c, theta - params.theta_star)[1])


def state_partials(rho, c, theta, params: ModelParams):
    """p, q and their (rho, c) derivatives.

    Returns ``(p, p_rho, p_c, q, q_rho, q_c)``.
    """
    tau = _rho_to_tau(rho)
    u_t, u_c, u_tt, u_tc, u_cc = u_hat_derivatives(tau, c, params)
    _, wc, wcc = params.w_spec.evaluate(np.asarray(c, dtype=float), theta - params.theta_star)
    tau2 = tau * tau
    p = -u_t
    q = -(u_c + wc)
    # d/drho = -tau**2 d/dtau
    return p, tau2 * u_tt, -u_tc, q, tau2 * u_tc, -(u_cc + wcc)


def sound_speed_sq(rho, c, params: ModelParams):
    """dp/drho at fixed c."""
    tau = _rho_to_tau(rho)
    return tau * tau * u_hat_derivatives(tau, c, params)[2]


# -- Gibbs picture -------------------------------------------------------------


def _check_p(p):
    p = np.asarray(p, dtype=float)
    if np.any(~(p > 0.0)):
        raise DomainError("pressure must be positive")
    return p


def gibbs_hat(p, c, params: ModelParams):
    """Ghat(p, c) = (1 - c)(1 + log p) + c p tau1 (phase-2 energy -log)."""
    p = _check_p(p)
    c = _check_c(c)
    return (1.0 - c) * (1.0 + np.log(p)) + c * p * params.tau1


def gibbs(p, c, theta, params: ModelParams):
    return gibbs_hat(p, c, params) + mixing_w(c, theta, params)[0]


def gibbs_c(p, c, theta, params: ModelParams):
    """G_c(p, c) = tau1 p - log p - 1 + W_c(c, theta)."""
    p = _check_p(p)
    return params.tau1 * p - np.log(p) - 1.0 + mixing_w(c, theta, params)[1]


def tau_of(p, c, params: ModelParams):
    """Specific volume Ghat_p = c tau1 + (1 - c)/p."""
    p = _check_p(p)
    c = _check_c(c)
    return c * params.tau1 + (1.0 - c) / p


def critical_pressure(params: ModelParams) -> float:
    """Root in (0, 1) of tau1 p - log p - 1 = 0."""
    t1 = params.tau1
    g = lambda p: t1 * p - math.log(p) - 1.0
    dg = lambda p: t1 - 1.0 / p
    # g(0+) = +inf, g(1) = tau1 - 1 < 0
    lo, hi = 1e-6, 1.0
    while g(lo) <= 0.0:
        lo *= 1e-3
        if lo < 1e-200:
            raise ConvergenceError("could not bracket the critical pressure")
    if g(hi) >= 0.0:
        raise ConvergenceError("could not bracket the critical pressure")
    # bisect to a modest bracket, then Newton within it
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if g(mid) > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-6:
            break
    p = safeguarded_newton(g, dg, lo, hi, ftol=1e-15)
    for _ in range(3):
        step = g(p) / dg(p)
        if not math.isfinite(step) or step == 0.0:
            break
        p -= step
    return p


def legendre_gibbs(f_spec: Phase2EnergySpec, p: float, c: float, params: ModelParams,
                   tol: float = 1e-14) -> float:
    """Ghat(p, c) = min over tau2 of (1 - c) f(tau2) + p (c tau1 + (1 - c) tau2).

    The minimizer solves f'(tau2) = -p; f'' > 0 makes it unique.
    """
    c = float(_check_c(c))
    t1 = params.tau1
    df_inf = getattr(f_spec, "df_inf", 0.0)
    upper = -float(f_spec.df(t1 * (1.0 + 1e-15)))
    lower = -df_inf
    if not lower < p < upper:
        raise RangeError(f"p={p} outside the range ({lower}, {upper}) of -f'")
    h = lambda t: float(f_spec.df(t)) + p
    dh = lambda t: float(f_spec.d2f(t))
    lo = t1 * (1.0 + 1e-15)
    hi = 2.0 * t1 + 1.0
    while h(hi) < 0.0:
        hi *= 2.0
        if hi > 1e300:
            raise ConvergenceError("could not bracket the Legendre minimizer")
    t2 = safeguarded_newton(h, dh, lo, hi, ftol=tol * max(1.0, p))
    return float((1.0 - c) * f_spec.f(t2) + p * (c * t1 + (1.0 - c) * t2))


# -- structural identities -----------------------------------------------------


def delta_identity(tau, c, theta, params: ModelParams, h: float = 1e-4,
                   zero_tol: float = 1e-7):
    """Delta = U_tautau U_cc - U_tauc**2 by central differences of U.

    Returns ``(Delta, sign_ok)``. ``sign_ok`` requires sgn(Delta) = sgn(W_cc)
    (both counted as zero below ``zero_tol``) and a vanishing finite-difference
    Ghat_cc at the local pressure.
    """
    _tau2(tau, c, params)
    U = lambda t, x: float(energy(t, x, theta, params))
    u0 = U(tau, c)
    u_tt = (U(tau + h, c) - 2 * u0 + U(tau - h, c)) / h**2
    u_cc = (U(tau, c + h) - 2 * u0 + U(tau, c - h)) / h**2
    u_tc = (U(tau + h, c + h) - U(tau + h, c - h) - U(tau - h, c + h) + U(tau - h, c - h)) / (4 * h * h)
    delta = u_tt * u_cc - u_tc**2
    wcc = float(mixing_w(c, theta, params)[2])
    sgn = lambda v: 0 if abs(v) <= zero_tol else (1 if v > 0 else -1)
    p = float(pressure(1.0 / tau, c, params))
    hg = 1e-3
    g_cc = (float(gibbs_hat(p, c + hg, params)) - 2 * float(gibbs_hat(p, c, params))
            + float(gibbs_hat(p, c - hg, params))) / hg**2
    sign_ok = sgn(delta) == sgn(wcc) and abs(g_cc) <= 1e-6
    return delta, sign_ok


def scalar_partials(rho: float, c: float, theta: float, params: ModelParams):
    """Scalar fast path of :func:`state_partials` for ODE right-hand sides."""
    fs, ws = params.f_spec, params.w_spec
    if not (isinstance(fs, NegLog) and isinstance(ws, QuarticSymmetric)):
        return tuple(float(v) for v in state_partials(rho, c, theta, params))
    if not (rho > 0.0 and GUARD <= c <= 1.0 - GUARD):
        raise DomainError("state outside the thermodynamic domain")
    tau = 1.0 / rho
    t1 = params.tau1
    gap = tau - c * t1
    if gap < GUARD:
        raise DomainError("specific volume at or below c*tau1")
    om = 1.0 - c
    t2 = gap / om
    s = t2 - t1
    f2 = 1.0 / (t2 * t2)
    e = c - ws.c_star
    bt = ws.b * (theta - params.theta_star)
    wc = 4.0 * ws.a * e**3 + 2.0 * bt * e
    wcc = 12.0 * ws.a * e * e + 2.0 * bt
    tt = tau * tau
    p = 1.0 / t2
    q = -(math.log(t2) - s / t2 + wc)
    return p, tt * f2 / om, -f2 * s / om, q, tt * f2 * s / om, -(f2 * s * s / om + wcc)
