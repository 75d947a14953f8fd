"""Volterra functions nu, mu and the Volterra-Prabhakar functions epsilon.

Routes:

* ``u_integral``: quadrature in the order variable u of Prabhakar functions.
* ``nu_series`` / ``mu_series``: expansion in Volterra functions nu(t, alpha*n + p).
* ``bromwich``: e^t / 2^gamma minus a real spectral integral (lam = 1 only).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._quad import panel_width, quad_logvar, u_integral
from .config import EvalConfig, EvalResult
from .errors import DomainError, NonConvergence, RouteUnavailable
from .specfun import PrabhakarParams, power_over_gamma

ROUTES_EPS = ("u_integral", "nu_series", "bromwich")
ROUTES_EPS_GEN = ("u_integral", "mu_series")


@dataclass(frozen=True)
class VolterraArgs:
    """Arguments of mu(t, beta, alpha_shift)."""

    t: float
    beta: float = 0.0
    alpha_shift: float = 0.0

    def __post_init__(self) -> None:
        if not self.t > 0:
            raise DomainError(f"t must be positive, got {self.t}")
        if not self.beta > -1:
            raise DomainError(f"beta must exceed -1, got {self.beta}")


@dataclass(frozen=True)
class VPArgs:
    """Parameters of epsilon^gamma_{alpha,beta,p}(lam; t)."""

    params: PrabhakarParams
    p: float = 0.0
    beta_weight: float = 0.0

    def __post_init__(self) -> None:
        if not self.beta_weight > -1:
            raise DomainError(f"beta_weight must exceed -1, got {self.beta_weight}")

    @classmethod
    def of(cls, alpha: float, gamma: float, lam: float = 1.0, p: float = 0.0, beta: float = 0.0) -> "VPArgs":
        return cls(PrabhakarParams(alpha, 0.0, gamma, lam), p, beta)


# ------------------------------------------------------------ Volterra

def _nu_rows(t: float, qs: np.ndarray, beta: float = 0.0, rtol: float = 1e-15):
    """int_0^inf u^beta t^(u+q)/Gamma(u+q+1) du for every q in ``qs``."""
    qs = np.atleast_1d(np.asarray(qs, dtype=float))

    def fn(u):
        return power_over_gamma(t, u[None, :] + qs[:, None])

    peak = max(0.0, t - float(qs.min())) + 1.0
    val, err, _ = u_integral(fn, beta=beta, width=panel_width(t), peak=peak, rtol=rtol)
    return val, err


def nu(t: float, q: float = 0.0) -> float:
    """Volterra function nu(t, q) = int_0^inf t^(u+q)/Gamma(u+q+1) du."""
    if not t > 0:
        raise DomainError("t must be positive")
    return float(_nu_rows(t, np.array([q]))[0][0])


def nu_many(t: float, qs) -> np.ndarray:
    """nu(t, q) for an array of orders q sharing one quadrature."""
    if not t > 0:
        raise DomainError("t must be positive")
    return _nu_rows(t, np.asarray(qs, dtype=float))[0]


def mu(t: float, beta: float, a: float = 0.0) -> float:
    """mu(t, beta, a); see :func:`volterra_mu`."""
    return volterra_mu(VolterraArgs(t, beta, a)).value


def volterra_mu(args: VolterraArgs, config: EvalConfig | None = None) -> EvalResult:
    """mu(t,beta,a) = Gamma(1+beta)^-1 int_0^inf t^(u+a) u^beta / Gamma(u+a+1) du."""
    val, err = _nu_rows(args.t, np.array([args.alpha_shift]), beta=args.beta)
    g = math.gamma(1.0 + args.beta)
    return EvalResult(float(val[0]) / g, float(err[0]) / g, 0, True, {"route": "u_integral"})


# ---------------------------------------------------- Volterra-Prabhakar

def vp_coefficients(alpha: float, gamma: float, lam: float, p: float, t: float,
                    rtol: float = 1e-17, max_terms: int = 4000):
    """Coefficients c_n = (-lam)^n (gamma)_n / n! and orders q_n = alpha n + p.

    The list stops once |c_n| times a bound on nu(t, q_n) is negligible.
    """
    cs = []
    qs = []
    c = 1.0
    best = 0.0
    quiet = 0
    for n in range(max_terms):
        if n > 0:
            c *= -lam * (gamma + n - 1) / n
        q = alpha * n + p
        cs.append(c)
        qs.append(q)
        if c == 0.0:
            break
        # nu(t,q) <~ (1 + t) t^q' / Gamma(q'+1) with q' = max(q, t)
        qq = max(q, t - 1.0)
        bound = abs(c) * float(power_over_gamma(t, np.array([qq]))[0]) * (2.0 + t)
        best = max(best, bound)
        if q > t and bound <= rtol * best:
            quiet += 1
            if quiet >= 3:
                break
        else:
            quiet = 0
    else:
        raise NonConvergence("Volterra-Prabhakar series did not terminate")
    return np.array(cs), np.array(qs)


def _r_ktilde_logr(alpha: float, gamma: float, p: float, x):
    """r * K-tilde(r) written in x = ln r, finite for every real x."""
    x = np.asarray(x, dtype=float)
    with np.errstate(over="ignore", under="ignore", invalid="ignore", divide="ignore"):
        theta = np.arctan2(math.sin(math.pi * alpha), math.cos(math.pi * alpha) + np.exp(-alpha * x))
        phase = math.pi * (alpha * gamma - p) - gamma * theta
        # log of (r^(2 alpha) + 2 r^alpha cos(pi alpha) + 1)^(gamma/2), stable on both ends
        big = alpha * x > 0
        ax = np.where(big, -alpha * x, alpha * x)
        e = np.exp(ax)
        inner = np.log1p(2.0 * e * math.cos(math.pi * alpha) + e * e)
        log_mod = (gamma / 2.0) * np.where(big, 2.0 * alpha * x + inner, inner)
        num = x * np.sin(phase) - math.pi * np.cos(phase)
        out = -np.exp((alpha * gamma - p) * x - log_mod) * num / (math.pi * (math.pi ** 2 + x * x))
        out = np.where(np.isfinite(out), out, 0.0)
    return out


def spectral_kernel(alpha: float, gamma: float, p: float, r):
    """K^gamma_{alpha,p}(r) of the Bromwich representation (lam = 1).

    Scalar or array ``r``.  The angle theta is taken with atan2 so it stays
    continuous where cos(pi alpha) + r^-alpha changes sign.
    """
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr <= 0):
        raise DomainError("spectral kernel requires r > 0")
    out = -_r_ktilde_logr(alpha, gamma, p, np.log(r_arr)) / r_arr
    return float(out) if np.ndim(r) == 0 else out


def spectral_kernel_tilde(alpha: float, gamma: float, p: float, r):
    """K-tilde = -K."""
    k = spectral_kernel(alpha, gamma, p, r)
    return -k


def spectral_integral(alpha: float, gamma: float, p: float, t: float | None = None):
    """int_0^inf e^{-r t} K-tilde(r) dr (t=None drops the exponential)."""
    if t is None:
        hx = lambda x: float(_r_ktilde_logr(alpha, gamma, p, x))  # noqa: E731
        return quad_logvar(hx, breaks=(0.0,), epsabs=1e-15, epsrel=1e-13)
    hx = lambda x: math.exp(-math.exp(x) * t) * float(_r_ktilde_logr(alpha, gamma, p, x))  # noqa: E731
    hi = math.log(800.0 / t)
    return quad_logvar(hx, hi=hi, breaks=(0.0, math.log(1.0 / t)), epsabs=1e-15, epsrel=1e-13)


def _check_t(t: float) -> None:
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")


def _eps_u_integral(alpha, gamma, lam, p, beta, t):
    cs, qs = vp_coefficients(alpha, gamma, lam, p, t)

    def fn(u):
        return cs @ power_over_gamma(t, u[None, :] + qs[:, None])

    peak = max(0.0, t - p) + 1.0
    val, err, panels = u_integral(fn, beta=beta, width=panel_width(t), peak=peak)
    err = float(err) + 1e-16 * float(np.abs(cs).max()) * max(1.0, abs(float(val)))
    return EvalResult(float(val), err, len(cs), True, {"route": "u_integral", "panels": panels})


def _eps_series(alpha, gamma, lam, p, beta, t, route):
    cs, qs = vp_coefficients(alpha, gamma, lam, p, t)
    vals, errs = _nu_rows(t, qs, beta=beta)
    terms = cs * vals
    value = math.fsum(terms.tolist())
    err = float(np.abs(cs) @ errs) + float(abs(terms[-1]))
    err += 4e-16 * float(np.abs(terms).sum())
    return EvalResult(value, err, len(cs), True, {"route": route})


def _eps_bromwich(alpha, gamma, lam, p, t):
    if lam != 1.0:
        raise RouteUnavailable("the Bromwich route is available only for lam = 1")
    if not (0 < alpha <= 1) or gamma < 0 or p > alpha * gamma + 1e-15:
        raise RouteUnavailable("the Bromwich route needs 0 < alpha <= 1, gamma >= 0, p <= alpha*gamma")
    integral, err = spectral_integral(alpha, gamma, p, t)
    value = math.exp(t) / 2.0 ** gamma - integral
    return EvalResult(value, err + 1e-15 * abs(value), 0, True, {"route": "bromwich"})


def vp_epsilon(args: VPArgs, t: float, route: str = "u_integral") -> EvalResult:
    """Volterra-Prabhakar function epsilon^gamma_{alpha,p}(lam; t).

    Defined as int_0^inf e^gamma_{alpha,u+p+1}(lam; t) du, with Laplace
    transform s^(alpha gamma - p - 1) / ((s^alpha + lam)^gamma ln s).
    """
    _check_t(t)
    pr = args.params
    if route == "u_integral":
        return _eps_u_integral(pr.alpha, pr.gamma, pr.lam, args.p, 0.0, t)
    if route == "nu_series":
        return _eps_series(pr.alpha, pr.gamma, pr.lam, args.p, 0.0, t, "nu_series")
    if route == "bromwich":
        return _eps_bromwich(pr.alpha, pr.gamma, pr.lam, args.p, t)
    raise RouteUnavailable(f"unknown route {route!r}; choose from {ROUTES_EPS}")


def vp_epsilon_gen(args: VPArgs, t: float, route: str = "u_integral") -> EvalResult:
    """Generalized form epsilon^gamma_{alpha,beta,p}(lam; t) = int_0^inf u^beta e^gamma_{alpha,u+p+1}(lam;t) du.

    The ``mu_series`` route uses Gamma(1+beta) sum_n c_n mu(t, beta, alpha n + p).
    """
    _check_t(t)
    pr = args.params
    if route == "u_integral":
        return _eps_u_integral(pr.alpha, pr.gamma, pr.lam, args.p, args.beta_weight, t)
    if route == "mu_series":
        return _eps_series(pr.alpha, pr.gamma, pr.lam, args.p, args.beta_weight, t, "mu_series")
    raise RouteUnavailable(f"unknown route {route!r}; choose from {ROUTES_EPS_GEN}")


def epsilon_raw(alpha: float, gamma: float, lam: float, p: float, t: float, beta: float = 0.0) -> float:
    """Unvalidated epsilon^gamma_{alpha,beta,p}(lam; t) allowing any real lam.

    Used where the growing branch lam < 0 appears (the PDF series).
    """
    _check_t(t)
    return _eps_u_integral(alpha, gamma, lam, p, beta, t).value
