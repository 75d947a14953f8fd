"""Time-domain memory kernels and their Sonnine partners.

k1, M1 belong to the distributed-order derivative and k2, M2 to its
Prabhakar-tempered variant.  Each has at least two evaluation routes so
that every closed form can be checked against an independent one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import special as sc

from ._quad import convolve, quad_logvar
from .config import EvalResult
from .errors import DomainError, Inapplicable, RouteUnavailable
from .lapinv import make_kernel_laplace, talbot_vector
from .specfun import EULER, PrabhakarParams, e1_scaled, ein, power_over_gamma, prabhakar_e
from .volterra import _nu_rows

KINDS = ("caputo", "prabhakar", "distributed", "distributed_prabhakar")
K2_ROUTES = ("nu_series", "convolution", "epsilon_diff", "talbot", "auto")
M2_ROUTES = ("exact_series", "convolution", "spectral", "talbot", "auto")

_VOLTERRA_T_MAX = 20.0
_SERIES_T_MAX = 10.0


@dataclass(frozen=True)
class MemoryKernel:
    """A memory kernel family with its parameters and diffusion coefficient B."""

    kind: str
    B: float = 1.0
    mu: float | None = None
    alpha: float | None = None
    gamma: float | None = None
    lam: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise DomainError(f"unknown kernel kind {self.kind!r}")
        if not self.B > 0:
            raise DomainError("B must be positive")
        if self.kind in ("caputo", "prabhakar") and not (self.mu is not None and 0 < self.mu < 1):
            raise DomainError("mu must lie in (0, 1)")
        if self.kind in ("prabhakar", "distributed_prabhakar"):
            for name in ("alpha", "gamma"):
                v = getattr(self, name)
                if v is None or not 0 < v < 1:
                    raise DomainError(f"{name} must lie in (0, 1)")
            if self.lam is None or not self.lam > 0:
                raise DomainError("lam must be positive")

    @classmethod
    def distributed(cls, B: float = 1.0) -> "MemoryKernel":
        return cls("distributed", B)

    @classmethod
    def distributed_prabhakar(cls, alpha: float, gamma: float, lam: float, B: float = 1.0) -> "MemoryKernel":
        return cls("distributed_prabhakar", B, alpha=alpha, gamma=gamma, lam=lam)

    @classmethod
    def caputo(cls, mu: float, B: float = 1.0) -> "MemoryKernel":
        return cls("caputo", B, mu=mu)

    @classmethod
    def prabhakar(cls, alpha: float, mu: float, gamma: float, lam: float, B: float = 1.0) -> "MemoryKernel":
        return cls("prabhakar", B, mu=mu, alpha=alpha, gamma=gamma, lam=lam)

    @property
    def label(self) -> str:
        return {"distributed": "k1", "distributed_prabhakar": "k2"}.get(self.kind, self.kind)


def _check_t(t: float) -> None:
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")


def _check_prab(alpha: float, gamma: float, lam: float) -> None:
    if not (0 < alpha < 1 and 0 < gamma < 1):
        raise DomainError("alpha and gamma must lie in (0, 1)")
    if not lam >= 0:
        raise DomainError("lam must be nonnegative")


# ---------------------------------------------------- spectral densities

def rho_k1(r):
    """Spectral density of k1: (1 + r) / (r (pi^2 + ln^2 r))."""
    r = np.asarray(r, dtype=float)
    lr = np.log(r)
    return (1.0 + r) / (r * (math.pi ** 2 + lr * lr))


def rho_m1(r):
    return 1.0 / (1.0 + np.asarray(r, dtype=float))


def rho_m2(alpha: float, gamma: float, lam: float, r):
    """(1/pi) Im M2hat(r e^{-i pi}), the density on the lower lip of the cut."""
    r = np.asarray(r, dtype=float)
    log_s = np.log(r) - 1j * math.pi
    s_pow = r ** (-alpha) * complex(math.cos(math.pi * alpha), math.sin(math.pi * alpha))
    F = log_s / (-r - 1.0) * (1.0 + lam * s_pow) ** (-gamma)
    return F.imag / math.pi


def _k1_rx(x: float) -> float:
    # r * rho_k1(r) in x = ln r; finite as r -> 0
    return (1.0 + math.exp(x)) / (math.pi ** 2 + x * x)


# ------------------------------------------------------------------ k1

def k1_time(t: float, route: str = "auto") -> EvalResult:
    """k1(t) = nu(t,-1) - nu(t): inverse of (s-1)/(s ln s).

    ``route`` is ``"volterra"``, ``"spectral"`` (the positive density
    (1+r)/(r(pi^2+ln^2 r))) or ``"auto"`` (Volterra while it is free of
    cancellation, spectral beyond).
    """
    _check_t(t)
    if route == "auto":
        route = "volterra" if t <= _VOLTERRA_T_MAX else "spectral"
    if route == "volterra":
        vals, errs = _nu_rows(t, np.array([-1.0, 0.0]))
        v = float(vals[0] - vals[1])
        err = float(errs.sum()) + 4e-16 * float(abs(vals).max())
        return EvalResult(v, err, 2, True, {"route": "volterra"})
    if route == "spectral":
        hx = lambda x: _k1_rx(x) * math.exp(-math.exp(x) * t)  # noqa: E731
        v, e = quad_logvar(hx, hi=math.log(800.0 / t), breaks=(0.0, math.log(1.0 / t)),
                           epsabs=1e-15, epsrel=1e-12)
        return EvalResult(v, e, 0, True, {"route": "spectral"})
    raise RouteUnavailable(f"unknown k1 route {route!r}")


def k1(t: float) -> float:
    return k1_time(t).value


def K1(t: float) -> float:
    """int_0^t k1 = nu(t) - nu(t, 1)."""
    _check_t(t)
    if t <= _VOLTERRA_T_MAX:
        vals, _ = _nu_rows(t, np.array([0.0, 1.0]))
        return float(vals[0] - vals[1])
    hx = lambda x: _k1_rx(x) * -math.expm1(-math.exp(x) * t)  # noqa: E731
    return quad_logvar(hx, breaks=(0.0, math.log(1.0 / t)), epsabs=1e-15, epsrel=1e-12)[0]


# ------------------------------------------------------------------ M1

def m1_time(t: float) -> float:
    """M1(t) = -e^t Ei(-t) = e^t E1(t)."""
    _check_t(t)
    return e1_scaled(t)


def W1(t: float) -> float:
    """int_0^t M1 = C + ln t + M1(t)."""
    _check_t(t)
    if t < 1.0:
        # same quantity without the cancellation of ln t against M1
        return -math.expm1(t) * (EULER + math.log(t)) + math.exp(t) * ein(t)
    return EULER + math.log(t) + e1_scaled(t)


# ------------------------------------------------------------------ k2

def _kprime_coeffs(alpha: float, gamma: float, lam: float, t: float, extra: float = 0.0):
    """c'_n = (-lam)^n (-gamma)_n / n! with orders alpha n, truncated for time t."""
    cs, qs = [], []
    c = 1.0
    best = 0.0
    for n in range(2000):
        if n > 0:
            c *= -lam * (-gamma + n - 1) / n
        q = alpha * n
        cs.append(c)
        qs.append(q)
        if c == 0.0:
            break
        qq = max(q - 1.0 + extra, t - 1.0)
        bound = abs(c) * float(power_over_gamma(t, np.array([qq]))[0]) * (2.0 + t)
        best = max(best, bound)
        if q - 1.0 > t and bound < 1e-18 * best:
            break
    return np.array(cs), np.array(qs)


def _nu_diff_series(alpha, gamma, lam, t, shift):
    """sum_n c'_n [nu(t, alpha n + shift) - nu(t, alpha n + shift + 1)]."""
    cs, qs = _kprime_coeffs(alpha, gamma, lam, t, shift + 1.0)
    vals, errs = _nu_rows(t, np.concatenate([qs + shift, qs + shift + 1.0]))
    n = len(cs)
    diff = vals[:n] - vals[n:]
    terms = cs * diff
    value = math.fsum(terms.tolist())
    err = float(np.abs(cs) @ (errs[:n] + errs[n:])) + 4e-16 * float(np.abs(cs) @ np.abs(vals[:n]))
    return value, err, n


def _e0_regular(alpha: float, gamma: float, lam: float, xi: float) -> float:
    """Pointwise part of e^gamma_{alpha,0}(lam; xi); the distribution also has a unit atom at 0."""
    return prabhakar_e(PrabhakarParams(alpha, 0.0, gamma, lam), xi).value


def k2_hat_talbot(alpha: float, gamma: float, lam: float, ts) -> np.ndarray:
    def F(s):
        with np.errstate(all="ignore"):
            return (s - 1.0) / (s * np.log(s)) * (1.0 + lam * s ** (-alpha)) ** gamma
    return talbot_vector(F, ts, m=32)


def k2_time(alpha: float, gamma: float, lam: float, t: float, route: str = "auto") -> EvalResult:
    """Distributed-order Prabhakar kernel k2(alpha, gamma; lam; t).

    Routes: ``nu_series`` (Volterra expansion), ``convolution`` (k1 convolved
    with e^{-gamma}_{alpha,0}; the latter carries a unit atom at 0 so k1
    enters once undelayed), ``epsilon_diff`` (eps^{-gamma}_{alpha,-1} -
    eps^{-gamma}_{alpha,0}), ``talbot`` (contour inversion), ``auto``.
    """
    _check_t(t)
    _check_prab(alpha, gamma, lam)
    if route == "auto":
        route = "nu_series" if t <= _VOLTERRA_T_MAX else "talbot"
    if lam == 0.0:
        res = k1_time(t)
        return EvalResult(res.value, res.abs_err, 1, True, {"route": route, "lam0": True})
    if route == "nu_series":
        v, e, n = _nu_diff_series(alpha, gamma, lam, t, -1.0)
        return EvalResult(v, e, n, True, {"route": route})
    if route == "epsilon_diff":
        from .volterra import VPArgs, vp_epsilon

        args_m1 = VPArgs(PrabhakarParams(alpha, 0.0, -gamma, lam), -1.0)
        args_0 = VPArgs(PrabhakarParams(alpha, 0.0, -gamma, lam), 0.0)
        a = vp_epsilon(args_m1, t)
        b = vp_epsilon(args_0, t)
        return EvalResult(a.value - b.value, a.abs_err + b.abs_err, a.terms, True, {"route": route})
    if route == "convolution":
        reg = lambda x: _e0_regular(alpha, -gamma, lam, x)  # noqa: E731
        v, e = convolve(k1, reg, t, A=K1)
        k1t = k1_time(t)
        return EvalResult(k1t.value + v, e + k1t.abs_err, 0, True, {"route": route})
    if route == "talbot":
        v = float(k2_hat_talbot(alpha, gamma, lam, [t])[0])
        v2 = float(talbot_vector(lambda s: (s - 1.0) / (s * np.log(s)) * (1.0 + lam * s ** (-alpha)) ** gamma,
                                 [t], m=24)[0])
        return EvalResult(v, abs(v - v2), 32, True, {"route": route})
    raise RouteUnavailable(f"unknown k2 route {route!r}; choose from {K2_ROUTES}")


def K2(alpha: float, gamma: float, lam: float, t: float) -> float:
    """int_0^t k2 = sum_n c'_n [nu(t, alpha n) - nu(t, alpha n + 1)]."""
    _check_t(t)
    return _nu_diff_series(alpha, gamma, lam, t, 0.0)[0]


# ------------------------------------------------------------------ M2

def _m2_series_terms(alpha, gamma, lam, t, integrate_once: bool = False):
    """Double series for M2 (or for its integral W2 when ``integrate_once``).

    M2 = sum_r c_r [ -ln t sum_{j>=0} h(alpha r + j) + sum_{j>=1} h(alpha r + j - 1) psi(alpha r + j) ]
    with h(v) = t^v / Gamma(v+1) and c_r = (gamma)_r (-lam)^r / r!.
    """
    lt = math.log(t)
    cs = []
    c = 1.0
    for r in range(400):
        if r > 0:
            c *= -lam * (gamma + r - 1) / r
        cs.append(c)
        mag = abs(c) * float(power_over_gamma(t, np.array([alpha * r]))[0])
        if r > 3 and mag * math.exp(t) * (abs(lt) + 3.0 + alpha * r) < 1e-18:
            break
        if c == 0.0:
            break
    cs = np.array(cs)
    R = len(cs)
    J = int(max(30, 3 * t + 30))
    ar = alpha * np.arange(R)[:, None]
    j = np.arange(0, J + 1)[None, :]
    shift = 1.0 if integrate_once else 0.0
    A = power_over_gamma(t, ar + j + shift).sum(axis=1)
    jj = j[:, 1:]
    Bm = (power_over_gamma(t, ar + jj - 1.0 + shift) * sc.digamma(ar + jj)).sum(axis=1)
    if integrate_once:
        # int_0^t of h(v-1) psi(v) is h(v) psi(v); the log term integrates by parts
        # and yields sum_j h(v_j + 1) / (v_j + 1) with v_j = alpha r + j.
        C = (power_over_gamma(t, ar + j + 1.0) / (ar + j + 1.0)).sum(axis=1)
        rows = -lt * A + C + Bm
    else:
        rows = -lt * A + Bm
    terms = cs * rows
    return terms, R, J


def m2_exact_series(alpha: float, gamma: float, lam: float, t: float) -> EvalResult:
    _check_t(t)
    terms, R, J = _m2_series_terms(alpha, gamma, lam, t)
    v = math.fsum(terms.tolist())
    err = 1e-15 * float(np.abs(terms).sum()) + abs(float(terms[-1]))
    diag = {"route": "exact_series", "r_terms": R, "j_terms": J,
            "normalization": "r=0 term kept; 1/(Gamma(ar)(ar)_j) read as 1/Gamma(ar+j)"}
    return EvalResult(v, err, R * J, True, diag)


def m2_time(alpha: float, gamma: float, lam: float, t: float, route: str = "auto") -> EvalResult:
    """Sonnine partner M2 of k2.

    Routes: ``exact_series`` (double series in t), ``convolution`` (M1
    convolved with e^gamma_{alpha,0}, atom at 0 included), ``spectral``
    (Bromwich density on the cut), ``talbot`` and ``auto``.
    """
    _check_t(t)
    _check_prab(alpha, gamma, lam)
    if lam == 0.0:
        return EvalResult(m1_time(t), 1e-16 * m1_time(t), 1, True, {"route": route, "lam0": True})
    if route == "auto":
        route = "exact_series" if t <= _SERIES_T_MAX else "spectral"
    if route == "exact_series":
        if t > _SERIES_T_MAX:
            raise RouteUnavailable("exact series is limited to t <= 10 (cancellation beyond)")
        return m2_exact_series(alpha, gamma, lam, t)
    if route == "convolution":
        reg = lambda x: _e0_regular(alpha, gamma, lam, x)  # noqa: E731
        v, e = convolve(m1_time, reg, t, A=W1)
        return EvalResult(m1_time(t) + v, e, 0, True, {"route": route})
    if route == "spectral":
        rx = lambda x: float(rho_m2(alpha, gamma, lam, np.array(math.exp(x)))) if x > -700 else 0.0  # noqa: E731
        hx = lambda x: rx(x) * math.exp(x - math.exp(x) * t)  # noqa: E731
        v, e = quad_logvar(hx, hi=math.log(800.0 / t), breaks=(0.0, math.log(1.0 / t)),
                           epsabs=1e-15, epsrel=1e-12)
        return EvalResult(v, e, 0, True, {"route": route})
    if route == "talbot":
        def F(s):
            with np.errstate(all="ignore"):
                return np.log(s) / (s - 1.0) * (1.0 + lam * s ** (-alpha)) ** (-gamma)
        v = float(talbot_vector(F, [t], m=32)[0])
        v2 = float(talbot_vector(F, [t], m=24)[0])
        return EvalResult(v, abs(v - v2), 32, True, {"route": route})
    raise RouteUnavailable(f"unknown M2 route {route!r}; choose from {M2_ROUTES}")


def m2(alpha: float, gamma: float, lam: float, t: float) -> float:
    return m2_time(alpha, gamma, lam, t).value


def W2(alpha: float, gamma: float, lam: float, t: float, route: str = "auto") -> float:
    """int_0^t M2: once-integrated double series, or the spectral form
    int rho(r) (1 - e^{-rt}) / r dr once the series cancels badly."""
    _check_t(t)
    if route == "auto":
        route = "series" if t <= _SERIES_T_MAX else "spectral"
    if route == "series":
        terms, _, _ = _m2_series_terms(alpha, gamma, lam, t, integrate_once=True)
        return math.fsum(terms.tolist())
    if route == "spectral":
        rx = lambda x: float(rho_m2(alpha, gamma, lam, np.array(math.exp(x)))) if x > -700 else 0.0  # noqa: E731
        hx = lambda x: rx(x) * -math.expm1(-math.exp(x) * t)  # noqa: E731
        # r rho(r) -> 1 at large r, so the cut at r = 1e15/t leaves a tail of order t 1e-15
        return quad_logvar(hx, hi=math.log(1e15 / t), breaks=(0.0, math.log(1.0 / t)),
                           epsabs=1e-15, epsrel=1e-12)[0]
    raise RouteUnavailable(f"unknown W2 route {route!r}")


# ------------------------------------------------------- Sonnine check

def sonnine_pair(kernel: MemoryKernel):
    """(k, K, M, W) callables: kernel, its integral, partner, its integral."""
    if kernel.kind == "distributed":
        return k1, K1, m1_time, W1
    if kernel.kind == "distributed_prabhakar":
        a, g, lam = kernel.alpha, kernel.gamma, kernel.lam
        return (lambda t: k2_time(a, g, lam, t).value,
                lambda t: K2(a, g, lam, t),
                lambda t: m2(a, g, lam, t),
                lambda t: W2(a, g, lam, t))
    if kernel.kind == "caputo":
        mu_ = kernel.mu
        return (lambda t: t ** (-mu_) / math.gamma(1 - mu_),
                lambda t: t ** (1 - mu_) / math.gamma(2 - mu_),
                lambda t: t ** (mu_ - 1) / math.gamma(mu_),
                lambda t: t ** mu_ / math.gamma(1 + mu_))
    raise RouteUnavailable(f"no time-domain pair for kind {kernel.kind!r}")


def sonnine_convolution(kernel: MemoryKernel, t: float) -> tuple[float, float]:
    _check_t(t)
    k, K, M, W = sonnine_pair(kernel)
    return convolve(k, M, t, A=K, B=W)


def sonnine_residual(kernel: MemoryKernel, t: float) -> float:
    """|int_0^t k(t - x) M(x) dx - 1|; zero in exact arithmetic for all t > 0."""
    v, _ = sonnine_convolution(kernel, t)
    return abs(v - 1.0)


# ----------------------------------------------------------- asymptotics

@dataclass(frozen=True)
class AsymptoticForm:
    regime: str
    expression: Callable[[float], float]
    description: str

    def __call__(self, t: float) -> float:
        return self.expression(t)


def tauberian_asymptote(ident: str, regime: str, *, alpha: float = 0.5, gamma: float = 0.5,
                        lam: float = 1.0, B: float = 1.0) -> AsymptoticForm:
    """Leading-order Tauberian behaviour of a kernel, partner or MSD.

    ``regime`` is ``"long"`` (t -> inf) or ``"short"`` (t -> 0).  Raises
    :class:`Inapplicable` where the Laplace symbol carries no power of s
    (k at large s) or a non-positive index (M at small s).
    """
    regime = {"longtime": "long", "shorttime": "short"}.get(regime.lower(), regime.lower())
    if regime not in ("long", "short"):
        raise DomainError("regime must be 'long' or 'short'")
    ag = alpha * gamma
    table = {
        ("k1", "long"): (lambda t: 1.0 / math.log(t), "1/ln t"),
        ("k2", "long"): (lambda t: lam ** gamma * t ** ag / (math.gamma(1 + ag) * math.log(t)),
                         "lam^gamma t^(alpha gamma) / (Gamma(1 + alpha gamma) ln t)"),
        ("M1", "short"): (lambda t: math.log(1.0 / t), "ln(1/t)"),
        ("M2", "short"): (lambda t: math.log(1.0 / t), "ln(1/t)"),
        ("msd1", "long"): (lambda t: 2 * B * math.log(t), "2B ln t"),
        ("msd1", "short"): (lambda t: 2 * B * t * math.log(1.0 / t), "2B t ln(1/t)"),
        ("msd2", "long"): (lambda t: 2 * B * lam ** (-gamma) * t ** (-ag) * math.log(t) / math.gamma(1 - ag),
                           "2B lam^-gamma t^(-alpha gamma) ln t / Gamma(1 - alpha gamma)"),
        ("msd2", "short"): (lambda t: 2 * B * t * math.log(1.0 / t), "2B t ln(1/t)"),
    }
    reasons = {
        ("k1", "short"): "k1hat ~ 1/ln s at large s has no power of s",
        ("k2", "short"): "k2hat ~ 1/ln s at large s has no power of s",
        ("M1", "long"): "M1hat ~ ln(1/s) at small s has index rho = 0",
        ("M2", "long"): "M2hat ~ s^(alpha gamma) ln(1/s) at small s has index rho < 0",
    }
    key = (ident, regime)
    if key in reasons:
        raise Inapplicable(reasons[key])
    if key not in table:
        raise DomainError(f"unknown asymptote id {ident!r}")
    fn, text = table[key]
    return AsymptoticForm(regime, fn, text)


def kernel_laplace(kernel: MemoryKernel, which: str = "k"):
    """Shortcut to :func:`ultraslow.lapinv.make_kernel_laplace`."""
    return make_kernel_laplace(kernel, which)
