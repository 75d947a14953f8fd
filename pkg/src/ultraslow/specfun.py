"""Scalar special functions: Prabhakar/Mittag-Leffler, exponential integrals,
digamma and harmonic numbers, and generalized hypergeometric series."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import mpmath as mp
import numpy as np
from scipy import special as sc

from .config import DEFAULT_CONFIG, EvalConfig, EvalResult, SeriesConfig
from .errors import DomainError, NonConvergence

EULER = 0.57721566490153286060651209008240243
_MAX_DPS = 4000


@dataclass(frozen=True)
class PrabhakarParams:
    """Parameters (alpha, beta, gamma, lam) of e^gamma_{alpha,beta}(lam; t)."""

    alpha: float
    beta: float
    gamma: float
    lam: float = 0.0

    def __post_init__(self) -> None:
        if not self.alpha > 0:
            raise DomainError(f"alpha must be positive, got {self.alpha}")
        if not self.lam >= 0:
            raise DomainError(f"lam must be nonnegative, got {self.lam}")


# ---------------------------------------------------------------- helpers

def _is_nonpositive_int(x: float) -> bool:
    return x <= 0 and float(x).is_integer()


def _finish(value, err, terms, converged, cfg: SeriesConfig, what: str, **diag) -> EvalResult:
    if not converged and cfg.raise_on_failure:
        raise NonConvergence(f"{what}: no convergence after {terms} terms (err~{float(err):.3g})")
    return EvalResult(float(value), float(err), terms, converged, diag)


def _sum_series(term_fn, cfg: SeriesConfig, precision: str, start_dps: int = 30):
    """Sum sum_r term_fn(r) in mpmath with precision escalation.

    ``term_fn(r, prev_coef)`` must return ``(term, coef)`` where ``coef`` is
    carried between calls (Pochhammer recurrences) and ``term`` is an mpf.
    Returns (sum, err, n_terms, converged, dps).
    """
    dps = start_dps if precision == "extended" else 15
    while True:
        with mp.workdps(dps):
            s = mp.mpf(0)
            coef = None
            prev_abs = None
            big = mp.mpf(0)
            small_run = 0
            past_peak = False
            err = mp.inf
            converged = False
            r = 0
            for r in range(cfg.max_terms):
                term, coef, eventual = term_fn(r, coef)
                s += term
                a = abs(term)
                if a > big:
                    big = a
                if coef == 0:
                    err = mp.mpf(0)
                    converged = True
                    r += 1
                    break
                if prev_abs is not None and eventual and a <= prev_abs:
                    past_peak = True
                tol = max(cfg.abs_tol, cfg.rel_tol * abs(s))
                if past_peak:
                    q = a / prev_abs if prev_abs else mp.mpf(0)
                    tail = a * q / (1 - q) if q < 1 else mp.inf
                    err = tail
                    small_run = small_run + 1 if a <= tol else 0
                    if small_run >= 2:
                        converged = True
                        r += 1
                        break
                else:
                    err = mp.inf
                prev_abs = a
            else:
                r = cfg.max_terms
            rounding = big * mp.mpf(10) ** (-dps) * (r + 1)
            # Escalate when the largest term swamps the working precision.
            if precision == "extended" and converged and dps < _MAX_DPS:
                scale = max(abs(s), mp.mpf(cfg.abs_tol))
                if rounding > 1e-3 * max(cfg.abs_tol, cfg.rel_tol * scale):
                    need = int(mp.log10(big / scale + 1)) + 25 if big > 0 else dps
                    if need > dps:
                        dps = min(max(need, dps + 10), _MAX_DPS)
                        continue
            return s, err + rounding, r, converged, dps


# ------------------------------------------------------- Mittag-Leffler

def _ml_series(p: PrabhakarParams, z: float, cfg: EvalConfig) -> EvalResult:
    alpha, beta, gamma = p.alpha, p.beta, p.gamma
    mz = None

    mpar = None

    def term(r, coef):
        # Parameters are promoted so the Pochhammer recurrence carries no
        # double-precision rounding into heavily cancelling sums.
        nonlocal mz, mpar
        if r == 0:
            mz = mp.mpf(z)
            mpar = (mp.mpf(alpha), mp.mpf(beta), mp.mpf(gamma))
            coef = mp.mpf(1)
        else:
            coef = coef * (mpar[2] + r - 1) * mz / r
        arg = mpar[1] + mpar[0] * r
        return coef * mp.rgamma(arg), coef, arg > 1

    s, err, n, ok, dps = _sum_series(term, cfg.series, cfg.precision)
    return _finish(s, err, n, ok, cfg.series, "mittag_leffler_3p", route="series", dps=dps)


def _ml_asymptotic(p: PrabhakarParams, x: float, cfg: EvalConfig) -> EvalResult:
    """Inverse-power expansion of E^gamma_{alpha,beta}(-x), 0 < alpha <= 1, x large."""
    alpha, beta, gamma = p.alpha, p.beta, p.gamma
    s = 0.0
    best = math.inf
    coef = 1.0
    n = 0
    for k in range(200):
        if k > 0:
            coef *= -(gamma + k - 1) / (k * x)
        t = coef * x ** (-gamma) * float(sc.rgamma(beta - alpha * (gamma + k)))
        a = abs(t)
        if k > 2 and a > best:
            break
        if a > 0:
            best = min(best, a)
        s += t
        n = k + 1
        if k > 2 and a <= max(cfg.series.abs_tol, cfg.series.rel_tol * abs(s)):
            break
    err = best if best < math.inf else 0.0
    err = max(err, 1e-16 * abs(s))
    if alpha > 2.0 / 3.0:
        # Exponentially small remainder from the saddle exp(z^(1/alpha)).
        err += math.exp(x ** (1.0 / alpha) * math.cos(math.pi / alpha)) * max(1.0, x) ** abs(gamma - beta + 1)
    return EvalResult(s, err, n, True, {"route": "asymptotic"})


def mittag_leffler_3p(params: PrabhakarParams, z: float, config: EvalConfig | None = None) -> EvalResult:
    """Three-parameter Mittag-Leffler function E^gamma_{alpha,beta}(z).

    Power series with reciprocal-Gamma terms (a pole of Gamma(beta+alpha*r)
    contributes exactly zero). For z <= -crossover and alpha <= 1 the
    inverse-power expansion in 1/|z| is used instead.
    """
    cfg = config or DEFAULT_CONFIG
    if not params.alpha > 0:
        raise DomainError("alpha must be positive")
    z = float(z)
    if not math.isfinite(z):
        raise DomainError("z must be finite")
    g = params.gamma
    use_asym = (
        z < 0
        and -z >= cfg.asymptotic_crossover
        and params.alpha <= 1.0
        and g > 0
    )
    if use_asym:
        return _ml_asymptotic(params, -z, cfg)
    if not (z < -8.0 and params.alpha <= 1.0 and g > 0):
        return _ml_series(params, z, cfg)
    # Below the crossover the series peaks near r ~ x^(1/alpha)/alpha;
    # take the expansion whenever it already meets tolerance.
    asym = _ml_asymptotic(params, -z, cfg)
    tol = max(cfg.series.abs_tol, 10 * cfg.series.rel_tol * abs(asym.value))
    if asym.abs_err <= tol:
        return asym
    soft = cfg.with_overrides(raise_on_failure=False)
    ser = _ml_series(params, z, soft)
    if ser.converged:
        return ser
    if asym.abs_err < ser.abs_err:
        if cfg.series.raise_on_failure and asym.abs_err > 1e-8 * max(1.0, abs(asym.value)):
            raise NonConvergence(f"mittag_leffler_3p: neither route converged at z={z}")
        return EvalResult(asym.value, asym.abs_err, asym.terms, False, asym.diagnostics)
    return _finish(ser.value, ser.abs_err, ser.terms, False, cfg.series, "mittag_leffler_3p")


def prabhakar_e(params: PrabhakarParams, t: float, config: EvalConfig | None = None) -> EvalResult:
    """e^gamma_{alpha,beta}(lam; t) = t^(beta-1) E^gamma_{alpha,beta}(-lam t^alpha)."""
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")
    cfg = config or DEFAULT_CONFIG
    scale = t ** (params.beta - 1.0)
    # the absolute tolerance refers to e, not to the unscaled E
    if scale > 1.0:
        cfg = cfg.with_overrides(abs_tol=cfg.series.abs_tol / scale)
    res = mittag_leffler_3p(params, -params.lam * t ** params.alpha, cfg)
    return EvalResult(res.value * scale, res.abs_err * scale, res.terms, res.converged, res.diagnostics)


def power_over_gamma(t: float, v) -> np.ndarray:
    """t^v / Gamma(v+1) for array v, robust against overflow."""
    v = np.asarray(v, dtype=float)
    out = np.empty_like(v)
    lt = math.log(t)
    pos = v > -0.5
    vp = v[pos]
    out[pos] = np.exp(vp * lt - sc.gammaln(vp + 1.0))
    vn = v[~pos]
    out[~pos] = np.exp(vn * lt) * sc.rgamma(vn + 1.0)
    return out


# ------------------------------------------------- exponential integrals

def _e1_series(x: float) -> float:
    s = 0.0
    term = 1.0
    k = 1
    parts = []
    while True:
        term *= -x / k
        parts.append(term / k)
        if abs(term / k) < 1e-18 * max(1.0, abs(s)) or k > 500:
            break
        s += term / k
        k += 1
    return -EULER - math.log(x) - math.fsum(parts)


def _e1_scaled_cf(x: float) -> float:
    """e^x E1(x) for x >= 1 by modified Lentz on the even continued fraction."""
    tiny = 1e-300
    b = x + 1.0
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 10000):
        an = -float(i * i)
        b += 2.0
        d = 1.0 / (an * d + b)
        c = b + an / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            return h
    raise NonConvergence("E1 continued fraction failed")


def e1_scaled(x: float) -> float:
    """e^x E1(x) for x > 0 (equals M1(x))."""
    if not x > 0:
        raise DomainError("e1_scaled requires x > 0")
    if x < 1.0:
        return math.exp(x) * _e1_series(x)
    return _e1_scaled_cf(x)


def exp_integral_e1(x: float) -> float:
    """E1(x) = int_x^inf e^{-u}/u du for x > 0."""
    x = float(x)
    if not x > 0:
        raise DomainError("E1 requires a positive argument")
    if x < 1.0:
        return _e1_series(x)
    if x > 745.0:
        return 0.0
    return _e1_scaled_cf(x) * math.exp(-x)


def _ei_pos(x: float) -> float:
    if x <= 40.0:
        parts = []
        term = 1.0
        for k in range(1, 400):
            term *= x / k
            parts.append(term / k)
            if term / k < 1e-18 * (sum(parts[-3:]) + 1.0) and k > x:
                break
        return EULER + math.log(x) + math.fsum(parts)
    s = 1.0
    term = 1.0
    for k in range(1, int(x) + 1):
        nxt = term * k / x
        if nxt > term:
            break
        term = nxt
        s += term
        if term < 1e-17:
            break
    return math.exp(x) / x * s


def exp_integral_ei(x: float) -> float:
    """Ei(x) = -PV int_{-x}^inf e^{-u}/u du, x != 0."""
    x = float(x)
    if x == 0.0 or not math.isfinite(x):
        raise DomainError("Ei is singular at 0")
    if x < 0:
        return -exp_integral_e1(-x)
    return _ei_pos(x)


def ein(t: float) -> float:
    """Entire exponential integral Ein(t) = int_0^t (1-e^{-u})/u du."""
    t = float(t)
    if t == 0.0:
        return 0.0
    if 0 < t <= 2.0:
        parts = []
        term = 1.0
        for k in range(1, 200):
            term *= -t / k
            parts.append(-term / k)
            if abs(term) < 1e-18:
                break
        return math.fsum(parts)
    if t > 2.0:
        return EULER + math.log(t) + exp_integral_e1(t)
    u = -t
    if u <= 40.0:
        parts = []
        term = 1.0
        for k in range(1, 400):
            term *= u / k
            parts.append(-term / k)
            if term < 1e-18 and k > u:
                break
        return math.fsum(parts)
    return EULER + math.log(u) - _ei_pos(u)


# --------------------------------------------------- digamma, harmonic

def digamma(x: float) -> float:
    if _is_nonpositive_int(x):
        raise DomainError(f"digamma pole at {x}")
    return float(sc.digamma(x))


def trigamma(x: float) -> float:
    if _is_nonpositive_int(x):
        raise DomainError(f"trigamma pole at {x}")
    return float(sc.polygamma(1, x))


def harmonic(n: int, order: int = 1) -> float:
    """Generalized harmonic number H_n^(order)."""
    if n < 0 or int(n) != n:
        raise DomainError("n must be a nonnegative integer")
    if order not in (1, 2):
        raise DomainError("order must be 1 or 2")
    return math.fsum(1.0 / k ** order for k in range(1, int(n) + 1))


def pochhammer(x: float, n: int) -> float:
    out = 1.0
    for k in range(int(n)):
        out *= x + k
    return out


# ---------------------------------------------------- hypergeometric

def hyper_pfq(
    upper: Sequence[float],
    lower: Sequence[float],
    z: float,
    config: EvalConfig | None = None,
) -> EvalResult:
    """Generalized hypergeometric series pFq(upper; lower; z) for p <= q+1."""
    cfg = config or DEFAULT_CONFIG
    upper = [float(a) for a in upper]
    lower = [float(b) for b in lower]
    for b in lower:
        if _is_nonpositive_int(b):
            raise DomainError(f"lower parameter {b} is a pole")
    if len(upper) > len(lower) + 1:
        raise DomainError("series diverges for p > q+1")
    if len(upper) == len(lower) + 1 and abs(z) >= 1:
        raise DomainError("series requires |z| < 1 when p = q+1")
    mz = None

    mup = mlow = None

    def term(k, coef):
        nonlocal mz, mup, mlow
        if k == 0:
            mz = mp.mpf(z)
            mup = [mp.mpf(a) for a in upper]
            mlow = [mp.mpf(b) for b in lower]
            return mp.mpf(1), mp.mpf(1), False
        c = coef * mz / k
        for a in mup:
            c *= a + k - 1
        for b in mlow:
            c /= b + k - 1
        return c, c, k > abs(z) + 1

    s, err, n, ok, dps = _sum_series(term, cfg.series, cfg.precision)
    return _finish(s, err, n, ok, cfg.series, "hyper_pfq", dps=dps)


def hyp_value(upper: Sequence[float], lower: Sequence[float], z: float) -> float:
    """Convenience float wrapper around :func:`hyper_pfq`."""
    return hyper_pfq(upper, lower, z).value
