"""Quadrature building blocks: Gamma-decay panel integrals over u in [0, inf),
log-variable half-line integrals and endpoint-singular convolutions."""
from __future__ import annotations

import math
import warnings
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import integrate
from scipy.special import roots_jacobi

from .errors import QuadratureFailure


@lru_cache(maxsize=None)
def _gauss_legendre(n: int):
    return np.polynomial.legendre.leggauss(n)


@lru_cache(maxsize=None)
def _gauss_jacobi(n: int, beta: float):
    # weight (1+x)^beta on [-1, 1]
    return roots_jacobi(n, 0.0, beta)


def panel_width(t: float) -> float:
    lt = abs(math.log(t))
    w = 1.0 if lt < 4.0 else 4.0 / lt
    if t > 64.0:
        w = math.sqrt(t) / 8.0
    return w


def u_integral(
    fn: Callable[[np.ndarray], np.ndarray],
    *,
    beta: float = 0.0,
    width: float = 1.0,
    peak: float = 0.0,
    rtol: float = 1e-15,
    atol: float = 1e-300,
    max_panels: int = 20000,
    n: int = 24,
):
    """Integrate ``u**beta * fn(u)`` over [0, inf) for Gamma-decaying ``fn``.

    ``fn`` maps a 1-D array of nodes to an array whose last axis matches
    the nodes, so several integrands can share the nodes.  Panels march to
    the right from 0; the first one carries a Gauss-Jacobi rule for the
    u**beta endpoint.  Marching stops once past ``peak`` the panel
    contributions stay negligible.  Returns (value, err, n_panels).
    """
    xg, wg = _gauss_legendre(n)
    xl, wl = _gauss_legendre(n // 2 + 2)
    if beta != 0.0:
        xj, wj = _gauss_jacobi(n, float(beta))
        xj2, wj2 = _gauss_jacobi(n // 2 + 2, float(beta))

    def first_panel():
        if beta == 0.0:
            return panel(0.0)
        scale = (width / 2.0) ** (1.0 + beta)
        hi = np.tensordot(fn(width * (xj + 1.0) / 2.0), wj, axes=([-1], [0])) * scale
        lo = np.tensordot(fn(width * (xj2 + 1.0) / 2.0), wj2, axes=([-1], [0])) * scale
        return hi, np.abs(hi - lo)

    def panel(a):
        half = width / 2.0
        mid = a + half
        ug = mid + half * xg
        ul = mid + half * xl
        wgt_g = wg * half
        wgt_l = wl * half
        if beta != 0.0:
            wgt_g = wgt_g * ug ** beta
            wgt_l = wgt_l * ul ** beta
        hi = np.tensordot(fn(ug), wgt_g, axes=([-1], [0]))
        lo = np.tensordot(fn(ul), wgt_l, axes=([-1], [0]))
        return hi, np.abs(hi - lo)

    total, err = first_panel()
    total = np.array(total, dtype=float)
    err = np.array(err, dtype=float)
    absmass = np.abs(total)
    quiet = 0
    for k in range(1, max_panels):
        a = k * width
        val, e = panel(a)
        total = total + val
        err = err + e
        absmass = absmass + np.abs(val)
        if a > peak:
            small = np.all(np.abs(val) <= np.maximum(rtol * absmass, atol))
            quiet = quiet + 1 if small else 0
            if quiet >= 3:
                return total, err + np.abs(val), k + 1
    raise QuadratureFailure("u-integral tail did not decay within the panel budget")


def quad_logvar(hx: Callable[[float], float], *, lo: float = -math.inf, hi: float = math.inf,
                breaks=(), epsabs: float = 1e-14, epsrel: float = 1e-12, limit: int = 400):
    """int over x in (lo, hi) of hx(x); used for r-integrals with x = ln r,
    where ``hx(x)`` already includes the Jacobian r = e^x."""
    pts = sorted(b for b in breaks if lo < b < hi)
    edges = [lo, *pts, hi]
    val = 0.0
    err = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        with warnings.catch_warnings():
            # roundoff at the requested tolerance is reflected in the returned error
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            v, e = integrate.quad(hx, a, b, epsabs=epsabs, epsrel=epsrel, limit=limit)
        val += v
        err += e
    return val, err


def quad_exp_graded(f: Callable[[float], float], a: float, b: float, *,
                    epsabs: float = 1e-13, epsrel: float = 1e-12, limit: int = 400,
                    at: str = "left"):
    """int_a^b f with a graded substitution clustering nodes at one endpoint.

    With ``at='left'``, x = a + (b-a) e^{-v}, v in [0, inf), which turns
    integrable power/log singularities at ``a`` into exponentially decaying
    integrands.
    """
    h = b - a
    if h <= 0:
        return 0.0, 0.0
    if at == "left":
        def g(v):
            d = h * math.exp(-v)
            return f(a + d) * d if d > 1e-300 else 0.0
    else:
        def g(v):
            d = h * math.exp(-v)
            return f(b - d) * d if d > 1e-300 else 0.0
    return integrate.quad(g, 0.0, math.inf, epsabs=epsabs, epsrel=epsrel, limit=limit)


def convolve(a: Callable[[float], float], b: Callable[[float], float], t: float, *,
             A: Callable[[float], float] | None = None,
             B: Callable[[float], float] | None = None,
             epsabs: float = 1e-13, epsrel: float = 1e-11):
    """(a * b)(t) = int_0^t a(t-x) b(x) dx with integrable singularities at 0.

    The range is split at t/2.  When an antiderivative ``A`` of ``a``
    (``A(0) = 0``) is supplied, the half where ``a`` is singular is written
    as A(t/2) b(t) + int_0^{t/2} a(u) [b(t-u) - b(t)] du, which removes the
    endpoint singularity; likewise for ``B``.
    """
    h = t / 2.0
    if B is not None:
        at_ = a(t)
        v1, e1 = quad_exp_graded(lambda x: b(x) * (a(t - x) - at_), 0.0, h,
                                 epsabs=epsabs, epsrel=epsrel)
        v1 += B(h) * at_
    else:
        v1, e1 = quad_exp_graded(lambda x: a(t - x) * b(x), 0.0, h, epsabs=epsabs, epsrel=epsrel)
    if A is not None:
        bt = b(t)
        v2, e2 = quad_exp_graded(lambda u: a(u) * (b(t - u) - bt), 0.0, h, epsabs=epsabs, epsrel=epsrel)
        v2 += A(h) * bt
    else:
        v2, e2 = quad_exp_graded(lambda u: a(u) * b(t - u), 0.0, h, epsabs=epsabs, epsrel=epsrel)
    return v1 + v2, e1 + e2
