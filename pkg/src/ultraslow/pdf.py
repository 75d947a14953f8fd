"""Fundamental solution p(x, t) of the generalized Fokker-Planck equation.

The workhorse inverts the closed Laplace form
p(x, s) = (1/2s) sqrt(s k(s)/B) exp(-|x| sqrt(s k(s)/B)) on a Talbot contour.
The power series in |x| with Volterra-Prabhakar coefficients is a cross-check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import EvalResult
from .errors import DomainError, NonConvergence, RouteUnavailable
from .kernels import MemoryKernel
from .lapinv import make_kernel_laplace
from .volterra import epsilon_raw

PDF_ROUTES = ("ilt", "series")
_TALBOT_NODES = 48
SERIES_R_MAX = 24


@dataclass(frozen=True)
class PdfQuery:
    x: float
    t: float
    kernel: MemoryKernel
    route: str = "ilt"

    def __post_init__(self) -> None:
        if not self.t > 0:
            raise DomainError("t must be positive")
        if self.route not in PDF_ROUTES:
            raise DomainError(f"route must be one of {PDF_ROUTES}")


def _rate(kernel: MemoryKernel, s):
    """sqrt(s k(s) / B) for real or complex s (array aware)."""
    k_hat = make_kernel_laplace(kernel, "k").func
    return np.sqrt(s * k_hat(s) / kernel.B)


def pdf_laplace(x: float, s: float, kernel: MemoryKernel) -> float:
    """p(x, s) = (1/2s) a exp(-|x| a), a = sqrt(s k(s)/B)."""
    if not s > 0:
        raise DomainError("s must be positive")
    a = float(np.real(_rate(kernel, complex(s))))
    return a * math.exp(-abs(x) * a) / (2.0 * s)


def _talbot_nodes(t: float, m: int):
    r = 2.0 * m / (5.0 * t)
    k = np.arange(1, m)
    th = k * np.pi / m
    cot = 1.0 / np.tan(th)
    s = np.concatenate([[r + 0j], r * th * (cot + 1j)])
    w = np.concatenate([[0.5 + 0j], 1.0 + 1j * (th + (th * cot - 1.0) * cot)])
    return s, w * np.exp(t * s) * (r / m)


def pdf_ilt(xs, t: float, kernel: MemoryKernel, m: int = _TALBOT_NODES) -> np.ndarray:
    """p(x, t) on an array of x by fixed-Talbot inversion of the Laplace form."""
    if not t > 0:
        raise DomainError("t must be positive")
    ax = np.abs(np.atleast_1d(np.asarray(xs, dtype=float)))
    s, w = _talbot_nodes(t, m)
    a = _rate(kernel, s)
    vals = np.exp(-np.outer(ax, a)) * (a / (2.0 * s))
    return np.real(vals @ w)


# ------------------------------------------------------------- series

def _series_coefficients(kernel: MemoryKernel, t: float, r_max: int) -> np.ndarray:
    """Time factors q_r(t) with p(x,t) = (1/2 sqrt B) sum_r (-|x|/sqrt B)^r / r! q_r(t).

    q_r is the inverse transform of s^(b-1) k(s)^b, b = (r+1)/2.  For k1 it is
    eps^{-b}_{1,b-1,-b}(-1; t) / Gamma(b).  For k2 the extra factor
    (1 + lam s^-alpha)^(gamma b) is the transform of e^{-gamma b}_{alpha,0};
    its convolution is applied termwise via the binomial series in lam.
    """
    q = np.zeros(r_max + 1)
    for r in range(r_max + 1):
        b = 0.5 * (r + 1)
        g = math.gamma(b)
        if kernel.kind == "distributed":
            q[r] = epsilon_raw(1.0, -b, -1.0, -b, t, beta=b - 1.0) / g
        elif kernel.kind == "distributed_prabhakar":
            a, lam, e = kernel.alpha, kernel.lam, kernel.gamma * b
            acc = 0.0
            c = 1.0
            peak = 0.0
            for n in range(400):
                if n > 0:
                    c *= (e - n + 1) / n * lam
                term = c * epsilon_raw(1.0, -b, -1.0, -b + a * n, t, beta=b - 1.0)
                acc += term
                peak = max(peak, abs(term))
                if n > 2 and abs(term) < 1e-16 * peak:
                    break
            else:
                raise NonConvergence("binomial expansion of the Prabhakar factor did not converge")
            q[r] = acc / g
        else:
            raise RouteUnavailable("the series route covers the distributed kernels")
    return q


def pdf_series_term(r: int, x: float, t: float, B: float = 1.0, kernel: MemoryKernel | None = None) -> float:
    """The r-th term (1/(2 sqrt B)) (-|x|/sqrt B)^r / r! * q_r(t)."""
    if r < 0:
        raise DomainError("r must be nonnegative")
    kernel = kernel or MemoryKernel.distributed(B)
    if kernel.B != B:
        kernel = MemoryKernel(kernel.kind, B, kernel.mu, kernel.alpha, kernel.gamma, kernel.lam)
    q = _series_coefficients(kernel, t, r)[r]
    sb = math.sqrt(B)
    return (-abs(x) / sb) ** r / math.factorial(r) * q / (2.0 * sb)


def pdf_series(xs, t: float, kernel: MemoryKernel, r_max: int = SERIES_R_MAX, tol: float = 1e-10):
    """Partial sums of the |x| power series; raises RouteUnavailable where cancellation wins."""
    ax = np.abs(np.atleast_1d(np.asarray(xs, dtype=float)))
    sb = math.sqrt(kernel.B)
    q = _series_coefficients(kernel, t, r_max)
    r = np.arange(r_max + 1)
    fact = np.array([math.factorial(int(k)) for k in r], dtype=float)
    terms = (-ax[:, None] / sb) ** r[None, :] / fact[None, :] * q[None, :] / (2.0 * sb)
    vals = terms.sum(axis=1)
    tail = np.abs(terms[:, -2:]).max(axis=1)
    biggest = np.abs(terms).max(axis=1)
    bad = (tail > tol * np.maximum(np.abs(vals), 1e-300)) | (biggest > 1e6 * np.abs(vals))
    if np.any(bad):
        raise RouteUnavailable(f"series truncated at r={r_max} is unreliable for |x| >= {ax[bad].min():.3g}")
    return vals, tail


def pdf_eval(q: PdfQuery, r_max: int = SERIES_R_MAX) -> EvalResult:
    """p(x, t) by the selected route."""
    if q.route == "ilt":
        v = float(pdf_ilt([q.x], q.t, q.kernel)[0])
        v2 = float(pdf_ilt([q.x], q.t, q.kernel, m=(3 * _TALBOT_NODES) // 4)[0])
        return EvalResult(v, abs(v - v2), _TALBOT_NODES, True, {"route": "ilt"})
    vals, tail = pdf_series([q.x], q.t, q.kernel, r_max=r_max)
    return EvalResult(float(vals[0]), float(tail[0]), r_max + 1, True, {"route": "series"})


# --------------------------------------------------------- integrals

def _graded_half_grid(L: float, levels: int = 30, n: int = 16):
    """Gauss-Legendre nodes on (0, L], panels graded geometrically toward 0."""
    xg, wg = np.polynomial.legendre.leggauss(n)
    edges = np.concatenate([[0.0], L * 2.0 ** -np.arange(levels, -1, -1, dtype=float)])
    # extra uniform panels on the outer region resolve the exponential tail
    outer = np.linspace(L / 2.0, L, 9)
    edges = np.unique(np.concatenate([edges[edges < L / 2.0], outer]))
    a, b = edges[:-1, None], edges[1:, None]
    x = (0.5 * (b - a) * xg[None, :] + 0.5 * (a + b)).ravel()
    w = (0.5 * (b - a) * wg[None, :]).ravel()
    return x, w


def pdf_moments(t: float, kernel: MemoryKernel, L: float, orders=(0, 2, 4)) -> dict:
    """int_{-L}^{L} x^k p(x,t) dx for each k, using the symmetry of p."""
    x, w = _graded_half_grid(L)
    p = pdf_ilt(x, t, kernel)
    return {k: float(2.0 * np.sum(w * p * x ** k)) for k in orders}
