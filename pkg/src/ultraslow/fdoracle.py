"""Finite-difference solver for p = p0 + B int_0^t M(t - x) d^2p/dx^2(x) dx.

It shares no evaluation code with the analytic modules.  The memory
function enters only through its spectral density
rho(r) = (1/pi) Im Mhat(r e^{-i pi}), so the product-integration weights
of M against piecewise-linear hats follow in closed form per r.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import solve_banded

from .errors import DomainError, InstabilityDetected
from .kernels import MemoryKernel


@dataclass(frozen=True)
class GridSpec:
    x_half_width: float
    nx: int = 401
    t_final: float = 1.0
    nt: int = 2000

    def __post_init__(self) -> None:
        if not self.x_half_width > 0 or not self.t_final > 0:
            raise DomainError("grid extents must be positive")
        if self.nx < 5 or self.nx % 2 == 0:
            raise DomainError("nx must be odd and at least 5")
        if self.nt < 1:
            raise DomainError("nt must be positive")

    @property
    def dx(self) -> float:
        return 2.0 * self.x_half_width / (self.nx - 1)

    @property
    def dt(self) -> float:
        return self.t_final / self.nt


@dataclass
class FdSolution:
    x: np.ndarray
    t: np.ndarray
    p: np.ndarray  # shape (nt+1, nx)
    mass: np.ndarray
    msd: np.ndarray
    grid: GridSpec

    def to_csv(self, path, every: int = 1) -> None:
        """One row per stored time slice: t followed by p on the x grid."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t"] + [f"{v:.10g}" for v in self.x])
            for j in range(0, len(self.t), every):
                w.writerow([f"{self.t[j]:.10g}"] + [f"{v:.10e}" for v in self.p[j]])


def _mhat_on_cut(kernel: MemoryKernel) -> Callable[[np.ndarray], np.ndarray]:
    """Mhat(s) at s = r e^{-i pi}, with ln s = ln r - i pi spelled out."""

    def power(r, a):  # s^a on the lower lip
        return r ** a * np.exp(-1j * math.pi * a)

    def ratio(r):  # ln s / (s - 1)
        return (np.log(r) - 1j * math.pi) / (-r - 1.0)

    kind = kernel.kind
    if kind == "distributed":
        return ratio
    if kind == "distributed_prabhakar":
        a, g, lam = kernel.alpha, kernel.gamma, kernel.lam
        return lambda r: ratio(r) * (1.0 + lam * power(r, -a)) ** (-g)
    if kind == "caputo":
        mu = kernel.mu
        return lambda r: power(r, -mu)
    a, g, lam, mu = kernel.alpha, kernel.gamma, kernel.lam, kernel.mu
    return lambda r: power(r, -mu) * (1.0 + lam * power(r, -a)) ** (-g)


def spectral_density(kernel: MemoryKernel, r) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    return np.imag(_mhat_on_cut(kernel)(r)) / math.pi


def _phi(z):
    """phi0 = int_0^1 e^{-zu}(1-u) du and phi1 = int_0^1 e^{-zu} u du."""
    z = np.asarray(z, dtype=float)
    small = z < 1e-3
    zs = np.where(small, 1.0, z)
    em = np.exp(-zs)
    phi0 = np.where(small, 0.5 - z / 6.0 + z * z / 24.0, (zs - 1.0 + em) / zs ** 2)
    phi1 = np.where(small, 0.5 - z / 3.0 + z * z / 8.0, (1.0 - (1.0 + zs) * em) / zs ** 2)
    return phi0, phi1


def hat_weights(kernel: MemoryKernel, dt: float, nt: int, panel: float = 0.25, n: int = 16):
    """A_m, B_m = int over [m dt, (m+1) dt] of M(tau) times the falling / rising hat.

    A_m pairs with the hat equal to 1 at tau = m dt, B_m with the one equal to 1
    at tau = (m+1) dt.  Computed as r-integrals of rho(r) in x = ln r.
    """
    lo = -36.0
    hi = math.log(1e9 / dt)
    npan = int(math.ceil((hi - lo) / panel))
    xg, wg = np.polynomial.legendre.leggauss(n)
    edges = np.linspace(lo, hi, npan + 1)
    a, b = edges[:-1, None], edges[1:, None]
    x = (0.5 * (b - a) * xg + 0.5 * (a + b)).ravel()
    w = (0.5 * (b - a) * wg).ravel()
    r = np.exp(x)
    wr = w * r * spectral_density(kernel, r)
    phi0, phi1 = _phi(r * dt)
    m = np.arange(nt + 1)
    decay = np.exp(-np.outer(m * dt, r))  # (nt+1, nq)
    A = dt * decay @ (wr * phi0)
    B = dt * decay @ (wr * phi1)
    return A, B


def _laplacian(p: np.ndarray, dx: float) -> np.ndarray:
    out = np.zeros_like(p)
    out[1:-1] = (p[2:] - 2.0 * p[1:-1] + p[:-2]) / (dx * dx)
    return out


def default_grid(kernel: MemoryKernel, t_final: float = 1.0, nx: int = 401, nt: int = 2000) -> GridSpec:
    """Half-width 10 sqrt(MSD(t_final)), with the MSD taken from the solver's own weights."""
    A, Bw = hat_weights(kernel, t_final / 200, 200)
    w_total = float(A.sum() + Bw.sum())  # int_0^{t_final} M
    msd = max(2.0 * kernel.B * w_total, 1e-12)
    return GridSpec(10.0 * math.sqrt(msd), nx, t_final, nt)


def solve_fp_integral(kernel: MemoryKernel, grid: GridSpec, init: str = "delta",
                      mass_guard: float = 1e-2) -> FdSolution:
    """March p^j = p^0 + B sum_i w_{j,i} L p^i with the current step implicit."""
    if init != "delta":
        raise DomainError("only the delta initial condition is supported")
    nx, nt, dx, dt = grid.nx, grid.nt, grid.dx, grid.dt
    x = np.linspace(-grid.x_half_width, grid.x_half_width, nx)
    p0 = np.zeros(nx)
    c = nx // 2
    p0[c - 1:c + 2] = np.array([0.25, 0.5, 0.25]) / dx
    A, Bw = hat_weights(kernel, dt, nt)
    Bc = kernel.B

    # (I - B w0 L) on interior nodes, Dirichlet zero at the ends
    diag_w = Bc * A[0] / (dx * dx)
    ab = np.zeros((3, nx))
    ab[0, 1:] = -diag_w
    ab[1, :] = 1.0 + 2.0 * diag_w
    ab[2, :-1] = -diag_w
    ab[0, 1] = 0.0
    ab[1, 0] = ab[1, -1] = 1.0
    ab[2, -2] = 0.0

    P = np.zeros((nt + 1, nx))
    LP = np.zeros((nt + 1, nx))
    P[0] = p0
    LP[0] = _laplacian(p0, dx)
    # lag weights: f_i at lag n = j - i gets A[n] + B[n-1]; f_0 gets only B[j-1]
    lag = np.zeros(nt + 1)
    lag[1:] = A[1:] + Bw[:-1]
    mass = np.zeros(nt + 1)
    msd = np.zeros(nt + 1)
    mass[0] = p0.sum() * dx
    msd[0] = float(np.sum(x * x * p0) * dx)
    for j in range(1, nt + 1):
        hist = lag[j:0:-1][1:] @ LP[1:j] if j > 1 else np.zeros(nx)
        rhs = p0 + Bc * (hist + Bw[j - 1] * LP[0])
        rhs[0] = rhs[-1] = 0.0
        pj = solve_banded((1, 1), ab, rhs)
        P[j] = pj
        LP[j] = _laplacian(pj, dx)
        mass[j] = pj.sum() * dx
        msd[j] = float(np.sum(x * x * pj) * dx)
        if abs(mass[j] - 1.0) > mass_guard:
            raise InstabilityDetected(f"mass drift {mass[j] - 1.0:.3g} at step {j}")
    t = np.arange(nt + 1) * dt
    return FdSolution(x, t, P, mass, msd, grid)
