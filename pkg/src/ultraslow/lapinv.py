"""Laplace-domain symbols of the kernels and numerical inverse Laplace transforms.

Two engines are provided.  Gaver-Stehfest samples F on the positive real
axis in extended precision; the shifted fixed-Talbot contour handles
transforms whose rightmost singularity is a pole at s = 1 or which involve
ln(s) raised to non-integer powers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import mpmath as mp
import numpy as np

from .config import EvalResult
from .errors import DomainError, NonConvergence, SingularSample

# w / ln(1+w) near w = 0
_PATCH = (1.0, 0.5, -1.0 / 12.0, 1.0 / 24.0, -19.0 / 720.0, 3.0 / 160.0)
_PATCH_RADIUS = 1e-3


def _is_mp(s) -> bool:
    return isinstance(s, (mp.mpf, mp.mpc))


def _ops(s):
    """Return (log, power, is_complex) suited to the argument type."""
    if _is_mp(s):
        return mp.log, (lambda a, b: a ** b)
    return np.log, np.power


def ratio_w_log(s):
    """(s-1)/ln(s) with the removable point s = 1 patched by its Taylor series."""
    w = s - 1
    if _is_mp(s) or np.ndim(s) == 0:
        if abs(w) < _PATCH_RADIUS:
            acc = 0 * w
            for c in reversed(_PATCH):
                acc = acc * w + c
            return acc
        log, _ = _ops(s)
        return w / log(s)
    w = np.asarray(w)
    acc = np.zeros_like(w)
    for c in reversed(_PATCH):
        acc = acc * w + c
    near = np.abs(w) < _PATCH_RADIUS
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = w / np.log(np.asarray(s))
    return np.where(near, acc, direct)


@dataclass(frozen=True)
class LaplaceFn:
    """A Laplace symbol s -> F(s) with its singularity metadata.

    ``func`` accepts Python/NumPy complex numbers and mpmath numbers.
    ``abscissa`` is the real part of the rightmost singularity.
    """

    func: Callable
    abscissa: float = 0.0
    branch_cut: bool = True
    removable: tuple = ()
    poles: tuple = ()
    name: str = ""

    def __call__(self, s):
        return self.func(s)

    def eval(self, s: float) -> float:
        if not s > self.abscissa:
            raise DomainError(f"s={s} is not right of the abscissa {self.abscissa}")
        return float(mp.re(self.func(mp.mpf(s)))) if _is_mp(s) else float(np.real(self.func(complex(s))))


@dataclass(frozen=True)
class IltConfig:
    method: str = "gaver_stehfest"
    gs_terms: int = 16
    talbot_nodes: int = 32
    talbot_shift: float | None = None
    tol: float = 1e-6
    raise_on_failure: bool = True

    def __post_init__(self) -> None:
        if self.method not in ("gaver_stehfest", "shifted_talbot"):
            raise ValueError(f"unknown ILT method {self.method!r}")
        if self.gs_terms < 4 or self.gs_terms % 2:
            raise ValueError("gs_terms must be even and >= 4")
        if self.talbot_nodes < 4:
            raise ValueError("talbot_nodes must be >= 4")


# ------------------------------------------------------- kernel symbols

def _k1_hat(s):
    return ratio_w_log(s) / s


def _m1_hat(s):
    return 1 / ratio_w_log(s)


def _prab_factor(alpha: float, gamma: float, lam: float, sign: float):
    def f(s):
        _, pw = _ops(s)
        return pw(1 + lam * pw(s, -alpha), sign * gamma)
    return f


def make_kernel_laplace(kernel, which: str = "k") -> LaplaceFn:
    """Laplace symbol of a memory kernel.

    ``which`` selects ``"k"`` (the kernel), ``"M"`` (its Sonnine partner),
    ``"psi"`` (s * k(s)) or ``"msd"`` (2 B M(s) / s^2, the MSD transform).
    """
    from .kernels import MemoryKernel  # local import avoids a cycle

    if not isinstance(kernel, MemoryKernel):
        raise DomainError("expected a MemoryKernel")
    kind = kernel.kind
    if kind == "distributed":
        k_hat, m_hat = _k1_hat, _m1_hat
    elif kind == "distributed_prabhakar":
        fk = _prab_factor(kernel.alpha, kernel.gamma, kernel.lam, 1.0)
        fm = _prab_factor(kernel.alpha, kernel.gamma, kernel.lam, -1.0)
        k_hat = lambda s: _k1_hat(s) * fk(s)  # noqa: E731
        m_hat = lambda s: _m1_hat(s) * fm(s)  # noqa: E731
    elif kind == "caputo":
        mu_ = kernel.mu
        k_hat = lambda s: _ops(s)[1](s, mu_ - 1)  # noqa: E731
        m_hat = lambda s: _ops(s)[1](s, -mu_)  # noqa: E731
    elif kind == "prabhakar":
        mu_ = kernel.mu
        fk = _prab_factor(kernel.alpha, kernel.gamma, kernel.lam, 1.0)
        fm = _prab_factor(kernel.alpha, kernel.gamma, kernel.lam, -1.0)
        k_hat = lambda s: _ops(s)[1](s, mu_ - 1) * fk(s)  # noqa: E731
        m_hat = lambda s: _ops(s)[1](s, -mu_) * fm(s)  # noqa: E731
    else:  # pragma: no cover - guarded by MemoryKernel
        raise DomainError(kind)
    B = kernel.B
    table = {
        "k": (k_hat, "k"),
        "M": (m_hat, "M"),
        "psi": (lambda s: s * k_hat(s), "psi"),
        "msd": (lambda s: 2 * B * m_hat(s) / (s * s), "msd"),
    }
    if which not in table:
        raise DomainError(f"unknown symbol {which!r}")
    func, label = table[which]
    removable = (1.0,) if kind.startswith("distributed") else ()
    return LaplaceFn(func, 0.0, True, removable, (), f"{label}[{kind}]")


# ------------------------------------------------------ Gaver-Stehfest

_GS_CACHE: dict = {}


def _stehfest_weights(n: int, dps: int):
    key = (n, dps)
    if key not in _GS_CACHE:
        with mp.workdps(dps):
            half = n // 2
            ws = []
            for k in range(1, n + 1):
                acc = mp.mpf(0)
                for j in range((k + 1) // 2, min(k, half) + 1):
                    acc += (mp.mpf(j) ** half * mp.factorial(2 * j)) / (
                        mp.factorial(half - j) * mp.factorial(j) * mp.factorial(j - 1)
                        * mp.factorial(k - j) * mp.factorial(2 * j - k)
                    )
                ws.append((-1) ** (k + half) * acc)
        _GS_CACHE[key] = ws
    return _GS_CACHE[key]


def _gaver_stehfest(f: LaplaceFn, t: float, n: int):
    dps = max(30, int(2.2 * n) + 10)
    with mp.workdps(dps):
        ln2t = mp.log(2) / mp.mpf(t)
        ws = _stehfest_weights(n, dps)
        acc = mp.mpf(0)
        for k, w in enumerate(ws, start=1):
            s = k * ln2t
            for x in f.removable:
                if abs(s - x) < mp.mpf(10) ** (-dps + 5):
                    s = s * (1 + mp.mpf(10) ** (-dps // 2))
            v = f.func(s)
            if not mp.isfinite(mp.re(v)):
                raise SingularSample(f"non-finite sample at s={s}")
            acc += w * mp.re(v)
        return float(acc * ln2t)


def gaver_stehfest(f: LaplaceFn, t: float, n: int = 16) -> EvalResult:
    if f.abscissa > 0 and not set(f.poles) <= set(f.removable):
        raise SingularSample("Gaver-Stehfest samples cross a singularity on the positive axis")
    if f.abscissa > 0:
        raise SingularSample("Gaver-Stehfest needs abscissa <= 0")
    v = _gaver_stehfest(f, t, n)
    v2 = _gaver_stehfest(f, t, n - 2)
    return EvalResult(v, abs(v - v2), n, True, {"method": "gaver_stehfest"})


# --------------------------------------------------------- Talbot

def _talbot(f: LaplaceFn, t: float, m: int, shift: float, dps: int | None):
    """Fixed Talbot (Abate-Valko) on F(s + shift), times e^{shift t}."""
    use_mp = dps is not None
    if use_mp:
        with mp.workdps(dps):
            r = mp.mpf(2) * m / (5 * mp.mpf(t))
            acc = mp.mpf(0.5) * mp.re(f.func(r + shift)) * mp.exp(r * t)
            for k in range(1, m):
                th = k * mp.pi / m
                cot = mp.cot(th)
                s = r * th * (cot + 1j)
                sig = th + (th * cot - 1) * cot
                acc += mp.re(mp.exp(t * s) * f.func(s + shift) * (1 + 1j * sig))
            return float(acc * r / m * mp.exp(shift * t))
    r = 2.0 * m / (5.0 * t)
    k = np.arange(1, m)
    th = k * np.pi / m
    cot = 1.0 / np.tan(th)
    s = r * th * (cot + 1j)
    sig = th + (th * cot - 1.0) * cot
    vals = f.func(s + shift)
    acc = 0.5 * float(np.real(f.func(complex(r + shift)))) * math.exp(r * t)
    acc += float(np.sum(np.real(np.exp(t * s) * vals * (1.0 + 1j * sig))))
    return acc * r / m * math.exp(shift * t)


def shifted_talbot(f: LaplaceFn, t: float, m: int = 32, shift: float | None = None,
                   dps: int | None = None) -> EvalResult:
    """Talbot inversion of F after shifting by ``shift`` (default abscissa + 1 if positive)."""
    if shift is None:
        shift = f.abscissa + 1.0 if f.abscissa > 0 else 0.0
    if shift < f.abscissa:
        raise DomainError("talbot shift must be right of the abscissa")
    v = _talbot(f, t, m, shift, dps)
    v2 = _talbot(f, t, max(4, (3 * m) // 4), shift, dps)
    return EvalResult(v, abs(v - v2), m, True, {"method": "shifted_talbot", "shift": shift})


def talbot_vector(func: Callable, ts, m: int = 32, shift: float = 0.0) -> np.ndarray:
    """Double-precision fixed Talbot for many t at once (func is vectorized)."""
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    r = 2.0 * m / (5.0 * ts)[:, None]
    k = np.arange(1, m)
    th = k * np.pi / m
    cot = 1.0 / np.tan(th)
    s = r * th * (cot + 1j)
    sig = th + (th * cot - 1.0) * cot
    vals = func(s + shift)
    acc = 0.5 * np.real(func(r[:, 0] + shift + 0j)) * np.exp(r[:, 0] * ts)
    acc = acc + np.sum(np.real(np.exp(ts[:, None] * s) * vals * (1.0 + 1j * sig)), axis=1)
    return acc * r[:, 0] / m * np.exp(shift * ts)


def ilt(f: LaplaceFn, t: float, cfg: IltConfig | None = None) -> EvalResult:
    """Numerical inverse Laplace transform of ``f`` at ``t``."""
    cfg = cfg or IltConfig()
    if not t > 0:
        raise DomainError("t must be positive")
    if cfg.method == "gaver_stehfest":
        res = gaver_stehfest(f, t, cfg.gs_terms)
    else:
        res = shifted_talbot(f, t, cfg.talbot_nodes, cfg.talbot_shift)
    if res.abs_err > cfg.tol * max(1.0, abs(res.value)):
        if cfg.raise_on_failure:
            raise NonConvergence(f"ILT error estimate {res.abs_err:.3g} above tolerance at t={t}")
        res = EvalResult(res.value, res.abs_err, res.terms, False, res.diagnostics)
    return res


def laplace_fn(func: Callable, abscissa: float = 0.0, name: str = "", removable: Sequence[float] = ()) -> LaplaceFn:
    """Wrap an arbitrary symbol (used for tests and the CLI)."""
    return LaplaceFn(func, abscissa, True, tuple(removable), (), name)
