"""Identity checks run by ``ultraslow verify``."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from scipy import integrate

from ._quad import quad_logvar
from .cmcheck import check_cm
from .kernels import MemoryKernel, k1, k2_time, m1_time, m2_time, sonnine_residual
from .moments import prabhakar_log_integral
from .specfun import PrabhakarParams, mittag_leffler_3p
from .volterra import VPArgs, nu, spectral_integral, vp_epsilon


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    tol: float
    passed: bool
    detail: str = ""


def _check(name: str, value: float, tol: float, detail: str = "") -> CheckResult:
    return CheckResult(name, float(value), tol, bool(abs(value) < tol), detail)


def sonnine_checks() -> list[CheckResult]:
    out = []
    for kern in (MemoryKernel.distributed(), MemoryKernel.distributed_prabhakar(0.5, 0.5, 1.0)):
        worst = max(sonnine_residual(kern, t) for t in (0.01, 0.1, 1.0, 10.0))
        out.append(_check(f"sonnine[{kern.label}]", worst, 1e-5))
    return out


def ramanujan_check() -> CheckResult:
    v, _ = quad_logvar(lambda x: 1.0 / (math.pi ** 2 + x * x), epsabs=1e-15, epsrel=1e-14)
    return _check("ramanujan integral", v - 1.0, 1e-8)


def spectral_checks() -> list[CheckResult]:
    out = []
    for a, g in ((0.4, 2.0), (0.4, 3.0), (0.3, 3.0)):
        v, _ = spectral_integral(a, g, a * g)
        out.append(_check(f"2^g int K~ [{a},{g}]", 2.0 ** g * v - 1.0, 1e-6))
    return out


def prop7_checks() -> list[CheckResult]:
    worst = 0.0
    for a in (0.5, 1.0, 1.5):
        for t in (0.5, 1.0, 3.0):
            f = lambda u: math.log(u) * u ** a * mittag_leffler_3p(PrabhakarParams(1.0, 1.0 + a, 1.0), u).value  # noqa: E731
            q, _ = integrate.quad(f, 0.0, t, epsabs=1e-14, epsrel=1e-13, limit=200)
            worst = max(worst, abs(prabhakar_log_integral(a, t) - q))
    return [_check("log-Prabhakar integral", worst, 1e-8)]


def route_checks() -> list[CheckResult]:
    args = VPArgs.of(0.4, 0.8, 1.0, 0.32)
    vals = [vp_epsilon(args, 1.0, r).value for r in ("u_integral", "nu_series", "bromwich")]
    k2s = [k2_time(0.5, 0.5, 1.0, 1.0, r).value for r in ("nu_series", "convolution", "epsilon_diff")]
    m2s = [m2_time(0.5, 0.5, 1.0, 1.0, r).value for r in ("exact_series", "convolution")]
    return [
        _check("epsilon routes", max(vals) - min(vals), 1e-5),
        _check("k2 routes", max(k2s) - min(k2s), 1e-4),
        _check("M2 routes", max(m2s) - min(m2s), 1e-5),
    ]


def cm_checks() -> list[CheckResult]:
    cases: list[tuple[str, Callable[[float], float], tuple]] = [
        ("k1", k1, (0.1, 5.0)),
        ("M1", m1_time, (0.1, 5.0)),
        ("e^t - nu", lambda t: math.exp(t) - nu(t), (0.05, 3.0)),
        ("e^t/4 - eps[0.4,2]", lambda t: math.exp(t) / 4.0 - vp_epsilon(VPArgs.of(0.4, 2.0, 1.0, 0.8), t).value, (0.1, 3.0)),
    ]
    out = []
    for name, f, iv in cases:
        rep = check_cm(f, iv, 4, n_points=12, function_id=name)
        out.append(CheckResult(f"CM {name}", float(len(rep.violations)), 1.0, rep.passed, rep.verdict))
    ctrl = check_cm(math.exp, (0.1, 2.0), 1, n_points=8, function_id="exp")
    out.append(CheckResult("CM control flagged", 0.0, 1.0, not ctrl.passed, ctrl.verdict))
    return out


def run_all() -> list[CheckResult]:
    res = []
    res += sonnine_checks()
    res.append(ramanujan_check())
    res += spectral_checks()
    res += prop7_checks()
    res += route_checks()
    res += cm_checks()
    return res


def as_rows(results: list[CheckResult]) -> list[dict]:
    return [{"check": r.name, "value": r.value, "tol": r.tol, "status": "PASS" if r.passed else "FAIL",
             "detail": r.detail} for r in results]


__all__ = ["CheckResult", "run_all", "as_rows"]
