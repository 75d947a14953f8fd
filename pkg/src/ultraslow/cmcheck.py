"""Numerical evidence for complete monotonicity, Bernstein behaviour and log-convexity.

Sampled finite-difference tests can only refute membership.  A pass means
no violation was resolved above the noise floor on the grid.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np
from scipy.special import comb

from .errors import DomainError, EvaluationError

CONSISTENT = "ConsistentWithCM"
VIOLATION = "ViolationFound"
DISCLAIMER = "finite-sample check: a pass is evidence, not a proof"


@dataclass
class CmReport:
    function_id: str
    grid: list
    max_order_checked: int
    violations: list = field(default_factory=list)
    verdict: str = CONSISTENT
    test: str = "cm"
    noise_floor: list = field(default_factory=list)
    note: str = DISCLAIMER

    @property
    def passed(self) -> bool:
        return self.verdict == CONSISTENT

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)


def chebyshev_grid(a: float, b: float, n: int) -> np.ndarray:
    k = np.arange(n)
    x = np.cos((2 * k + 1) * np.pi / (2 * n))[::-1]
    return 0.5 * (a + b) + 0.5 * (b - a) * x


def _safe(f: Callable[[float], float], x: float) -> float:
    try:
        v = float(f(x))
    except EvaluationError:
        raise
    except Exception as exc:  # evaluation failures surface with their location
        raise EvaluationError(f"evaluation failed at {x}: {exc}") from exc
    if not math.isfinite(v):
        raise EvaluationError(f"non-finite value at {x}")
    return v


def _central_diff(f, x: float, n: int, h: float) -> tuple[float, float]:
    """n-th central difference quotient and the largest |f| sampled."""
    if n == 0:
        v = _safe(f, x)
        return v, abs(v)
    acc = 0.0
    big = 0.0
    for k in range(n + 1):
        v = _safe(f, x + (n / 2.0 - k) * h)
        big = max(big, abs(v))
        acc += (-1) ** k * comb(n, k) * v
    return acc / h ** n, big


def derivative(f, x: float, n: int, h: float, rel_eval_err: float = 1e-14):
    """Richardson-refined n-th derivative, its truncation estimate and noise floor."""
    d1, big = _central_diff(f, x, n, h)
    if n == 0:
        return d1, 0.0, rel_eval_err * big
    d2, _ = _central_diff(f, x, n, h / 2.0)
    rich = (4.0 * d2 - d1) / 3.0
    noise = (2.0 ** n) * rel_eval_err * big / (h / 2.0) ** n
    return rich, abs(d2 - d1) / 3.0, noise


def _step(x: float) -> float:
    return max(1e-2 * abs(x), 1e-3)


def check_cm(f: Callable[[float], float], interval, max_order: int = 4, tol: float = 1e-10,
             n_points: int = 24, function_id: str = "f", rel_eval_err: float = 1e-14) -> CmReport:
    """Flag any grid point where (-1)^n f^(n) < -(tol + error + noise floor)."""
    a, b = map(float, interval)
    if not 0 < a < b:
        raise DomainError("interval must satisfy 0 < a < b")
    if not 0 <= max_order <= 6:
        raise DomainError("max_order must lie in 0..6")
    grid = chebyshev_grid(a, b, n_points)
    violations = []
    floors = []
    for x in grid:
        h = min(_step(x), 0.9 * x / max(1, max_order))
        row = []
        for n in range(max_order + 1):
            d, err, noise = derivative(f, x, n, h, rel_eval_err)
            slack = tol + err + noise
            row.append(slack)
            val = (-1) ** n * d
            if val < -slack:
                violations.append((float(x), n, float(val)))
        floors.append(max(row))
    return CmReport(function_id, grid.tolist(), max_order, violations,
                    VIOLATION if violations else CONSISTENT, "cm", floors)


def check_log_convex(f: Callable[[float], float], interval, tol: float = 1e-10,
                     n_points: int = 41, function_id: str = "f") -> CmReport:
    """Midpoint test ln f(x_i) <= (ln f(x_{i-k}) + ln f(x_{i+k}))/2 + tol on nested triples."""
    a, b = map(float, interval)
    if not a < b:
        raise DomainError("empty interval")
    grid = np.linspace(a, b, n_points)
    vals = np.array([_safe(f, x) for x in grid])
    if np.any(vals <= 0):
        raise DomainError("log-convexity needs f > 0 on the grid")
    lv = np.log(vals)
    violations = []
    for k in range(1, n_points // 2 + 1):
        for i in range(k, n_points - k):
            gap = 0.5 * (lv[i - k] + lv[i + k]) - lv[i]
            if gap < -tol:
                violations.append((float(grid[i]), k, float(gap)))
    return CmReport(function_id, grid.tolist(), 0, violations,
                    VIOLATION if violations else CONSISTENT, "log_convex")


def check_bernstein(f: Callable[[float], float], interval, max_order: int = 3, tol: float = 1e-10,
                    n_points: int = 24, function_id: str = "f") -> CmReport:
    """f >= 0 on the grid and f' passes check_cm up to ``max_order``."""

    def fprime(x):
        h = min(_step(x), 0.5 * x)
        return derivative(f, x, 1, h)[0]

    # f' is itself a difference quotient, so its noise is far above machine level
    rep = check_cm(fprime, interval, max_order, tol, n_points, function_id, rel_eval_err=1e-8)
    grid = rep.grid
    neg = [(x, -1, v) for x in grid for v in [_safe(f, x)] if v < -tol]
    violations = neg + rep.violations
    return CmReport(function_id, grid, max_order, violations,
                    VIOLATION if violations else CONSISTENT, "bernstein", rep.noise_floor)
