"""Configuration and result containers."""
from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from typing import Any

PRECISION_ENV = "PRABHAKAR_PRECISION"


def precision_mode() -> str:
    """Accumulator width selected through ``PRABHAKAR_PRECISION``."""
    mode = os.environ.get(PRECISION_ENV, "extended").strip().lower()
    if mode not in ("double", "extended"):
        raise ValueError(f"{PRECISION_ENV} must be 'double' or 'extended', got {mode!r}")
    return mode


@dataclass(frozen=True)
class SeriesConfig:
    max_terms: int = 2000
    abs_tol: float = 1e-15
    rel_tol: float = 1e-15
    raise_on_failure: bool = True

    def __post_init__(self) -> None:
        if self.max_terms < 1:
            raise ValueError("max_terms must be >= 1")
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True)
class EvalConfig:
    """Knobs shared by the evaluators.

    ``asymptotic_crossover`` is the argument x beyond which E(-x) switches
    from the power series to the inverse-power expansion.
    """

    series: SeriesConfig = field(default_factory=SeriesConfig)
    quad_tol: float = 1e-13
    asymptotic_crossover: float = 50.0
    precision: str = field(default_factory=precision_mode)

    def with_overrides(self, **kw: Any) -> "EvalConfig":
        series_keys = {"max_terms", "abs_tol", "rel_tol", "raise_on_failure"}
        skw = {k: kw.pop(k) for k in list(kw) if k in series_keys}
        cfg = replace(self, **kw)
        if skw:
            cfg = replace(cfg, series=replace(cfg.series, **skw))
        return cfg


DEFAULT_CONFIG = EvalConfig()


@dataclass(frozen=True)
class EvalResult:
    """A value with an absolute error estimate and bookkeeping."""

    value: float
    abs_err: float = 0.0
    terms: int = 0
    converged: bool = True
    diagnostics: dict = field(default_factory=dict)

    def __float__(self) -> float:
        return float(self.value)
