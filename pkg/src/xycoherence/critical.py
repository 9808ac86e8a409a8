"""Finite-temperature estimates of the critical and factorization points.

At T > 0 the T = 0 divergence of d1 at the critical point becomes a smooth
extremum, and the jump of d1 at the factorization point becomes an extremum
of d2. Both estimators take the grid argmax of |d1| (resp. |d2|) over the
caller's window and refine it with a parabola through the three points
around it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .correlators import DEFAULT_QUADRATURE, QuadratureConfig
from .measures import Kind, MeasureKind
from .sweep import SweepGrid, sweep

__all__ = ["EstimationError", "EstimateResult", "factorization_point", "estimate_cp", "estimate_fp"]


class EstimationError(ArithmeticError):
    """No interior extremum in the search window."""


@dataclass(frozen=True)
class EstimateResult:
    lambda_hat: float
    temperature: float
    kind: str  # "CP" or "FP"
    measure: MeasureKind
    window: SweepGrid


def factorization_point(gamma: float) -> float:
    """lambda_f = 1/sqrt(1 - gamma^2); infinite for the Ising chain."""
    return math.inf if gamma >= 1 else 1.0 / math.sqrt(1.0 - gamma * gamma)


def _check_temperature(T: float) -> None:
    if not (math.isfinite(T) and T > 0):
        raise ValueError(f"temperature must be positive and finite, got {T!r}")


def _refined_argmax(lams: np.ndarray, y: np.ndarray) -> float:
    i = int(np.argmax(y))
    if i == 0 or i == len(y) - 1:
        raise EstimationError(f"extremum sits on the window edge at lambda={lams[i]:.6g}")
    y0, y1, y2 = y[i - 1], y[i], y[i + 1]
    curvature = y0 - 2.0 * y1 + y2
    shift = 0.0 if curvature == 0 else 0.5 * (y0 - y2) / curvature
    return float(lams[i] + shift * (lams[1] - lams[0]))


def estimate_cp(
    kind: MeasureKind,
    gamma: float,
    T: float,
    window: SweepGrid,
    *,
    q: QuadratureConfig = DEFAULT_QUADRATURE,
    workers: int = 1,
) -> EstimateResult:
    """Critical point from the extremum of |d1| at temperature ``T``."""
    _check_temperature(T)
    series = sweep(kind, window, gamma, 1.0 / T, q=q, workers=workers)
    lam = _refined_argmax(series.lambdas, np.abs(series.d1))
    return EstimateResult(lambda_hat=lam, temperature=T, kind="CP", measure=kind, window=window)


def estimate_fp(
    kind: MeasureKind,
    gamma: float,
    T: float,
    window: SweepGrid,
    *,
    q: QuadratureConfig = DEFAULT_QUADRATURE,
    workers: int = 1,
) -> EstimateResult:
    """Factorization point from the extremum of |d2| at temperature ``T``.

    The square-root-free bound carries no factorization signal, so
    ``LQC_LOWER`` measures are refused.
    """
    _check_temperature(T)
    if kind.kind is Kind.LQC_LOWER:
        raise ValueError("the lower-bound measure does not resolve the factorization point")
    lam_f = factorization_point(gamma)
    if not window.lambda_min < lam_f < window.lambda_max:
        raise ValueError(
            f"window [{window.lambda_min}, {window.lambda_max}] must contain lambda_f = {lam_f:.6g}")
    series = sweep(kind, window, gamma, 1.0 / T, q=q, workers=workers)
    lam = _refined_argmax(series.lambdas, np.abs(series.d2))
    return EstimateResult(lambda_hat=lam, temperature=T, kind="FP", measure=kind, window=window)
