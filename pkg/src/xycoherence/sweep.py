"""Sweeps of a measure over lambda, finite-difference derivatives and
classification of non-analyticities.

Detection compares a series with the same sweep at half the step:

* divergence: a local maximum of |d1| standing above its two coarse
  neighbours by more than the noise floor, without a sign change of d1,
  with |d1| falling strictly for three steps on either side, and whose
  height above those neighbours grows by a ratio >= 1.5 when the peak is resampled at half the
  step (largest refined |d1| within half a coarse step). A logarithmic
  singularity x ln|x| gives 1.9-2.4 depending on where it falls between grid
  points; smooth maxima give ~1.
* jump: a step in d1. Adjacent d1 differences exceeding 8x the median
  neighbour difference in a 21-point window are grouped into clusters; the
  net change of d1 across the cluster must agree within [0.67, 1.5] between
  the two resolutions. Clusters within 3 coarse steps of a divergence are
  part of that divergence and are not reported separately.
* direction switch (LQU): consecutive optimal directions more than 30
  degrees apart.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import partial

import numpy as np

from .correlators import DEFAULT_QUADRATURE, ModelParams, QuadratureConfig, correlator_set
from .measures import Kind, MeasureKind, evaluate

__all__ = [
    "SweepGrid",
    "MeasureSeries",
    "Divergence",
    "Jump",
    "DirectionSwitch",
    "FeatureReport",
    "SweepError",
    "sweep",
    "differentiate",
    "detect_features",
]

MIN_INTERVALS = 16
DIVERGENCE_GROWTH = 1.5
JUMP_FACTOR = 8.0
JUMP_STABLE = (0.67, 1.5)
WINDOW = 21
SWITCH_ANGLE = math.radians(30.0)
MERGE_STEPS = 3
DECAY_STEPS = 3


class SweepError(RuntimeError):
    """Evaluation failed at one grid point; ``lam`` names it."""

    def __init__(self, lam: float, cause: Exception):
        super().__init__(f"at lambda={lam!r}: {type(cause).__name__}: {cause}")
        self.lam = lam
        self.cause = cause


@dataclass(frozen=True)
class SweepGrid:
    lambda_min: float
    lambda_max: float
    step: float

    def __post_init__(self):
        if not all(map(math.isfinite, (self.lambda_min, self.lambda_max, self.step))):
            raise ValueError("grid bounds and step must be finite")
        if self.step <= 0:
            raise ValueError(f"step must be positive, got {self.step!r}")
        if self.lambda_min < 0:
            raise ValueError(f"lambda_min must be >= 0, got {self.lambda_min!r}")
        if not self.lambda_min < self.lambda_max:
            raise ValueError("empty window: lambda_min must be below lambda_max")
        if self.intervals < MIN_INTERVALS:
            raise ValueError(f"grid has {self.intervals} intervals; at least {MIN_INTERVALS} are required")

    @property
    def intervals(self) -> int:
        return int(math.floor((self.lambda_max - self.lambda_min) / self.step + 1e-9))

    def points(self) -> np.ndarray:
        # rounding keeps grid points such as 1.0 exact
        return np.round(self.lambda_min + self.step * np.arange(self.intervals + 1), 12)

    def refined(self) -> "SweepGrid":
        return SweepGrid(self.lambda_min, self.lambda_max, self.step / 2.0)


@dataclass
class MeasureSeries:
    grid: SweepGrid
    kind: MeasureKind
    gamma: float
    beta: float
    values: np.ndarray
    d1: np.ndarray | None = None
    d2: np.ndarray | None = None
    optimal_directions: np.ndarray | None = None

    @property
    def lambdas(self) -> np.ndarray:
        return self.grid.points()


@dataclass(frozen=True)
class Divergence:
    lam: float
    growth_ratio: float


@dataclass(frozen=True)
class Jump:
    lam: float
    jump_size: float


@dataclass(frozen=True)
class DirectionSwitch:
    lam: float
    from_axis: str
    to_axis: str


@dataclass
class FeatureReport:
    divergences: list[Divergence] = field(default_factory=list)
    jumps: list[Jump] = field(default_factory=list)
    direction_switches: list[DirectionSwitch] = field(default_factory=list)

    def is_empty(self) -> bool:
        return not (self.divergences or self.jumps or self.direction_switches)


def _point(lam: float, kind: MeasureKind, gamma: float, beta: float, r: int, q: QuadratureConfig):
    try:
        c = correlator_set(ModelParams(lam=float(lam), gamma=gamma, beta=beta, r=r), q)
        return evaluate(kind, c)
    except Exception as exc:
        raise SweepError(float(lam), exc) from exc


def sweep(
    kind: MeasureKind,
    grid: SweepGrid,
    gamma: float,
    beta: float,
    *,
    r: int = 1,
    q: QuadratureConfig = DEFAULT_QUADRATURE,
    workers: int = 1,
) -> MeasureSeries:
    """Evaluate ``kind`` at every grid point and fill in the derivatives.

    With ``workers > 1`` points are farmed out to a process pool; results are
    collected in grid order, so output does not depend on the worker count.
    """
    ModelParams(lam=grid.lambda_min, gamma=gamma, beta=beta, r=r)  # validate once up front
    lams = grid.points()
    fn = partial(_point, kind=kind, gamma=gamma, beta=beta, r=r, q=q)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(fn, lams, chunksize=max(1, len(lams) // (4 * workers))))
    else:
        results = [fn(lam) for lam in lams]
    values = np.array([v for v, _ in results])
    dirs = np.array([d for _, d in results]) if kind.kind is Kind.LQU else None
    series = MeasureSeries(grid=grid, kind=kind, gamma=gamma, beta=beta, values=values,
                           optimal_directions=dirs)
    return differentiate(series)


def differentiate(series: MeasureSeries) -> MeasureSeries:
    """Central first and second differences, one-sided at the two ends."""
    f = np.asarray(series.values, dtype=float)
    h = series.grid.step
    d1 = np.empty_like(f)
    d2 = np.empty_like(f)
    d1[1:-1] = (f[2:] - f[:-2]) / (2.0 * h)
    d1[0] = (f[1] - f[0]) / h
    d1[-1] = (f[-1] - f[-2]) / h
    d2[1:-1] = (f[2:] - 2.0 * f[1:-1] + f[:-2]) / (h * h)
    d2[0] = d2[1]
    d2[-1] = d2[-2]
    return replace(series, d1=d1, d2=d2)


def _noise_floor(diffs: np.ndarray, k: int) -> float:
    # median |neighbour difference| over the 21 points centred on pair (k, k+1)
    half = WINDOW // 2
    lo, hi = max(0, k - half + 1), min(len(diffs), k + half)
    window = np.abs(np.concatenate([diffs[lo:k], diffs[k + 1:hi]]))
    return float(np.median(window)) if window.size else 0.0


def _same_sign(d: np.ndarray, i: int) -> bool:
    s = np.sign(d[i - 1:i + 2])
    return bool(s[0] != 0 and np.all(s == s[0]))


def _divergences(coarse: MeasureSeries, fine: MeasureSeries) -> list[Divergence]:
    d1 = coarse.d1
    a, af = np.abs(d1), np.abs(fine.d1)
    diffs = np.diff(d1)
    lams = coarse.lambdas
    found = []
    for i in range(DECAY_STEPS, len(a) - DECAY_STEPS):
        if not (a[i] > a[i - 1] and a[i] > a[i + 1]):
            continue
        # a zero crossing of d1 (|d1| shaped like a V) is a kink, not a singularity
        if not _same_sign(d1, i):
            continue
        base = 0.5 * (a[i - 1] + a[i + 1])
        excess = a[i] - base
        if excess <= max(_noise_floor(diffs, i - 1), _noise_floor(diffs, i)):
            continue
        # |d1| of a cusp decays on both sides; past a kink the background slope
        # makes it grow again within a few steps
        if not (np.all(np.diff(a[i - DECAY_STEPS:i + 1]) > 0) and np.all(np.diff(a[i:i + DECAY_STEPS + 1]) < 0)):
            continue
        # peak within half a coarse step, over the same fixed baseline
        growth = (np.max(af[2 * i - 1:2 * i + 2]) - base) / excess
        if growth >= DIVERGENCE_GROWTH:
            found.append(Divergence(lam=float(lams[i]), growth_ratio=float(growth)))
    return found


def _jump_clusters(series: MeasureSeries) -> list[tuple[float, float]]:
    d1 = series.d1
    diffs = np.diff(d1)
    n = len(diffs)
    h = series.grid.step
    lams = series.lambdas
    flagged = [k for k in range(n) if abs(diffs[k]) > JUMP_FACTOR * _noise_floor(diffs, k) and diffs[k] != 0]
    clusters: list[list[int]] = []
    for k in flagged:
        if clusters and k - clusters[-1][-1] <= 2:
            clusters[-1].append(k)
        else:
            clusters.append([k])
    out = []
    for ks in clusters:
        first, last = ks[0], ks[-1]
        lo, hi = max(0, first - 1), min(len(d1) - 1, last + 2)
        # smooth slope of d1 on either side, removed from the net change
        side = np.concatenate([diffs[max(0, lo - 10):lo], diffs[hi:hi + 10]])
        background = float(np.median(side)) if side.size else 0.0
        size = float(d1[hi] - d1[lo] - background * (hi - lo))
        weights = np.abs(diffs[first:last + 1])
        mids = lams[first:last + 1] + 0.5 * h
        out.append((float(np.sum(weights * mids) / np.sum(weights)), size))
    return out


def _jumps(coarse: MeasureSeries, fine: MeasureSeries, divergences: list[Divergence]) -> list[Jump]:
    h = coarse.grid.step
    fine_clusters = _jump_clusters(fine)
    found = []
    for lam, size in _jump_clusters(coarse):
        if any(abs(lam - d.lam) <= MERGE_STEPS * h for d in divergences):
            continue
        match = [(fl, fs) for fl, fs in fine_clusters if abs(fl - lam) <= 2 * h]
        if not match or size == 0.0:
            continue
        fl, fs = min(match, key=lambda m: abs(m[0] - lam))
        ratio = fs / size
        if JUMP_STABLE[0] <= ratio <= JUMP_STABLE[1]:
            found.append(Jump(lam=fl, jump_size=fs))
    return found


def _axis_name(v: np.ndarray) -> str:
    return "xyz"[int(np.argmax(np.abs(v)))]


def _switches(series: MeasureSeries) -> list[DirectionSwitch]:
    dirs = series.optimal_directions
    if dirs is None:
        return []
    lams = series.lambdas
    cos_limit = math.cos(SWITCH_ANGLE)
    found = []
    for i in range(len(dirs) - 1):
        # n and -n define the same observable
        if abs(float(np.dot(dirs[i], dirs[i + 1]))) < cos_limit:
            found.append(DirectionSwitch(lam=float(0.5 * (lams[i] + lams[i + 1])),
                                         from_axis=_axis_name(dirs[i]), to_axis=_axis_name(dirs[i + 1])))
    return found


def detect_features(series: MeasureSeries, refined: MeasureSeries) -> FeatureReport:
    """Locate divergences and jumps of d1 (and LQU direction switches)."""
    g, gr = series.grid, refined.grid
    if not (math.isclose(gr.step, g.step / 2) and gr.lambda_min == g.lambda_min
            and len(refined.values) == 2 * len(series.values) - 1):
        raise ValueError("refined series must cover the same interval at half the step")
    if series.d1 is None:
        series = differentiate(series)
    if refined.d1 is None:
        refined = differentiate(refined)
    divergences = _divergences(series, refined)
    return FeatureReport(
        divergences=divergences,
        jumps=_jumps(series, refined, divergences),
        direction_switches=_switches(series),
    )
