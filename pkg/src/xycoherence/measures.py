"""Skew-information coherence measures and local quantum uncertainty.

Every trace is evaluated in the eigenbasis of the state. With
rho = sum_i p_i |i><i| and K_ij = <i|K|j>,

    I(rho, K)   = 1/2 sum_ij |K_ij|^2 (sqrt p_i - sqrt p_j)^2
    I^L(rho, K) = 1/4 sum_ij |K_ij|^2 (p_i - p_j)^2

which equal Tr(rho K^2) - Tr(sqrt(rho) K sqrt(rho) K) and
-1/4 Tr[rho, K]^2 respectively, and are non-negative term by term.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass

import numpy as np

from .correlators import CorrelatorSet
from .hermitian import PAULI, LocalObservable, max_eig_sym3, psd_spectrum, sqrt_psd
from .states import DensityMatrix, single_spin_state, two_spin_state

__all__ = [
    "Kind",
    "Target",
    "MeasureKind",
    "LquResult",
    "MeasureError",
    "skew_information",
    "skew_information_lower",
    "variance",
    "local_coherence",
    "lqu",
    "evaluate",
]

log = logging.getLogger(__name__)

CLAMP_NOISE = 1e-10
CLAMP_LIMIT = 1e-8


class MeasureError(ArithmeticError):
    """A measure came out negative beyond round-off."""


class Kind(str, enum.Enum):
    LQC_FULL = "lqc"
    LQC_LOWER = "lqc-lower"
    LQU = "lqu"


class Target(str, enum.Enum):
    SINGLE_SPIN = "single"
    TWO_SPIN = "pair"


@dataclass(frozen=True)
class MeasureKind:
    """Which quantity a sweep evaluates.

    LQC kinds carry an observable (``axis``) acting on the first spin; LQU
    is optimized over all observables and is defined for two spins only.
    """

    kind: Kind
    target: Target = Target.TWO_SPIN
    axis: LocalObservable | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        object.__setattr__(self, "target", Target(self.target))
        if isinstance(self.axis, str):
            object.__setattr__(self, "axis", LocalObservable.axis(self.axis))
        if self.kind is Kind.LQU:
            if self.target is not Target.TWO_SPIN:
                raise ValueError("LQU is only defined for the two-spin state")
            if self.axis is not None:
                raise ValueError("LQU takes no observable axis")
        elif self.axis is None:
            raise ValueError(f"{self.kind.value} needs an observable axis")

    @classmethod
    def parse(cls, name: str, target: str | Target = Target.TWO_SPIN) -> "MeasureKind":
        """Parse CLI-style names: ``lqu``, ``lqc-x``, ``lqc-z-lower``."""
        parts = name.lower().split("-")
        if parts == ["lqu"]:
            return cls(Kind.LQU, Target(target))
        if len(parts) in (2, 3) and parts[0] == "lqc" and parts[1] in ("x", "y", "z"):
            if len(parts) == 3 and parts[2] != "lower":
                raise ValueError(f"unknown measure {name!r}")
            kind = Kind.LQC_LOWER if len(parts) == 3 else Kind.LQC_FULL
            return cls(kind, Target(target), LocalObservable.axis(parts[1]))
        raise ValueError(f"unknown measure {name!r}; expected lqu, lqc-<x|y|z> or lqc-<x|y|z>-lower")

    @property
    def axis_label(self) -> str | None:
        if self.axis is None:
            return None
        for name in ("x", "y", "z"):
            if self.axis == LocalObservable.axis(name):
                return name
        return "n({:.6g},{:.6g},{:.6g})".format(*self.axis.n)

    @property
    def label(self) -> str:
        if self.kind is Kind.LQU:
            return "lqu"
        suffix = "-lower" if self.kind is Kind.LQC_LOWER else ""
        return f"lqc-{self.axis_label}{suffix}/{self.target.value}"


@dataclass(frozen=True)
class LquResult:
    value: float
    optimal_direction: np.ndarray
    w_matrix: np.ndarray


def _clamp(value: float, what: str) -> float:
    if value >= 0.0:
        return value
    if value < -CLAMP_LIMIT:
        raise MeasureError(f"{what} = {value:.3g} is negative beyond round-off")
    if value < -CLAMP_NOISE:
        log.debug("clamped %s = %.3g to 0", what, value)
    return 0.0


def _state(rho) -> DensityMatrix:
    return rho if isinstance(rho, DensityMatrix) else DensityMatrix(np.asarray(rho))


def _observable(K, dim: int) -> np.ndarray:
    K = np.asarray(getattr(K, "matrix", K))
    if K.shape != (dim, dim):
        raise ValueError(f"observable shape {K.shape} does not match state dimension {dim}")
    return K


def _in_eigenbasis(rho: DensityMatrix, K: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    w, V = rho.eigensystem
    Kp = V.conj().T @ K @ V
    return psd_spectrum(w), np.abs(Kp) ** 2


def skew_information(rho, K) -> float:
    """Wigner-Yanase skew information -1/2 Tr[sqrt(rho), K]^2."""
    rho = _state(rho)
    p, K2 = _in_eigenbasis(rho, _observable(K, rho.dim))
    s = np.sqrt(p)
    return _clamp(float(0.5 * np.sum(K2 * (s[:, None] - s[None, :]) ** 2)), "skew information")


def skew_information_lower(rho, K) -> float:
    """Square-root-free lower bound -1/4 Tr[rho, K]^2."""
    rho = _state(rho)
    p, K2 = _in_eigenbasis(rho, _observable(K, rho.dim))
    return _clamp(float(0.25 * np.sum(K2 * (p[:, None] - p[None, :]) ** 2)), "skew information lower bound")


def variance(rho, K) -> float:
    rho = _state(rho)
    A = rho.entries
    K = _observable(K, rho.dim)
    mean = np.trace(A @ K).real
    return _clamp(float(np.trace(A @ K @ K).real - mean * mean), "variance")


def local_coherence(rho_ab, K_a, lower: bool = False) -> float:
    """Skew information of a two-spin state against ``K_a`` on the first spin."""
    rho_ab = _state(rho_ab)
    if rho_ab.dim != 4:
        raise ValueError("local coherence needs a two-spin (4x4) state")
    K = np.kron(_observable(K_a, 2), np.eye(2))
    return skew_information_lower(rho_ab, K) if lower else skew_information(rho_ab, K)


def lqu(rho_ab) -> LquResult:
    """Local quantum uncertainty 1 - lambda_max(W) and its optimal direction.

    W_ij = Tr(sqrt(rho) (s_i x I) sqrt(rho) (s_j x I)); the minimizing
    observable n.sigma has n along the top eigenvector of W.
    """
    rho_ab = _state(rho_ab)
    if rho_ab.dim != 4:
        raise ValueError("LQU needs a two-spin (4x4) state")
    root = sqrt_psd(rho_ab)
    ops = [np.kron(PAULI[a], np.eye(2)) for a in "xyz"]
    halves = [root @ op for op in ops]
    W = np.array([[np.trace(hi @ hj).real for hj in halves] for hi in halves])
    W = 0.5 * (W + W.T)
    top, direction = max_eig_sym3(W)
    value = _clamp(1.0 - top, "LQU")
    return LquResult(value=value, optimal_direction=direction, w_matrix=W)


def evaluate(kind: MeasureKind, c: CorrelatorSet) -> tuple[float, np.ndarray | None]:
    """Value of ``kind`` at one set of correlators (plus the LQU direction)."""
    if kind.kind is Kind.LQU:
        res = lqu(two_spin_state(c))
        return res.value, res.optimal_direction
    lower = kind.kind is Kind.LQC_LOWER
    if kind.target is Target.SINGLE_SPIN:
        rho = single_spin_state(c)
        K = kind.axis.matrix
        value = skew_information_lower(rho, K) if lower else skew_information(rho, K)
    else:
        value = local_coherence(two_spin_state(c), kind.axis, lower=lower)
    return value, None
