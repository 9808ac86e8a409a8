"""Thermodynamic-limit correlators of the anisotropic XY chain in a transverse field.

The chain is

    H = -(lam/2) sum_j [(1+gamma) X_j X_{j+1} + (1-gamma) Y_j Y_{j+1}] - sum_j Z_j

and every quantity here follows from the single-particle dispersion

    omega(phi) = sqrt((gamma lam sin phi)^2 + (1 + lam cos phi)^2) / 2

through one-dimensional integrals over phi in [0, pi]. The two-point functions
<X_0 X_r> and <Y_0 Y_r> are r x r Toeplitz determinants of the G_r integrals.

Sign convention: ``magnetization`` returns -1 in the decoupled limit lam = 0,
i.e. these formulas describe the field term with the opposite sign to the
Hamiltonian above (equivalently Z -> -Z, which leaves XX, YY and ZZ
correlators unchanged). The finite-chain oracle uses the matching sign.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np
from scipy.integrate import quad

__all__ = [
    "INFINITE",
    "MAX_DISTANCE",
    "ModelParams",
    "QuadratureConfig",
    "QuadratureError",
    "CorrelatorSet",
    "dispersion",
    "magnetization",
    "g_function",
    "correlator_xx",
    "correlator_yy",
    "correlator_zz",
    "correlator_set",
]

#: Inverse temperature of the thermal ground state (T = 0).
INFINITE = math.inf

#: Largest spin separation for which Toeplitz determinants are formed.
MAX_DISTANCE = 32


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters of one evaluation point.

    Parameters
    ----------
    lam : float
        Inverse field strength, ``lam >= 0``.
    gamma : float
        Anisotropy in ``(0, 1]``. The XX line ``gamma = 0`` is rejected.
    beta : float
        Inverse temperature ``1/kT``; :data:`INFINITE` selects the thermal
        ground state, where ``tanh(beta*omega)`` is replaced by exactly 1.
    r : int
        Separation of the two spins.
    """

    lam: float
    gamma: float
    beta: float = INFINITE
    r: int = 1

    def __post_init__(self):
        if not (math.isfinite(self.lam) and self.lam >= 0):
            raise ValueError(f"lambda must be finite and >= 0, got {self.lam!r}")
        if not (0 < self.gamma <= 1):
            raise ValueError(f"gamma must lie in (0, 1], got {self.gamma!r}")
        if math.isnan(self.beta) or self.beta <= 0:
            raise ValueError(f"beta must be positive or INFINITE, got {self.beta!r}")
        if isinstance(self.r, bool) or int(self.r) != self.r or self.r < 1:
            raise ValueError(f"r must be a positive integer, got {self.r!r}")
        if self.r > MAX_DISTANCE:
            raise ValueError(f"r must be <= {MAX_DISTANCE}, got {self.r!r}")
        object.__setattr__(self, "r", int(self.r))

    @classmethod
    def from_temperature(cls, lam: float, gamma: float, temperature: float, r: int = 1) -> "ModelParams":
        """Build parameters from a temperature; ``temperature == 0`` means T = 0 exactly."""
        if math.isnan(temperature) or temperature < 0:
            raise ValueError(f"temperature must be >= 0, got {temperature!r}")
        beta = INFINITE if temperature == 0 else 1.0 / temperature
        return cls(lam=lam, gamma=gamma, beta=beta, r=r)

    @property
    def ground_state(self) -> bool:
        return math.isinf(self.beta)

    @property
    def temperature(self) -> float:
        return 0.0 if self.ground_state else 1.0 / self.beta


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_subdivisions: int = 2000

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


DEFAULT_QUADRATURE = QuadratureConfig()


class QuadratureError(ArithmeticError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message: str, value: float, error_estimate: float):
        super().__init__(f"{message} (value={value:.6g}, error estimate={error_estimate:.3g})")
        self.value = value
        self.error_estimate = error_estimate


@dataclass(frozen=True)
class CorrelatorSet:
    """Magnetization, pair correlators at separation ``params.r`` and the G_r used."""

    m: float
    cxx: float
    cyy: float
    czz: float
    params: ModelParams
    g: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self):
        for name in ("m", "cxx", "cyy", "czz"):
            value = getattr(self, name)
            if not abs(value) <= 1 + 1e-9:
                raise ValueError(f"correlator {name}={value!r} outside [-1, 1]")


def dispersion(phi: float, params: ModelParams) -> float:
    """Quasiparticle energy omega(phi); vanishes only at phi = pi when lam = 1."""
    lam, gamma = params.lam, params.gamma
    return 0.5 * math.hypot(gamma * lam * math.sin(phi), 1.0 + lam * math.cos(phi))


def _thermal_weight(params: ModelParams) -> Callable[[float], float]:
    # tanh(beta*w)/w, the common factor of every integrand. Integrand numerators
    # vanish wherever w does, so w == 0 contributes 0.
    beta = params.beta
    if math.isinf(beta):
        return lambda w: 1.0 / w
    return lambda w: math.tanh(beta * w) / w


def _integrate(func: Callable[[float], float], q: QuadratureConfig, what: str) -> float:
    # QUADPACK QAGS: adaptive bisection with a 21/10-point Gauss-Kronrod pair.
    # phi = pi, where omega closes at lam = 1, is an endpoint and never sampled.
    out = quad(func, 0.0, math.pi, epsabs=q.abs_tol, epsrel=q.rel_tol,
               limit=q.max_subdivisions, full_output=1)
    value, err = out[0], out[1]
    if len(out) > 3:
        raise QuadratureError(f"{what}: {out[3].splitlines()[0].strip()}", value, err)
    return value


def magnetization(params: ModelParams, q: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """Transverse magnetization <Z>, in [-1, 0] for lam >= 0."""
    lam, gamma = params.lam, params.gamma
    weight = _thermal_weight(params)

    def integrand(phi):
        a = 1.0 + lam * math.cos(phi)
        w = 0.5 * math.hypot(gamma * lam * math.sin(phi), a)
        if w == 0.0:
            return 0.0
        return a * weight(w)

    return -_integrate(integrand, q, "magnetization") / (2.0 * math.pi)


def g_function(r: int, params: ModelParams, q: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """G_r for any integer r (negative allowed); G_0 equals minus the magnetization."""
    lam, gamma = params.lam, params.gamma
    gl = gamma * lam
    weight = _thermal_weight(params)

    def integrand(phi):
        c, s = math.cos(phi), math.sin(phi)
        a = 1.0 + lam * c
        w = 0.5 * math.hypot(gl * s, a)
        if w == 0.0:
            return 0.0
        return (math.cos(r * phi) * a - gl * math.sin(r * phi) * s) * weight(w)

    return _integrate(integrand, q, f"G_{r}") / (2.0 * math.pi)


def _g_table(params: ModelParams, q: QuadratureConfig) -> dict[int, float]:
    r = params.r
    return {k: g_function(k, params, q) for k in range(-r, r + 1)}


def _toeplitz_xx(g: Mapping[int, float], r: int) -> float:
    idx = np.arange(r)
    t = np.vectorize(g.__getitem__, otypes=[float])(idx[:, None] - idx[None, :] - 1)
    return float(np.linalg.det(t))


def _toeplitz_yy(g: Mapping[int, float], r: int) -> float:
    idx = np.arange(r)
    t = np.vectorize(g.__getitem__, otypes=[float])(idx[:, None] - idx[None, :] + 1)
    return float(np.linalg.det(t))


def correlator_xx(params: ModelParams, q: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """<X_0 X_r>; for r = 1 this is G_{-1}."""
    return _toeplitz_xx(_g_table(params, q), params.r)


def correlator_yy(params: ModelParams, q: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """<Y_0 Y_r>; for r = 1 this is G_1."""
    return _toeplitz_yy(_g_table(params, q), params.r)


def correlator_zz(params: ModelParams, q: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    r = params.r
    m = magnetization(params, q)
    return m * m - g_function(r, params, q) * g_function(-r, params, q)


def correlator_set(params: ModelParams, q: QuadratureConfig = DEFAULT_QUADRATURE) -> CorrelatorSet:
    """Evaluate m, cxx, cyy, czz at ``params``, sharing one table of G_r values."""
    r = params.r
    g = _g_table(params, q)
    m = magnetization(params, q)
    return CorrelatorSet(
        m=m,
        cxx=_toeplitz_xx(g, r),
        cyy=_toeplitz_yy(g, r),
        czz=m * m - g[r] * g[-r],
        params=params,
        g=g,
    )
