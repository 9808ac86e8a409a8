"""Independent reference computations used to check the main pipeline.

``finite_chain_correlators`` diagonalizes the full 2^N Hamiltonian of a
periodic ring and takes Gibbs averages; nothing is shared with the
quadrature route. ``brute_force_lqu`` minimizes the local skew information
over a sphere of observables using LAPACK for the square root, sharing
nothing with the closed-form W-matrix route.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .correlators import CorrelatorSet, ModelParams
from .hermitian import PAULI

__all__ = ["FiniteChainSpec", "ChainProfile", "finite_chain_profile", "finite_chain_correlators", "brute_force_lqu"]

MIN_SITES, MAX_SITES = 2, 12

#: Energy scale of the Gibbs weights relative to the Pauli-matrix Hamiltonian.
#: The quasiparticle energy entering tanh(beta*omega) is half of the Pauli
#: chain's, so beta has the same meaning in both routes only with H/2.
ENERGY_UNIT = 0.5


@dataclass(frozen=True)
class FiniteChainSpec:
    n_sites: int
    params: ModelParams
    boundary: str = "periodic"

    def __post_init__(self):
        if not MIN_SITES <= self.n_sites <= MAX_SITES:
            raise ValueError(f"n_sites must be in [{MIN_SITES}, {MAX_SITES}], got {self.n_sites!r}")
        if self.boundary != "periodic":
            raise ValueError("only periodic boundaries are supported")
        if math.isinf(self.params.beta):
            raise ValueError("the finite-chain oracle needs a finite beta")


@dataclass(frozen=True)
class ChainProfile:
    """Site-resolved thermal expectations; index j refers to site j (and j + r)."""

    z: np.ndarray
    xx: np.ndarray
    yy: np.ndarray
    zz: np.ndarray


def _hamiltonian(n: int, lam: float, gamma: float) -> np.ndarray:
    # Field term +sum Z, matching the sign convention of the integrals
    # (<Z> -> -1 at lam = 0). Bit j of a basis index is spin j; bit 0 is Z = +1.
    dim = 1 << n
    states = np.arange(dim)
    bits = (states[:, None] >> np.arange(n)[None, :]) & 1
    H = np.zeros((dim, dim))
    H[states, states] = np.sum(1 - 2 * bits, axis=1)
    for j in range(n):
        k = (j + 1) % n
        flipped = states ^ ((1 << j) | (1 << k))
        # X_j X_k -> 1, Y_j Y_k -> -(-1)^(b_j + b_k)
        yy = -((-1.0) ** (bits[:, j] + bits[:, k]))
        amp = -0.5 * lam * ((1 + gamma) + (1 - gamma) * yy)
        np.add.at(H, (flipped, states), amp)
    return H


def finite_chain_profile(spec: FiniteChainSpec) -> ChainProfile:
    n, p = spec.n_sites, spec.params
    r = p.r % n
    energies, vecs = np.linalg.eigh(_hamiltonian(n, p.lam, p.gamma))
    weights = np.exp(-p.beta * ENERGY_UNIT * (energies - energies[0]))
    weights /= weights.sum()
    states = np.arange(1 << n)
    bits = (states[:, None] >> np.arange(n)[None, :]) & 1
    sign = 1 - 2 * bits
    prob = (vecs**2) @ weights  # thermal diagonal in the computational basis
    z = sign.T @ prob
    zz = np.array([np.dot(sign[:, j] * sign[:, (j + r) % n], prob) for j in range(n)])
    xx, yy = np.empty(n), np.empty(n)
    for j in range(n):
        k = (j + r) % n
        flipped = states ^ ((1 << j) | (1 << k))
        # sum_k w_k psi_k(s) psi_k(s'), s' = s with spins j and k flipped
        overlap = np.einsum("sk,sk,k->s", vecs, vecs[flipped, :], weights)
        xx[j] = overlap.sum()
        yy[j] = np.dot(-((-1.0) ** (bits[:, j] + bits[:, k])), overlap)
    return ChainProfile(z=z, xx=xx, yy=yy, zz=zz)


def finite_chain_correlators(spec: FiniteChainSpec) -> CorrelatorSet:
    """Translation-averaged m, cxx, cyy, czz of the Gibbs state of a finite ring."""
    prof = finite_chain_profile(spec)
    return CorrelatorSet(m=float(prof.z.mean()), cxx=float(prof.xx.mean()), cyy=float(prof.yy.mean()),
                         czz=float(prof.zz.mean()), params=spec.params)


def _skew_on_sphere(root: np.ndarray, theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    n = np.stack([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)], axis=-1)
    K = np.einsum("...a,aij->...ij", n, np.stack([PAULI[a] for a in "xyz"]))
    K = np.einsum("...ij,kl->...ikjl", K, np.eye(2)).reshape(*K.shape[:-2], 4, 4)
    # Tr(rho K^2) = 1 since K^2 = I
    prod = root @ K
    return 1.0 - np.einsum("...ij,...ji->...", prod, prod).real


def brute_force_lqu(rho_ab, coarse_steps: int = 64, resolution: float = 1e-8) -> tuple[float, np.ndarray]:
    """Minimize the local skew information over directions on the sphere.

    A ``coarse_steps`` x ``coarse_steps`` (theta, phi) grid is followed by a
    3-point pattern search in each angle, halving the step until it drops
    below ``resolution``.
    """
    if coarse_steps < 64:
        raise ValueError("coarse_steps must be >= 64")
    rho = np.asarray(getattr(rho_ab, "entries", rho_ab))
    w, V = np.linalg.eigh(rho)
    root = (V * np.sqrt(np.clip(w, 0.0, None))) @ V.conj().T

    thetas = np.linspace(0.0, math.pi, coarse_steps + 1)
    phis = np.linspace(0.0, 2 * math.pi, 2 * coarse_steps, endpoint=False)
    T, P = np.meshgrid(thetas, phis, indexing="ij")
    vals = _skew_on_sphere(root, T, P)
    i, j = np.unravel_index(np.argmin(vals), vals.shape)
    theta, phi, best = thetas[i], phis[j], vals[i, j]

    step = math.pi / coarse_steps
    while step > resolution:
        moved = False
        for dt, dp in ((step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)):
            v = float(_skew_on_sphere(root, np.array(theta + dt), np.array(phi + dp)))
            if v < best:
                theta, phi, best, moved = theta + dt, phi + dp, v, True
                break
        if not moved:
            step /= 2.0
    direction = np.array([math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta)])
    return max(float(best), 0.0), direction
