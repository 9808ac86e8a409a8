"""Reduced density matrices of the chain built from a :class:`CorrelatorSet`.

Basis ordering is |00>, |01>, |10>, |11> with Z|0> = +|0>.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .correlators import CorrelatorSet
from .hermitian import eigh

__all__ = [
    "StateError",
    "DensityMatrix",
    "single_spin_state",
    "two_spin_state",
    "partial_trace",
    "SWAP",
]

TRACE_TOL = 1e-12
SYMMETRY_TOL = 1e-12
PSD_TOL = 1e-10

SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=float)


class StateError(ValueError):
    """The matrix is not a valid density matrix."""


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Validated density matrix of dimension 2 or 4.

    The eigendecomposition is computed once at construction and reused by the
    measures (``eigensystem``), so a state is diagonalized exactly once.
    """

    entries: np.ndarray
    eigensystem: tuple[np.ndarray, np.ndarray] = field(init=False, repr=False)

    def __post_init__(self):
        A = np.array(self.entries)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] not in (2, 4):
            raise StateError(f"density matrix must be 2x2 or 4x4, got shape {A.shape}")
        if not np.all(np.isfinite(A)):
            raise StateError("density matrix has non-finite entries")
        if np.iscomplexobj(A) and np.max(np.abs(A.imag)) == 0.0:
            A = A.real
        if np.max(np.abs(A - A.conj().T)) > SYMMETRY_TOL:
            raise StateError("density matrix is not Hermitian")
        tr = np.trace(A).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise StateError(f"trace is {tr!r}, expected 1")
        w, V = eigh(A)
        if w[0] < -PSD_TOL:
            raise StateError(f"negative eigenvalue {w[0]:.3g}")
        A.setflags(write=False)
        object.__setattr__(self, "entries", A)
        object.__setattr__(self, "eigensystem", (w, V))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.eigensystem[0]

    def purity(self) -> float:
        return float(np.sum(self.eigenvalues**2))


def single_spin_state(c: CorrelatorSet) -> DensityMatrix:
    """diag((1+m)/2, (1-m)/2)."""
    m = c.m
    if abs(m) > 1:
        raise StateError(f"magnetization {m!r} outside [-1, 1]")
    return DensityMatrix(np.diag([(1.0 + m) / 2.0, (1.0 - m) / 2.0]))


def two_spin_state(c: CorrelatorSet) -> DensityMatrix:
    """X-shaped two-spin state from m and the XX, YY, ZZ correlators.

    Expands (1/4)[I + m(Z.I + I.Z) + sum_a c_aa sigma_a.sigma_a]; the YY term
    contributes -1 at the (|00>,|11>) corners and +1 at (|01>,|10>).
    """
    m, cxx, cyy, czz = c.m, c.cxx, c.cyy, c.czz
    rho = np.zeros((4, 4))
    rho[0, 0] = 1.0 + 2.0 * m + czz
    rho[1, 1] = rho[2, 2] = 1.0 - czz
    rho[3, 3] = 1.0 - 2.0 * m + czz
    rho[0, 3] = rho[3, 0] = cxx - cyy
    rho[1, 2] = rho[2, 1] = cxx + cyy
    return DensityMatrix(rho / 4.0)


def partial_trace(rho: DensityMatrix | np.ndarray, keep: int = 0) -> np.ndarray:
    """Reduce a two-qubit state to qubit ``keep`` (0 = first factor)."""
    A = np.asarray(getattr(rho, "entries", rho)).reshape(2, 2, 2, 2)
    if keep == 0:
        return np.einsum("ijkj->ik", A)
    if keep == 1:
        return np.einsum("jijk->ik", A)
    raise ValueError("keep must be 0 or 1")
