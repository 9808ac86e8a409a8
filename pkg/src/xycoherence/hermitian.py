"""Dense Hermitian linear algebra for matrices of dimension <= 8.

Eigendecomposition uses cyclic Jacobi rotations. Results are made
deterministic: eigenvalues ascend, each eigenvector's first non-negligible
component is real and positive, and members of a degenerate cluster are
ordered by the index of their largest-magnitude component.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "EigenError",
    "LocalObservable",
    "PAULI",
    "as_hermitian",
    "eigh",
    "sqrt_psd",
    "psd_spectrum",
    "max_eig_sym3",
]

MAX_DIM = 8
HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-10
#: eigenvalues within this many ulps of the spectral radius are rounding noise
NOISE_ULPS = 16

PAULI = {
    "x": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}

_AXES = {"x": (1.0, 0.0, 0.0), "y": (0.0, 1.0, 0.0), "z": (0.0, 0.0, 1.0)}


class EigenError(ArithmeticError):
    pass


def as_hermitian(M, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Validate ``M`` as a small square Hermitian matrix and return it as an array."""
    A = np.asarray(M)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if not 1 <= A.shape[0] <= MAX_DIM:
        raise ValueError(f"dimension must be in [1, {MAX_DIM}], got {A.shape[0]}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    if np.max(np.abs(A - A.conj().T), initial=0.0) > tol * max(1.0, np.max(np.abs(A))):
        raise ValueError("matrix is not Hermitian")
    return A


@dataclass(frozen=True)
class LocalObservable:
    """Single-qubit observable n.sigma with spectrum {+1, -1}."""

    n: tuple[float, float, float]

    def __post_init__(self):
        n = np.asarray(self.n, dtype=float)
        if n.shape != (3,):
            raise ValueError("Bloch vector must have three components")
        if abs(np.linalg.norm(n) - 1.0) > 1e-12:
            raise ValueError(f"Bloch vector must be a unit vector, |n| = {np.linalg.norm(n)!r}")
        object.__setattr__(self, "n", tuple(float(v) for v in n))

    @classmethod
    def axis(cls, name: str) -> "LocalObservable":
        try:
            return cls(_AXES[name.lower()])
        except KeyError:
            raise ValueError(f"unknown axis {name!r}; expected one of x, y, z") from None

    @classmethod
    def from_angles(cls, theta: float, phi: float) -> "LocalObservable":
        n = np.array([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)])
        return cls(tuple(n / np.linalg.norm(n)))

    @property
    def matrix(self) -> np.ndarray:
        nx, ny, nz = self.n
        return nx * PAULI["x"] + ny * PAULI["y"] + nz * PAULI["z"]


def _jacobi(A: np.ndarray, max_sweeps: int) -> tuple[np.ndarray, np.ndarray]:
    n = A.shape[0]
    V = np.eye(n, dtype=A.dtype)
    scale = np.linalg.norm(A)
    if scale == 0.0:
        return np.zeros(n), V
    pairs = [(p, q) for p in range(n - 1) for q in range(p + 1, n)]
    offdiag = ~np.eye(n, dtype=bool)
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.abs(A[offdiag]) ** 2))
        if off <= 1e-15 * scale:
            return np.real(np.diag(A)).copy(), V
        for p, q in pairs:
            apq = A[p, q]
            r = abs(apq)
            if r <= 1e-300 or r <= 1e-18 * scale:
                continue
            phase = apq / r
            tau = (A[q, q].real - A[p, p].real) / (2.0 * r)
            t = 1.0 / (abs(tau) + np.sqrt(1.0 + tau * tau))
            if tau < 0:
                t = -t
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            # phase-rotate q so the pivot is real, then a plain Givens rotation
            U = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]], dtype=A.dtype)
            idx = [p, q]
            A[:, idx] = A[:, idx] @ U
            A[idx, :] = U.conj().T @ A[idx, :]
            A[p, q] = A[q, p] = 0.0
            A[p, p] = A[p, p].real
            A[q, q] = A[q, q].real
            V[:, idx] = V[:, idx] @ U
    raise EigenError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")


def _canonical_order(w: np.ndarray, V: np.ndarray, scale: float) -> tuple[np.ndarray, np.ndarray]:
    for k in range(V.shape[1]):
        v = V[:, k]
        first = np.flatnonzero(np.abs(v) > 1e-10)[0]
        V[:, k] = v * (np.conj(v[first]) / abs(v[first]))
    lead = np.argmax(np.abs(V), axis=0)
    order = np.argsort(w, kind="stable")
    w, V, lead = w[order], V[:, order], lead[order]
    # reorder members of each degenerate cluster by leading-component index
    tol = 1e-12 * max(1.0, scale)
    start = 0
    for i in range(1, len(w) + 1):
        if i == len(w) or w[i] - w[i - 1] > tol:
            sub = np.arange(start, i)
            sub = sub[np.argsort(lead[sub], kind="stable")]
            V[:, start:i] = V[:, sub]
            start = i
    if V.dtype.kind == "c" and np.max(np.abs(V.imag), initial=0.0) == 0.0:
        V = V.real.copy()
    return w, V


def eigh(M, max_sweeps: int = 50) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvectors (columns) of a Hermitian matrix."""
    A = as_hermitian(M)
    A = np.array(A, dtype=complex if np.iscomplexobj(A) else float)
    A = 0.5 * (A + A.conj().T)
    w, V = _jacobi(A, max_sweeps)
    return _canonical_order(w, V, float(np.max(np.abs(M))))


def psd_spectrum(w: np.ndarray) -> np.ndarray:
    """Eigenvalues of a PSD matrix with rounding noise removed.

    Negatives and values below ``NOISE_ULPS`` ulps of the largest eigenvalue
    become 0. The square root would otherwise turn a 1e-17 round-off into a
    1e-8 error.
    """
    w = np.asarray(w, dtype=float)
    noise = NOISE_ULPS * np.finfo(float).eps * max(float(np.max(np.abs(w), initial=0.0)), 1e-300)
    return np.where(w > noise, w, 0.0)


def sqrt_psd(rho, eigensystem: tuple[np.ndarray, np.ndarray] | None = None) -> np.ndarray:
    """Principal square root of a positive semidefinite matrix.

    ``rho`` may be an array or any object with an ``entries`` array. A
    precomputed ``(w, V)`` pair (from :func:`eigh`) skips the
    diagonalization; a :class:`~xycoherence.states.DensityMatrix` supplies
    its own.
    """
    if eigensystem is None:
        eigensystem = getattr(rho, "eigensystem", None)
    if eigensystem is None:
        eigensystem = eigh(getattr(rho, "entries", rho))
    w, V = eigensystem
    if w[0] < -PSD_TOL:
        raise ValueError(f"matrix is not positive semidefinite (eigenvalue {w[0]:.3g})")
    root = np.sqrt(psd_spectrum(w))
    return (V * root) @ V.conj().T


def max_eig_sym3(W) -> tuple[float, np.ndarray]:
    """Largest eigenvalue of a real symmetric 3x3 matrix and a unit eigenvector.

    Ties in the top eigenvalue resolve to the eigenvector whose largest
    component has the smallest index, so ``I3`` gives ``e_x``.
    """
    W = np.asarray(W, dtype=float)
    if W.shape != (3, 3):
        raise ValueError(f"expected a 3x3 matrix, got shape {W.shape}")
    w, V = eigh(W)
    tol = 1e-12 * max(1.0, float(np.max(np.abs(W))))
    top = np.flatnonzero(w >= w[-1] - tol)
    k = top[np.argmin(np.argmax(np.abs(V[:, top]), axis=0))]
    return float(w[k]), V[:, k].copy()
