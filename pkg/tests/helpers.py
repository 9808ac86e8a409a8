"""Random inputs and cached sweeps shared by the test modules."""

from functools import lru_cache

import numpy as np

from xycoherence.correlators import INFINITE
from xycoherence.measures import MeasureKind
from xycoherence.sweep import SweepGrid, detect_features, sweep


def random_state(rng, dim, complex_=True, rank=None):
    """Normalized A A^dagger; ``rank=1`` gives a pure state."""
    k = dim if rank is None else rank
    A = rng.normal(size=(dim, k))
    if complex_:
        A = A + 1j * rng.normal(size=(dim, k))
    rho = A @ A.conj().T
    return rho / np.trace(rho).real


def random_hermitian(rng, dim):
    A = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return 0.5 * (A + A.conj().T)


def random_direction(rng):
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def random_x_state(rng):
    """Random two-qubit X state, PSD by construction (two 2x2 PSD blocks)."""
    a = random_state(rng, 2, complex_=False)
    b = random_state(rng, 2, complex_=False)
    t = rng.uniform()
    rho = np.zeros((4, 4))
    rho[np.ix_([0, 3], [0, 3])] = t * a
    rho[np.ix_([1, 2], [1, 2])] = (1 - t) * b
    return rho


@lru_cache(maxsize=None)
def features(measure, target, gamma, lo, hi, step, beta=INFINITE):
    """(coarse series, FeatureReport) for a T = 0 sweep, cached across tests."""
    kind = MeasureKind.parse(measure, target)
    grid = SweepGrid(lo, hi, step)
    coarse = sweep(kind, grid, gamma, beta, workers=4)
    fine = sweep(kind, grid.refined(), gamma, beta, workers=4)
    return coarse, detect_features(coarse, fine)
