import math

import numpy as np
import pytest

from xycoherence.correlators import CorrelatorSet, ModelParams, correlator_set
from xycoherence.states import SWAP, DensityMatrix, StateError, partial_trace, single_spin_state, two_spin_state

P = ModelParams(lam=1.0, gamma=1.0)


def cs(m, cxx=0.0, cyy=0.0, czz=0.0):
    return CorrelatorSet(m=m, cxx=cxx, cyy=cyy, czz=czz, params=P)


def test_single_spin_examples():
    assert np.array_equal(single_spin_state(cs(-1.0, czz=1.0)).entries, np.diag([0.0, 1.0]))
    assert np.array_equal(single_spin_state(cs(0.0)).entries, np.eye(2) / 2)
    rho = single_spin_state(cs(-2 / math.pi)).entries
    assert np.allclose(np.diag(rho), [0.18169011, 0.81830989], atol=1e-8)


def test_two_spin_examples():
    rho = two_spin_state(cs(-1.0, czz=1.0)).entries
    expected = np.zeros((4, 4))
    expected[3, 3] = 1.0
    assert np.array_equal(rho, expected)
    assert np.array_equal(two_spin_state(cs(0.0)).entries, np.eye(4) / 4)


def test_ising_critical_state_frozen():
    c = correlator_set(P)
    rho = two_spin_state(c)
    assert np.trace(rho.entries) == pytest.approx(1.0, abs=1e-15)
    assert rho.eigenvalues.min() >= 0
    # Tr rho^2 = (1 + 2 m^2 + cxx^2 + cyy^2 + czz^2)/4 in closed form
    m, cxx, cyy, czz = -2 / math.pi, 2 / math.pi, -2 / (3 * math.pi), 16 / (3 * math.pi**2)
    assert rho.purity() == pytest.approx((1 + 2 * m**2 + cxx**2 + cyy**2 + czz**2) / 4, abs=1e-12)
    # frozen regression number
    assert rho.purity() == pytest.approx(0.6382240006983614, abs=1e-12)


def test_x_structure():
    rho = two_spin_state(cs(-0.3, cxx=0.4, cyy=-0.1, czz=0.2)).entries
    assert np.allclose(np.diag(rho), np.array([1 - 0.6 + 0.2, 0.8, 0.8, 1 + 0.6 + 0.2]) / 4)
    assert rho[0, 3] == rho[3, 0] == pytest.approx(0.5 / 4)
    assert rho[1, 2] == rho[2, 1] == pytest.approx(0.3 / 4)
    mask = np.ones((4, 4), bool)
    mask[np.diag_indices(4)] = False
    mask[[0, 3, 1, 2], [3, 0, 2, 1]] = False
    assert np.all(rho[mask] == 0)


def test_two_spin_matches_pauli_expansion():
    X, Y, Z, I = (np.array(a, dtype=complex) for a in
                  ([[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]], np.eye(2)))
    m, cxx, cyy, czz = -0.3, 0.4, -0.1, 0.2
    expected = (np.kron(I, I) + m * (np.kron(Z, I) + np.kron(I, Z))
                + cxx * np.kron(X, X) + cyy * np.kron(Y, Y) + czz * np.kron(Z, Z)) / 4
    assert np.allclose(two_spin_state(cs(m, cxx, cyy, czz)).entries, expected, atol=1e-15)
    assert np.max(np.abs(expected.imag)) == 0


def test_swap_symmetry():
    rho = two_spin_state(correlator_set(ModelParams(lam=0.8, gamma=0.4))).entries
    assert np.array_equal(SWAP @ rho @ SWAP, rho)


def test_psd_on_ground_state_grid():
    for lam in np.linspace(0.0, 3.0, 61):
        rho = two_spin_state(correlator_set(ModelParams(lam=float(lam), gamma=0.5)))
        assert rho.eigenvalues.min() >= -1e-10


def test_partial_trace():
    c = correlator_set(ModelParams(lam=0.7, gamma=0.3, beta=4.0))
    for keep in (0, 1):
        assert np.max(np.abs(partial_trace(two_spin_state(c), keep) - single_spin_state(c).entries)) <= 1e-12
    with pytest.raises(ValueError):
        partial_trace(np.eye(4) / 4, keep=2)


def test_inconsistent_correlators_rejected():
    with pytest.raises(StateError, match="negative eigenvalue"):
        two_spin_state(cs(0.0, cxx=1.0, cyy=1.0, czz=1.0))


@pytest.mark.parametrize("entries", [
    np.eye(3) / 3,
    np.diag([0.6, 0.6]),
    np.array([[0.5, 0.1], [0.2, 0.5]]),
    np.diag([1.5, -0.5]),
    np.diag([np.inf, 0.0]),
])
def test_density_matrix_rejects(entries):
    with pytest.raises(StateError):
        DensityMatrix(entries)


def test_density_matrix_is_read_only():
    rho = DensityMatrix(np.eye(2) / 2)
    with pytest.raises(ValueError):
        rho.entries[0, 0] = 1.0
