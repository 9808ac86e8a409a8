import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import random_direction, random_state, random_x_state
from xycoherence.correlators import CorrelatorSet, ModelParams, correlator_set
from xycoherence.hermitian import PAULI, LocalObservable
from xycoherence.measures import (
    Kind,
    MeasureError,
    MeasureKind,
    Target,
    _clamp,
    evaluate,
    local_coherence,
    lqu,
    skew_information,
    skew_information_lower,
    variance,
)
from xycoherence.states import partial_trace, single_spin_state, two_spin_state

X, Z = PAULI["x"], PAULI["z"]


def _lab_sqrt(rho):
    # independent square root for the commutator form
    w, V = np.linalg.eigh(rho)
    return (V * np.sqrt(np.clip(w, 0, None))) @ V.conj().T


def _commutator_skew(rho, K):
    C = _lab_sqrt(rho) @ K - K @ _lab_sqrt(rho)
    return float(-0.5 * np.trace(C @ C).real)


def _commutator_lower(rho, K):
    C = rho @ K - K @ rho
    return float(-0.25 * np.trace(C @ C).real)


def single(m):
    return single_spin_state(CorrelatorSet(m=m, cxx=0, cyy=0, czz=m * m, params=ModelParams(lam=1, gamma=1)))


# single-qubit examples --------------------------------------------------------

def test_skew_single_spin_examples():
    assert skew_information(single(-0.6), X) == pytest.approx(0.2, abs=1e-14)
    assert skew_information_lower(single(-0.6), X) == pytest.approx(0.18, abs=1e-14)
    assert variance(single(-0.6), X) == pytest.approx(1.0, abs=1e-14)
    assert skew_information(single(-0.6), Z) == 0.0
    assert skew_information_lower(single(-0.6), Z) == 0.0


@given(m=st.one_of(st.floats(-1 + 1e-12, 1 - 1e-12), st.sampled_from([-1.0, 0.0, 1.0])))
def test_skew_single_spin_closed_form(m):
    rho = single(m)
    assert skew_information(rho, X) == pytest.approx(1 - math.sqrt(1 - m * m), abs=1e-12)
    assert skew_information_lower(rho, X) == pytest.approx(m * m / 2, abs=1e-12)


def test_populations_below_noise_floor_count_as_zero():
    # 1e-17 is below the eigen-solver's resolution; its square root would add 3e-9
    rho = np.diag([1 - 1e-17, 1e-17])
    assert skew_information(rho, X) == 1.0


def test_variance_examples():
    assert variance(np.diag([1.0, 0.0]), Z) == 0.0
    assert variance(np.eye(2) / 2, Z) == 1.0


def test_dimension_mismatch():
    with pytest.raises(ValueError, match="does not match"):
        skew_information(np.eye(4) / 4, X)
    with pytest.raises(ValueError):
        local_coherence(np.eye(2) / 2, LocalObservable.axis("x"))
    with pytest.raises(ValueError):
        lqu(np.eye(2) / 2)


# random-state properties ------------------------------------------------------

def test_agrees_with_commutator_form(rng):
    for k in range(1000):
        dim = 2 if k % 2 else 4
        rho = random_state(rng, dim)
        K = LocalObservable(tuple(random_direction(rng))).matrix
        if dim == 4:
            K = np.kron(K, np.eye(2))
        assert skew_information(rho, K) == pytest.approx(_commutator_skew(rho, K), abs=1e-10)
        assert skew_information_lower(rho, K) == pytest.approx(_commutator_lower(rho, K), abs=1e-12)


def test_zero_iff_commuting(rng):
    for k in range(300):
        dim = 2 if k % 2 else 4
        if k % 3 == 0:
            # commuting pair: diagonal state and a Z observable
            rho = np.diag(rng.dirichlet(np.ones(dim)))
            K = Z if dim == 2 else np.kron(Z, np.eye(2))
        else:
            rho = random_state(rng, dim)
            K = LocalObservable(tuple(random_direction(rng))).matrix
            K = K if dim == 2 else np.kron(K, np.eye(2))
        commutes = np.max(np.abs(rho @ K - K @ rho)) < 1e-8
        assert (skew_information(rho, K) < 1e-10) == commutes


def test_pure_state_lower_bound_is_half(rng):
    for k in range(200):
        dim = 2 if k % 2 else 4
        rho = random_state(rng, dim, rank=1)
        K = LocalObservable(tuple(random_direction(rng))).matrix
        K = K if dim == 2 else np.kron(K, np.eye(2))
        assert skew_information_lower(rho, K) == pytest.approx(0.5 * skew_information(rho, K), abs=1e-10)


# local coherence -------------------------------------------------------------

def test_local_coherence_product_ground_state():
    rho = np.zeros((4, 4))
    rho[3, 3] = 1
    assert local_coherence(rho, LocalObservable.axis("x")) == pytest.approx(1.0, abs=1e-14)
    assert local_coherence(rho, LocalObservable.axis("z")) == 0.0


def test_lqc_derivative_jumps_at_factorization_point():
    lam_f = 1 / math.sqrt(1 - 0.25)
    kind = MeasureKind.parse("lqc-x", "pair")

    def f(lam):
        return evaluate(kind, correlator_set(ModelParams(lam=lam, gamma=0.5)))[0]

    h = 1e-4
    left = (f(lam_f - h) - f(lam_f - 3 * h)) / (2 * h)
    right = (f(lam_f + 3 * h) - f(lam_f + h)) / (2 * h)
    assert abs(f(lam_f + h) - f(lam_f - h)) < 1e-3
    assert abs(right - left) > 0.1


# LQU -------------------------------------------------------------------------

def pure(amps):
    v = np.asarray(amps, dtype=complex)
    v = v / np.linalg.norm(v)
    return np.outer(v, v.conj())


def test_lqu_examples():
    assert lqu(pure([1, 0, 0, 1])).value == pytest.approx(1.0, abs=1e-12)
    assert lqu(pure([0, 0, 0, 1])).value == pytest.approx(0.0, abs=1e-12)
    assert lqu(pure([math.cos(math.pi / 6), 0, 0, math.sin(math.pi / 6)])).value == pytest.approx(0.75, abs=1e-12)


def test_lqu_result_invariants(rng):
    for _ in range(200):
        res = lqu(random_state(rng, 4))
        W = res.w_matrix
        assert np.array_equal(W, W.T)
        assert res.value == pytest.approx(1 - np.linalg.eigvalsh(W)[-1], abs=1e-12)
        assert 0 <= res.value <= 1 + 1e-10
        assert np.linalg.norm(res.optimal_direction) == pytest.approx(1.0, abs=1e-12)


def test_lqu_is_a_minimum(rng):
    for _ in range(100):
        rho = random_state(rng, 4)
        res = lqu(rho)
        best = local_coherence(rho, LocalObservable(tuple(res.optimal_direction)))
        assert best == pytest.approx(res.value, abs=1e-10)
        for _ in range(10):
            K = LocalObservable(tuple(random_direction(rng)))
            assert res.value <= local_coherence(rho, K) + 1e-10


def test_lqu_pure_states_linear_entropy(rng):
    for _ in range(200):
        rho = random_state(rng, 4, rank=1)
        rho_a = partial_trace(rho, 0)
        assert lqu(rho).value == pytest.approx(2 * (1 - np.trace(rho_a @ rho_a).real), abs=1e-8)


def test_lqu_x_states_in_closed_form(rng):
    # on X states W is diagonal, so the optimum is one of the three axes
    for _ in range(100):
        rho = random_x_state(rng)
        axes = [local_coherence(rho, LocalObservable.axis(a)) for a in "xyz"]
        assert lqu(rho).value == pytest.approx(min(axes), abs=1e-10)


# clamping --------------------------------------------------------------------

def test_clamp():
    assert _clamp(-5e-11, "x") == 0.0
    assert _clamp(-5e-9, "x") == 0.0
    with pytest.raises(MeasureError):
        _clamp(-1e-7, "x")


# MeasureKind -----------------------------------------------------------------

@pytest.mark.parametrize("name,kind,axis", [
    ("lqu", Kind.LQU, None),
    ("lqc-x", Kind.LQC_FULL, "x"),
    ("LQC-Y", Kind.LQC_FULL, "y"),
    ("lqc-z-lower", Kind.LQC_LOWER, "z"),
])
def test_parse(name, kind, axis):
    k = MeasureKind.parse(name)
    assert k.kind is kind and k.axis_label == axis and k.target is Target.TWO_SPIN


@pytest.mark.parametrize("name", ["lq", "lqc", "lqc-w", "lqc-x-upper", "lqu-x"])
def test_parse_rejects(name):
    with pytest.raises(ValueError):
        MeasureKind.parse(name)


def test_kind_constraints():
    with pytest.raises(ValueError, match="two-spin"):
        MeasureKind(Kind.LQU, Target.SINGLE_SPIN)
    with pytest.raises(ValueError):
        MeasureKind(Kind.LQU, axis="x")
    with pytest.raises(ValueError):
        MeasureKind(Kind.LQC_FULL)
    k = MeasureKind(Kind.LQC_FULL, Target.TWO_SPIN, LocalObservable((0.6, 0.8, 0.0)))
    assert k.label == "lqc-n(0.6,0.8,0)/pair"


@settings(max_examples=40, deadline=None)
@given(lam=st.floats(0.0, 3.0), gamma=st.floats(0.1, 1.0))
def test_evaluate_matches_direct_calls(lam, gamma):
    c = correlator_set(ModelParams(lam=lam, gamma=gamma))
    rho_a, rho_ab = single_spin_state(c), two_spin_state(c)
    v, d = evaluate(MeasureKind.parse("lqc-x", "single"), c)
    assert v == skew_information(rho_a, X) and d is None
    v, _ = evaluate(MeasureKind.parse("lqc-z-lower", "pair"), c)
    assert v == local_coherence(rho_ab, LocalObservable.axis("z"), lower=True)
    v, d = evaluate(MeasureKind.parse("lqu"), c)
    assert v == lqu(rho_ab).value and d.shape == (3,)
