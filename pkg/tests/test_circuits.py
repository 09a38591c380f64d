import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from entlab.circuits import (
    CNOT_PAULI_TABLE,
    PAIR_TRANSFER,
    RandomGate,
    apply_gate,
    chain_purity_trajectory,
    evolve_trajectory,
    expected_purity,
    gate_count_bound,
    gate_matrix,
    pauli_initial_distribution,
    pauli_markov_step,
    sample_gate,
    stationary_distribution,
    statevector_purity_samples,
)
from entlab.errors import CapabilityError, InvalidInputError, UnsupportedInputError
from entlab.haar import PAULIS, is_unitary


def test_gate_count_bound():
    assert gate_count_bound(4, 0.1) == 287
    with pytest.raises(InvalidInputError):
        gate_count_bound(1, 0.1)
    with pytest.raises(InvalidInputError):
        gate_count_bound(4, 1.5)


def test_cnot_table_matches_conjugation():
    cnot = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
    for (x, y), (a, b) in CNOT_PAULI_TABLE.items():
        conj = cnot @ np.kron(PAULIS[x], PAULIS[y]) @ cnot
        target = np.kron(PAULIS[a], PAULIS[b])
        assert np.allclose(conj, target) or np.allclose(conj, -target)


def test_pair_transfer_stochastic():
    assert np.allclose(PAIR_TRANSFER.sum(axis=(0, 1)), 1.0)
    assert PAIR_TRANSFER[0, 0, 0, 0] == 1.0


@given(st.integers(2, 5), st.integers(0, 2 ** 32 - 1))
@settings(max_examples=20, deadline=None)
def test_gate_is_unitary(n, seed):
    g = sample_gate(n, seed)
    assert g.control != g.target
    assert is_unitary(gate_matrix(g, n))


def test_gate_control_target_semantics():
    ident = np.eye(2, dtype=complex)
    g = RandomGate(0, 1, ident, ident)
    psi = np.zeros(4, complex)
    psi[0b10] = 1  # control (qubit 0) set
    assert np.argmax(np.abs(apply_gate(psi, g, 2))) == 0b11
    assert g.label == (1, 2)
    with pytest.raises(InvalidInputError):
        RandomGate(1, 1, ident, ident)


def test_trajectory_shape_and_start():
    traj = evolve_trajectory("0000", 2, 20, rng=1, record_every=5)
    assert [t[0] for t in traj] == [0, 5, 10, 15, 20]
    assert traj[0][1] == 0.0 and traj[0][2] == 1.0
    with pytest.raises(InvalidInputError):
        evolve_trajectory("0000", 4, 3)
    with pytest.raises(InvalidInputError):
        evolve_trajectory("0a00", 1, 3)
    with pytest.raises(CapabilityError):
        evolve_trajectory("0" * 15, 1, 1)


def test_chain_initial_and_limits():
    d = pauli_initial_distribution("010")
    assert sum(d.as_dict().values()) == pytest.approx(1.0)
    assert set(d.as_dict()) == {a + b + c for a in "0z" for b in "0z" for c in "0z"}
    with pytest.raises(UnsupportedInputError):
        pauli_initial_distribution(np.ones(4) / 2)
    with pytest.raises(CapabilityError):
        pauli_initial_distribution("0" * 11)


@pytest.mark.parametrize("n", [2, 3, 4, 6])
def test_chain_conserves_weight(n):
    d = pauli_initial_distribution("0" * n)
    for _ in range(5):
        d = pauli_markov_step(d)
        assert d.weights.sum() == pytest.approx(1.0, abs=1e-12)
        assert d.weights[0] == pytest.approx(2.0 ** -n, abs=1e-15)


@pytest.mark.parametrize("n", [2, 3, 4, 6])
def test_stationary_is_fixed_point(n):
    s = stationary_distribution(n)
    assert np.allclose(pauli_markov_step(s).weights, s.weights, atol=1e-16)


def test_stationary_purity_matches_haar():
    assert expected_purity(stationary_distribution(6), 3) == pytest.approx(16 / 65, abs=1e-12)


@pytest.mark.parametrize("n", range(3, 9))
def test_chain_purity_decreases(n):
    d = pauli_initial_distribution("0" * n)
    traj = []
    for _ in range(40):
        traj.append([expected_purity(d, n_A) for n_A in range(1, n)])
        d = pauli_markov_step(d)
    assert np.all(np.diff(np.array(traj), axis=0) <= 1e-15)


def test_chain_two_qubits_approaches_monotonically():
    # n = 2 overshoots the stationary value once, but the gap still shrinks
    tr = np.array(chain_purity_trajectory("00", 1, range(30)))
    gap = np.abs(tr - 0.8)
    assert tr[1] < 0.8
    assert np.all(np.diff(gap) <= 1e-15)


def test_chain_matches_statevector_small():
    steps = [1, 3]
    chain = chain_purity_trajectory("000", 1, steps)
    mc = statevector_purity_samples("000", 1, steps, 2000, rng=4)
    se = mc.std(0) / np.sqrt(mc.shape[0])
    assert np.all(np.abs(mc.mean(0) - chain) < 4 * se)
