"""Random two-qubit-gate circuits and the Pauli second-moment Markov chain.

A gate is W = CNOT[c, t] U[c] V[t] with an ordered pair c != t drawn
uniformly and U, V Haar on U(2). Qubit indices are 0-based here; the
``label`` of a gate gives the 1-based pair used in printed output.

Pauli strings are indexed in base 4 with qubit 0 as the leading digit and
letters 0, x, y, z -> 0, 1, 2, 3, matching :mod:`entlab.haar`.
"""

from dataclasses import dataclass
from math import ceil, log

import numpy as np

from . import kernels
from .core import PureState, entropy, purity, spectrum_of_matrix
from .errors import CapabilityError, InvalidInputError, UnsupportedInputError
from .haar import pauli_string, sample_haar_unitary
from .rng import as_generator

MAX_STATEVECTOR_QUBITS = 14
MAX_CHAIN_QUBITS = 10


@dataclass(frozen=True)
class RandomGate:
    control: int
    target: int
    u_control: np.ndarray
    u_target: np.ndarray

    def __post_init__(self):
        if self.control == self.target:
            raise InvalidInputError("control and target must differ")

    @property
    def label(self):
        return (self.control + 1, self.target + 1)


def sample_gate(n, rng=None):
    """Uniform ordered pair (c, t), c != t, with independent Haar U(2) factors."""
    if n < 2:
        raise InvalidInputError("need at least two qubits")
    rng = as_generator(rng)
    c = int(rng.integers(n))
    t = int(rng.integers(n - 1))
    if t >= c:
        t += 1
    return RandomGate(c, t, sample_haar_unitary(2, rng), sample_haar_unitary(2, rng))


def apply_gate(psi, gate, n):
    """Apply W = CNOT[c, t] U[c] V[t] to a statevector of n qubits."""
    t = np.asarray(psi, dtype=complex).reshape([2] * n)
    t = np.moveaxis(np.tensordot(gate.u_control, t, axes=([1], [gate.control])), 0, gate.control)
    t = np.moveaxis(np.tensordot(gate.u_target, t, axes=([1], [gate.target])), 0, gate.target)
    idx = [slice(None)] * n
    idx[gate.control] = 1
    sub = t[tuple(idx)]
    tgt = gate.target if gate.target < gate.control else gate.target - 1
    t[tuple(idx)] = np.flip(sub, axis=tgt).copy()
    return t.ravel()


def gate_matrix(gate, n):
    """Dense 2^n x 2^n matrix of a gate; for tests on small n."""
    cols = [apply_gate(e, gate, n) for e in np.eye(2 ** n, dtype=complex)]
    return np.array(cols).T


def _initial_vector(initial, n=None):
    if isinstance(initial, str):
        bits = initial.strip()
        if not bits or set(bits) - {"0", "1"}:
            raise InvalidInputError(f"bad bitstring {initial!r}")
        if len(bits) > MAX_STATEVECTOR_QUBITS:
            raise CapabilityError(f"{len(bits)} qubits exceed the statevector limit")
        vec = np.zeros(2 ** len(bits), dtype=complex)
        vec[int(bits, 2)] = 1.0
        return vec, len(bits)
    vec = initial.amplitudes if isinstance(initial, PureState) else np.asarray(initial, dtype=complex).ravel()
    n = int(round(np.log2(vec.size)))
    if 2 ** n != vec.size:
        raise InvalidInputError("state length is not a power of two")
    if n > MAX_STATEVECTOR_QUBITS:
        raise CapabilityError(f"{n} qubits exceed the statevector limit")
    return vec, n


def qubit_spectrum(psi, n, n_A):
    return spectrum_of_matrix(np.asarray(psi).reshape(2 ** n_A, 2 ** (n - n_A)))


def evolve_trajectory(initial, n_A, ell, rng=None, record_every=1):
    """Apply ``ell`` random gates, recording entanglement of the first n_A qubits.

    ``initial`` is a bitstring such as ``'000000'``, a :class:`PureState`, or a
    statevector. Returns a list of ``(step, entropy_bits, purity)``.
    """
    psi, n = _initial_vector(initial)
    if not 1 <= n_A < n:
        raise InvalidInputError(f"need 1 <= n_A < n, got n_A={n_A}, n={n}")
    if record_every < 1:
        raise InvalidInputError("record_every must be >= 1")
    rng = as_generator(rng)
    out = []
    for step in range(ell + 1):
        if step:
            psi = apply_gate(psi, sample_gate(n, rng), n)
        if step % record_every == 0 or step == ell:
            p = qubit_spectrum(psi, n, n_A)
            out.append((step, entropy(p, 1.0), purity(p)))
    return out


def gate_count_bound(n, eps):
    """Smallest integer ell with ell >= 9 n (n-1) ((3 ln 2) n + ln(1/eps)) / 4."""
    if n < 2:
        raise InvalidInputError("need n >= 2")
    if not 0 < eps < 1:
        raise InvalidInputError("eps must lie in (0, 1)")
    return int(ceil(9 * n * (n - 1) * (3 * log(2) * n + log(1 / eps)) / 4 - 1e-12))


# ---------------------------------------------------------------- Pauli chain

# Conjugation of a Pauli pair (control, target) by CNOT, signs dropped.
CNOT_PAULI_TABLE = {
    (0, 0): (0, 0), (0, 1): (0, 1), (0, 2): (3, 2), (0, 3): (3, 3),
    (1, 0): (1, 1), (1, 1): (1, 0), (1, 2): (2, 3), (1, 3): (2, 2),
    (2, 0): (2, 1), (2, 1): (2, 0), (2, 2): (1, 3), (2, 3): (1, 2),
    (3, 0): (3, 0), (3, 1): (3, 1), (3, 2): (0, 2), (3, 3): (0, 3),
}

# Single-qubit Haar twirl on squared coefficients: identity kept, x/y/z mixed uniformly.
TWIRL = np.zeros((4, 4))
TWIRL[0, 0] = 1.0
TWIRL[1:, 1:] = 1.0 / 3.0


def pair_transfer():
    """m[a, b, x, y]: weight moved from letters (x, y) on (c, t) to (a, b)."""
    cnot = np.zeros((4, 4, 4, 4))
    for (x, y), (a, b) in CNOT_PAULI_TABLE.items():
        cnot[a, b, x, y] = 1.0
    return np.einsum("abuv,ux,vy->abxy", cnot, TWIRL, TWIRL)


PAIR_TRANSFER = np.ascontiguousarray(pair_transfer())


@dataclass(frozen=True)
class PauliWeightDistribution:
    """E[xi^2(s)] over Pauli strings, stored densely (length 4^n)."""

    weights: np.ndarray
    n: int

    def __post_init__(self):
        w = np.ascontiguousarray(self.weights, dtype=float).ravel()
        if w.size != 4 ** self.n:
            raise InvalidInputError("weights must have length 4^n")
        if w.min() < -1e-12 or abs(w.sum() - 1.0) > 1e-10:
            raise InvalidInputError("weights must form a probability distribution")
        object.__setattr__(self, "weights", w)

    def as_dict(self, tol=0.0):
        """Sparse view keyed by Pauli-string labels such as ``'0z'``."""
        nz = np.flatnonzero(self.weights > tol)
        return {pauli_string(int(i), self.n): float(self.weights[i]) for i in nz}


def pauli_initial_distribution(initial):
    """Weights 2^-n on every string in {0, z}^n for a computational basis state."""
    vec, n = _initial_vector(initial)
    mags = np.abs(vec)
    if np.count_nonzero(mags > 1e-12) != 1 or abs(mags.max() - 1.0) > 1e-10:
        raise UnsupportedInputError("chain initialization needs a computational basis state")
    if n > MAX_CHAIN_QUBITS:
        raise CapabilityError(f"{n} qubits exceed the Pauli-chain limit")
    w = np.ones(1)
    for _ in range(n):
        w = np.kron(w, np.array([0.5, 0.0, 0.0, 0.5]))
    return PauliWeightDistribution(w, n)


def pauli_markov_step(dist):
    """Exact expected E[xi^2] after one more random gate."""
    if dist.n > MAX_CHAIN_QUBITS:
        raise CapabilityError(f"{dist.n} qubits exceed the Pauli-chain limit")
    if dist.n < 2:
        raise InvalidInputError("need at least two qubits")
    w = kernels.pauli_step(dist.weights, dist.n, PAIR_TRANSFER)
    return PauliWeightDistribution(w, dist.n)


def stationary_distribution(n):
    """2^-n on the identity string, (1 - 2^-n)/(4^n - 1) on every other."""
    w = np.full(4 ** n, (1.0 - 2.0 ** -n) / (4.0 ** n - 1))
    w[0] = 2.0 ** -n
    return PauliWeightDistribution(w, n)


def expected_purity(dist, n_A):
    """E Tr rho_A^2 = 2^{n_B} x (weight on strings that are identity outside A)."""
    if not 1 <= n_A < dist.n:
        raise InvalidInputError("need 1 <= n_A < n")
    n_B = dist.n - n_A
    inside = dist.weights.reshape(4 ** n_A, 4 ** n_B)[:, 0].sum()
    return float(2.0 ** n_B * inside)


def chain_purity_trajectory(initial, n_A, steps):
    """Expected purity after each step count in ``steps`` (sorted ascending)."""
    dist = pauli_initial_distribution(initial)
    out, done = [], 0
    for s in sorted(steps):
        while done < s:
            dist = pauli_markov_step(dist)
            done += 1
        out.append(expected_purity(dist, n_A))
    return out


def statevector_purity_samples(initial, n_A, steps, n_traj, rng=None):
    """Purity of the first n_A qubits after each step count, for n_traj trajectories.

    Returns an array of shape (n_traj, len(steps)).
    """
    psi0, n = _initial_vector(initial)
    rng = as_generator(rng)
    steps = sorted(steps)
    out = np.empty((n_traj, len(steps)))
    for k in range(n_traj):
        psi, done = psi0, 0
        for j, s in enumerate(steps):
            while done < s:
                psi = apply_gate(psi, sample_gate(n, rng), n)
                done += 1
            out[k, j] = purity(qubit_spectrum(psi, n, n_A))
    return out
