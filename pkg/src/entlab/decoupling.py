"""Decoupling of A from C after Haar scrambling of AB, and the Page curve.

The distance used throughout is the trace distance
1/2 || rho_AC - (I/N_A) (x) rho_C ||_1.
"""

from dataclasses import dataclass

import numpy as np

from .core import TOL, entropy, spectrum_of_matrix, trace_distance
from .errors import CapabilityError, InvalidInputError
from .haar import sample_haar_unitary
from .rng import as_generator, complex_normal, seed_from
from .spectral import RunningStats, chunked_values

MAX_DIM = 2 ** 14
DISTANCE = "trace_distance"
INITIAL_STATES = ("product", "entangled")


@dataclass(frozen=True)
class TripartiteState:
    """Normalized vector on C^{N_A} (x) C^{N_B} (x) C^{N_C}, row-major."""

    amplitudes: np.ndarray
    dims: tuple

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).ravel()
        dims = tuple(int(d) for d in self.dims)
        if len(dims) != 3 or min(dims) < 1:
            raise InvalidInputError(f"dims must be three positive integers, got {self.dims}")
        if amps.size != int(np.prod(dims)):
            raise InvalidInputError("amplitude count does not match dims")
        if abs(np.vdot(amps, amps).real - 1.0) > TOL:
            raise InvalidInputError("state not normalized")
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "dims", dims)

    @property
    def tensor(self):
        return self.amplitudes.reshape(self.dims)


def product_state(N_A, N_B, N_C):
    """|0>|0>|0>."""
    amps = np.zeros(N_A * N_B * N_C, dtype=complex)
    amps[0] = 1.0
    return TripartiteState(amps, (N_A, N_B, N_C))


def entangled_state(N_A, N_B, N_C):
    """|0>_A with a maximally entangled pair between a subspace of B and C."""
    if N_B < N_C:
        raise InvalidInputError("need N_B >= N_C to embed the entangled pair")
    t = np.zeros((N_A, N_B, N_C), dtype=complex)
    for k in range(N_C):
        t[0, k, k] = 1.0 / np.sqrt(N_C)
    return TripartiteState(t.ravel(), (N_A, N_B, N_C))


def initial_state(kind, N_A, N_B, N_C):
    if kind == "product":
        return product_state(N_A, N_B, N_C)
    if kind == "entangled":
        return entangled_state(N_A, N_B, N_C)
    raise InvalidInputError(f"unknown initial state {kind!r}; use one of {INITIAL_STATES}")


def reduced_ac(tensor):
    """rho_AC as an (N_A N_C) x (N_A N_C) matrix, tracing out the middle factor."""
    N_A, _, N_C = tensor.shape
    rho = np.einsum("abc,xby->acxy", tensor, tensor.conj())
    return rho.reshape(N_A * N_C, N_A * N_C)


def _check_size(dims):
    if int(np.prod(dims)) > MAX_DIM:
        raise CapabilityError(f"total dimension {int(np.prod(dims))} exceeds {MAX_DIM}")


def decoupling_deviation(state, rng=None):
    """Trace distance of rho_AC from (I/N_A) (x) rho_C after a Haar unitary on AB."""
    _check_size(state.dims)
    N_A, N_B, N_C = state.dims
    u = sample_haar_unitary(N_A * N_B, as_generator(rng))
    t = (u @ state.amplitudes.reshape(N_A * N_B, N_C)).reshape(N_A, N_B, N_C)
    rho_ac = reduced_ac(t)
    rho_c = np.einsum("acad->cd", rho_ac.reshape(N_A, N_C, N_A, N_C))
    target = np.kron(np.eye(N_A) / N_A, rho_c)
    return min(trace_distance(rho_ac, target), 1.0)


def decoupling_margin(N_A, N_B, N_C, purity_AC):
    """2 log2 N_B - (log2 N_A + log2 N_C - log2 purity_AC); positive means decoupling is expected."""
    return float(2 * np.log2(N_B) - (np.log2(N_A) + np.log2(N_C) - np.log2(purity_AC)))


def initial_purity_ac(state):
    rho = reduced_ac(state.tensor)
    return float(np.einsum("ij,ji->", rho, rho).real)


def decoupling_sweep(N_A, N_C, N_B_values, samples, rng=None, initial="product", threads=1):
    """Mean deviation for each N_B; rows are (N_B, margin, mean, std_error)."""
    seed = rng if isinstance(rng, (int, np.integer)) else seed_from(rng)
    rows = []
    for i, N_B in enumerate(N_B_values):
        state = initial_state(initial, N_A, N_B, N_C)
        _check_size(state.dims)
        margin = decoupling_margin(N_A, N_B, N_C, initial_purity_ac(state))
        parts = chunked_values(
            lambda size, r: np.array([decoupling_deviation(state, r) for _ in range(size)]),
            samples, (int(seed) + i) & (2 ** 64 - 1), threads,
        )
        stats = RunningStats()
        for part in parts:
            stats.merge(RunningStats(part))
        rows.append((N_B, margin, stats.mean, stats.std_error))
    return rows


def _curve_values(n, size, rng):
    psi = complex_normal(rng, (size, 2 ** n))
    psi /= np.linalg.norm(psi, axis=1, keepdims=True)
    out = np.zeros((size, n + 1))
    for n_A in range(1, n):
        p = spectrum_of_matrix(psi.reshape(size, 2 ** n_A, 2 ** (n - n_A)))
        out[:, n_A] = entropy(p, 1.0)
    return out


def page_curve(n, rng=None, samples=1000, threads=1):
    """Mean entropy (bits) of the first n_A qubits of a Haar state, n_A = 0..n.

    Returns rows ``(n_A, mean_entropy_bits, std_error)``.
    """
    if not 1 <= n <= 14:
        raise CapabilityError("page_curve supports 1 <= n <= 14")
    if samples < 2:
        raise InvalidInputError("need at least two samples")
    seed = rng if isinstance(rng, (int, np.integer)) else seed_from(rng)
    parts = chunked_values(lambda size, r: _curve_values(n, size, r), samples, seed, threads)
    rows = []
    for n_A in range(n + 1):
        stats = RunningStats()
        for part in parts:
            stats.merge(RunningStats(part[:, n_A]))
        rows.append((n_A, stats.mean, stats.std_error))
    return rows
