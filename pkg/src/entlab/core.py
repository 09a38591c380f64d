"""Finite-dimensional states, bipartite reductions and entanglement quantifiers.

Entropies are in bits throughout. Spectrum entries below ``CLAMP`` are set to
zero before any logarithm is taken.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

TOL = 1e-10
CLAMP = 1e-12


@dataclass(frozen=True)
class PureState:
    """Normalized amplitude vector on C^{N_A} (x) C^{N_B}.

    Amplitudes are stored row-major, so ``amplitudes.reshape(N_A, N_B)`` is
    the coefficient matrix Psi_ij.
    """

    amplitudes: np.ndarray
    dims: tuple

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).ravel()
        dims = tuple(int(d) for d in self.dims)
        if len(dims) != 2 or min(dims) < 1:
            raise InvalidInputError(f"dims must be two positive integers, got {self.dims}")
        if amps.size != dims[0] * dims[1]:
            raise InvalidInputError(
                f"{amps.size} amplitudes do not match dims {dims[0]}x{dims[1]}"
            )
        norm = np.vdot(amps, amps).real
        if abs(norm - 1.0) > TOL:
            raise InvalidInputError(f"state not normalized: |psi|^2 = {norm!r}")
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "dims", dims)

    @classmethod
    def from_vector(cls, vec, dims, normalize=False):
        vec = np.asarray(vec, dtype=complex).ravel()
        if normalize:
            vec = vec / np.linalg.norm(vec)
        return cls(vec, dims)

    @property
    def matrix(self):
        return self.amplitudes.reshape(self.dims)


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, positive semidefinite, unit-trace matrix."""

    entries: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.entries, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise InvalidInputError(f"density matrix must be square, got shape {rho.shape}")
        if not np.allclose(rho, rho.conj().T, atol=TOL, rtol=0):
            raise InvalidInputError("density matrix is not Hermitian")
        if abs(np.trace(rho).real - 1.0) > TOL:
            raise InvalidInputError(f"trace {np.trace(rho).real!r} != 1")
        if np.linalg.eigvalsh(rho).min() < -TOL:
            raise InvalidInputError("density matrix has a negative eigenvalue")
        object.__setattr__(self, "entries", rho)

    @property
    def N(self):
        return self.entries.shape[0]

    def eigenvalues(self):
        """Eigenvalues in descending order."""
        return np.linalg.eigvalsh(self.entries)[::-1]

    def purity(self):
        return float(np.einsum("ij,ji->", self.entries, self.entries).real)


@dataclass(frozen=True)
class EntanglementSpectrum:
    """Squared Schmidt coefficients, descending, summing to one."""

    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float).ravel()
        if p.size == 0:
            raise InvalidInputError("empty spectrum")
        if p.min() < -TOL or p.max() > 1 + TOL:
            raise InvalidInputError("spectrum entries must lie in [0, 1]")
        if abs(p.sum() - 1.0) > TOL:
            raise InvalidInputError(f"spectrum sums to {p.sum()!r}, not 1")
        if np.any(np.diff(p) > TOL):
            raise InvalidInputError("spectrum must be in descending order")
        object.__setattr__(self, "probs", p)

    def __len__(self):
        return self.probs.size

    @classmethod
    def from_weights(cls, weights):
        """Clamp, sort descending and renormalize arbitrary nonnegative weights."""
        w = np.asarray(weights, dtype=float).ravel()
        w = np.where(w < CLAMP, 0.0, w)
        w = np.sort(w)[::-1]
        return cls(w / w.sum())


def spectrum_of_matrix(psi):
    """Descending squared singular values of a coefficient matrix, renormalized.

    Works on a single matrix or a stack of matrices (last two axes).
    """
    s = np.linalg.svd(psi, compute_uv=False)
    p = s * s
    return p / p.sum(axis=-1, keepdims=True)


def schmidt_spectrum(state):
    """Entanglement spectrum of a bipartite pure state via SVD of Psi_ij."""
    if not isinstance(state, PureState):
        raise InvalidInputError("schmidt_spectrum expects a PureState")
    return EntanglementSpectrum.from_weights(spectrum_of_matrix(state.matrix))


def partial_trace(state, keep="A"):
    """Reduced density matrix rho_A = Psi Psi^dag or rho_B = Psi^T Psi^*."""
    if keep not in ("A", "B"):
        raise InvalidInputError(f"keep must be 'A' or 'B', got {keep!r}")
    psi = state.matrix
    if keep == "A":
        rho = psi @ psi.conj().T
    else:
        rho = psi.T @ psi.conj()
    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix(rho)


def _probs(spectrum):
    p = spectrum.probs if isinstance(spectrum, EntanglementSpectrum) else np.asarray(spectrum, float)
    return np.where(p < CLAMP, 0.0, p)


def entropy(spectrum, q=1.0):
    """Renyi-q entropy in bits; q = 1 is the von Neumann entropy.

    Accepts an :class:`EntanglementSpectrum` or a raw array whose last axis is
    a probability vector (batched evaluation).
    """
    if q < 0:
        raise InvalidInputError(f"Renyi order must be >= 0, got {q}")
    p = _probs(spectrum)
    if q == 1:
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(p > 0, p * np.log2(np.where(p > 0, p, 1.0)), 0.0)
        out = -terms.sum(axis=-1)
    elif q == 0:
        out = np.log2(np.count_nonzero(p, axis=-1))
    else:
        with np.errstate(divide="ignore"):
            pq = np.where(p > 0, np.power(np.where(p > 0, p, 1.0), q), 0.0)
        out = np.log2(pq.sum(axis=-1)) / (1.0 - q)
    out = out + 0.0  # normalizes -0.0
    return float(out) if np.ndim(out) == 0 else out


def purity(spectrum):
    """Sum of squared spectrum entries, Tr rho_A^2."""
    p = _probs(spectrum)
    out = (p * p).sum(axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def trace_distance(rho, sigma):
    """Half the trace norm of rho - sigma, from eigenvalues of the Hermitian difference."""
    diff = np.asarray(rho) - np.asarray(sigma)
    diff = 0.5 * (diff + diff.conj().T)
    return float(0.5 * np.abs(np.linalg.eigvalsh(diff)).sum())
