"""Haar-random unitaries and the state ensembles they induce.

The default unitary sampler is QR of a Ginibre matrix with the phases of
R's diagonal pushed into Q. The Hurwitz (Euler-angle) construction is kept
as an independent cross-check for small N.
"""

from dataclasses import dataclass

import numpy as np

from .core import DensityMatrix, PureState
from .errors import InvalidInputError
from .rng import as_generator, complex_normal

TWO_PI = 2.0 * np.pi


def is_unitary(u, atol=1e-9):
    u = np.asarray(u)
    return u.ndim == 2 and u.shape[0] == u.shape[1] and np.allclose(
        u.conj().T @ u, np.eye(u.shape[0]), atol=atol, rtol=0
    )


def sample_haar_unitary(N, rng=None):
    """Haar-distributed N x N unitary."""
    if int(N) < 1:
        raise InvalidInputError(f"N must be >= 1, got {N}")
    rng = as_generator(rng)
    z = complex_normal(rng, (N, N))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


# ---------------------------------------------------------------- Hurwitz


@dataclass(frozen=True)
class HurwitzAngles:
    """Angles of the Hurwitz parametrization of U(N).

    ``theta[k-1, l-1]`` and ``phi[k-1, l-1]`` hold the angles of the (k, l)
    plane rotation for 1 <= k < l <= N; entries on or below the diagonal are
    unused. ``chi[l-2]`` holds chi_l for 2 <= l <= N.
    """

    alpha: float
    theta: np.ndarray
    phi: np.ndarray
    chi: np.ndarray

    def __post_init__(self):
        theta = np.asarray(self.theta, dtype=float)
        phi = np.asarray(self.phi, dtype=float)
        chi = np.asarray(self.chi, dtype=float).ravel()
        N = theta.shape[0]
        if theta.shape != (N, N) or phi.shape != (N, N) or chi.size != N - 1:
            raise InvalidInputError("angle arrays do not describe a complete U(N) index set")
        iu = np.triu_indices(N, 1)
        if not 0 <= self.alpha < TWO_PI:
            raise InvalidInputError("alpha must lie in [0, 2pi)")
        if np.any(theta[iu] < 0) or np.any(theta[iu] > np.pi / 2):
            raise InvalidInputError("theta angles must lie in [0, pi/2]")
        if np.any(phi[iu] < 0) or np.any(phi[iu] >= TWO_PI):
            raise InvalidInputError("phi angles must lie in [0, 2pi)")
        if np.any(chi < 0) or np.any(chi >= TWO_PI):
            raise InvalidInputError("chi angles must lie in [0, 2pi)")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "chi", chi)

    @property
    def N(self):
        return self.theta.shape[0]


def sample_hurwitz_angles(N, rng=None):
    """Draw angles whose composed unitary is Haar distributed.

    theta_{kl} has density proportional to cos(t) sin(t)^(2k-1), sampled by
    inverting its CDF sin(t)^(2k); every other angle is uniform.
    """
    if int(N) < 1:
        raise InvalidInputError(f"N must be >= 1, got {N}")
    rng = as_generator(rng)
    theta = np.zeros((N, N))
    phi = np.zeros((N, N))
    for k in range(1, N):
        for l in range(k + 1, N + 1):
            theta[k - 1, l - 1] = np.arcsin(rng.random() ** (1.0 / (2 * k)))
            phi[k - 1, l - 1] = TWO_PI * rng.random()
    chi = TWO_PI * rng.random(N - 1)
    alpha = TWO_PI * rng.random()
    return HurwitzAngles(alpha, theta, phi, chi)


def _plane_rotation(N, i, j, theta, phi, chi):
    """Elementary U(2) rotation in the (i, j) plane, 0-based indices.

    theta is measured from the off-diagonal axis: the diagonal carries
    sin(theta), so theta = pi/2 gives a diagonal phase block. This is the
    orientation under which the cos * sin^(2k-1) angle density is Haar.
    """
    e = np.eye(N, dtype=complex)
    c, s = np.sin(theta), np.cos(theta)
    e[i, i] = c * np.exp(1j * phi)
    e[i, j] = s * np.exp(1j * chi)
    e[j, i] = -s * np.exp(-1j * chi)
    e[j, j] = c * np.exp(-1j * phi)
    return e


def hurwitz_unitary(angles):
    """Compose exp(i alpha) E_1 E_2 ... E_{N-1} from Hurwitz angles.

    E_r = R(r, r+1; chi_{r+1}) R(r-1, r+1; 0) ... R(1, r+1; 0) in 1-based
    plane labels.
    """
    if not isinstance(angles, HurwitzAngles):
        raise InvalidInputError("hurwitz_unitary expects HurwitzAngles")
    N = angles.N
    u = np.eye(N, dtype=complex) * np.exp(1j * angles.alpha)
    for r in range(1, N):
        l = r + 1
        e_r = _plane_rotation(
            N, r - 1, l - 1, angles.theta[r - 1, l - 1], angles.phi[r - 1, l - 1], angles.chi[l - 2]
        )
        for k in range(r - 1, 0, -1):
            e_r = e_r @ _plane_rotation(N, k - 1, l - 1, angles.theta[k - 1, l - 1], angles.phi[k - 1, l - 1], 0.0)
        u = u @ e_r
    return u


# ---------------------------------------------------------------- states


def random_state_matrices(N_A, N_B, rng, size=None):
    """Normalized Ginibre coefficient matrices; a stack when ``size`` is given."""
    shape = (N_A, N_B) if size is None else (size, N_A, N_B)
    psi = complex_normal(rng, shape)
    norm = np.sqrt(np.sum(np.abs(psi) ** 2, axis=(-2, -1), keepdims=True))
    return psi / norm


def sample_random_pure_state(N_A, N_B, rng=None):
    """Uniformly distributed pure state on C^{N_A} (x) C^{N_B}."""
    if int(N_A) < 1 or int(N_B) < 1:
        raise InvalidInputError("dimensions must be >= 1")
    psi = random_state_matrices(int(N_A), int(N_B), as_generator(rng))
    return PureState(psi.ravel(), (N_A, N_B))


def sample_induced_mixed_state(N_S, N_E, rng=None):
    """rho = Tr_E |psi><psi| for |psi> uniform on C^{N_S} (x) C^{N_E}."""
    if int(N_S) < 1 or int(N_E) < 1:
        raise InvalidInputError("dimensions must be >= 1")
    psi = random_state_matrices(int(N_S), int(N_E), as_generator(rng))
    rho = psi @ psi.conj().T
    return DensityMatrix(0.5 * (rho + rho.conj().T))


def _check_probability_vector(spectrum):
    lam = np.asarray(spectrum, dtype=float).ravel()
    if lam.size == 0 or lam.min() < -1e-12 or abs(lam.sum() - 1.0) > 1e-10:
        raise InvalidInputError("spectrum must be a probability vector")
    return np.clip(lam, 0.0, None)


def sample_fixed_purity_state(spectrum, rng=None):
    """U diag(spectrum) U^dag with U Haar on U(len(spectrum))."""
    lam = _check_probability_vector(spectrum)
    u = sample_haar_unitary(lam.size, rng)
    rho = (u * lam) @ u.conj().T
    return DensityMatrix(0.5 * (rho + rho.conj().T))


def spectrum_with_purity(P, N):
    """A probability vector of length N with sum of squares equal to P.

    Mixes the maximally mixed state with a rank-one projector:
    lambda = w e_1 + (1 - w) / N, whose purity is w^2 + (1 - w^2) / N.
    """
    if not 1.0 / N - 1e-12 <= P <= 1.0 + 1e-12:
        raise InvalidInputError(f"purity {P} outside [1/{N}, 1]")
    w = np.sqrt(max(P - 1.0 / N, 0.0) / (1.0 - 1.0 / N)) if N > 1 else 1.0
    lam = np.full(N, (1.0 - w) / N)
    lam[0] += w
    return lam


def reduce_qubits(rho, n_A):
    """Partial trace of an n-qubit density matrix over all but the first n_A qubits."""
    rho = np.asarray(rho)
    N = rho.shape[0]
    N_A = 2 ** n_A
    N_B = N // N_A
    return np.einsum("ijkj->ik", rho.reshape(N_A, N_B, N_A, N_B))


# ---------------------------------------------------------------- Pauli basis

PAULIS = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)
PAULI_LABELS = "0xyz"

# forward per qubit: c_a = sum_ij sigma^a_ji rho_ij ; inverse: rho_ij = sum_a c_a sigma^a_ij / 2
_FWD = PAULIS.transpose(0, 2, 1).reshape(4, 4)
_INV = PAULIS.reshape(4, 4).T / 2.0


def n_qubits(N):
    n = int(round(np.log2(N))) if N > 0 else -1
    if n < 0 or 2 ** n != N:
        raise InvalidInputError(f"dimension {N} is not a power of two")
    return n


def _apply_per_axis(mat, tensor, n):
    for k in range(n):
        tensor = np.moveaxis(np.tensordot(mat, tensor, axes=([1], [k])), 0, k)
    return tensor


def pauli_string(index, n):
    """Label such as '0xz' for a base-4 index (qubit 0 is the leading digit)."""
    digits = []
    for _ in range(n):
        digits.append(PAULI_LABELS[index % 4])
        index //= 4
    return "".join(reversed(digits))


@dataclass(frozen=True)
class PauliCoefficients:
    """Real coefficients of rho in the Pauli-string basis.

    ``orthonormal``: xi_s = 2^{-n/2} Tr(g_s rho), so sum xi^2 = Tr rho^2.
    ``appendix``: xi_s = 2^{-n} Tr(g_s rho), so rho = sum xi_s g_s.
    Index s encodes the string in base 4 with digits 0, x, y, z -> 0..3.
    """

    xi: np.ndarray
    n: int
    normalization: str = "orthonormal"

    def __post_init__(self):
        if self.normalization not in ("orthonormal", "appendix"):
            raise InvalidInputError(f"unknown normalization {self.normalization!r}")
        xi = np.asarray(self.xi, dtype=float).ravel()
        if xi.size != 4 ** self.n:
            raise InvalidInputError("coefficient vector length must be 4^n")
        object.__setattr__(self, "xi", xi)

    def to(self, normalization):
        if normalization == self.normalization:
            return self
        scale = 2.0 ** (self.n / 2)
        xi = self.xi * scale if normalization == "orthonormal" else self.xi / scale
        return PauliCoefficients(xi, self.n, normalization)

    def density_matrix(self):
        """Reconstruct rho."""
        c = self.to("appendix").xi * 2.0 ** self.n
        t = _apply_per_axis(_INV, c.reshape([4] * self.n).astype(complex), self.n)
        n = self.n
        t = t.reshape([2] * (2 * n))
        t = t.transpose(list(range(0, 2 * n, 2)) + list(range(1, 2 * n, 2)))
        return t.reshape(2 ** n, 2 ** n)


def pauli_coefficients(rho, normalization="orthonormal"):
    """Expand an n-qubit operator in tensor products of Pauli matrices."""
    rho = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    n = n_qubits(rho.shape[0])
    t = rho.reshape([2] * (2 * n))
    order = [ax for k in range(n) for ax in (k, n + k)]
    t = t.transpose(order).reshape([4] * n) if n else t
    c = _apply_per_axis(_FWD, t, n).real.ravel()
    return PauliCoefficients(c * 2.0 ** (-n / 2), n).to(normalization)


def average_local_purity_fixed_global(P, n_A, n_B):
    """Exact Haar average of Tr rho_A^2 over U rho U^dag at fixed global purity P."""
    n = n_A + n_B
    if n_A < 0 or n_B < 0:
        raise InvalidInputError("qubit counts must be nonnegative")
    if not 2.0 ** -n - 1e-12 <= P <= 1.0 + 1e-12:
        raise InvalidInputError(f"global purity {P} outside [2^-{n}, 1]")
    if n == 0:
        return 1.0
    return 2.0 ** -n_A + 2.0 ** n_B * (P - 2.0 ** -n) * (4.0 ** n_A - 1) / (4.0 ** n - 1)
