"""Gaussian continuous-variable states.

Quadratures are ordered per mode, (Q_1, P_1, ..., Q_n, P_n), the vacuum has
covariance sigma = I and the symplectic form is J = (+) [[0, 1], [-1, 0]].
A mode's energy is the trace of its 2x2 diagonal block (vacuum: 2).

Random pure states are built from an Euler decomposition
S = S(U) K(s) S(U') with Haar U, U' and single-mode squeezers
K = diag(e^{s/2}, e^{-s/2}), so a squeezed mode has energy 2 cosh s.
"""

from dataclasses import dataclass
from math import lgamma

import numpy as np

from .errors import InvalidInputError
from .haar import sample_haar_unitary
from .rng import as_generator, seed_from
from .spectral import MonteCarloEstimate, RunningStats, chunked_values

NU_CLAMP = 1e-9


def symplectic_form(n):
    return np.kron(np.eye(n), np.array([[0.0, 1.0], [-1.0, 0.0]]))


@dataclass(frozen=True)
class CovarianceMatrix:
    """Real symmetric 2n x 2n covariance; ``pure`` asserts (sigma J)^2 = -I."""

    sigma: np.ndarray
    pure: bool = False

    def __post_init__(self):
        s = np.asarray(self.sigma, dtype=float)
        if s.ndim != 2 or s.shape[0] != s.shape[1] or s.shape[0] % 2:
            raise InvalidInputError(f"covariance must be 2n x 2n, got {s.shape}")
        if not np.allclose(s, s.T, atol=1e-9, rtol=0):
            raise InvalidInputError("covariance is not symmetric")
        J = symplectic_form(s.shape[0] // 2)
        if np.linalg.eigvalsh(s + 1j * J).min() < -1e-9:
            raise InvalidInputError("covariance violates the uncertainty relation")
        if self.pure:
            sj = s @ J
            if not np.allclose(sj @ sj, -np.eye(s.shape[0]), atol=1e-8 * max(1.0, np.abs(s).max() ** 2), rtol=0):
                raise InvalidInputError("covariance flagged pure but (sigma J)^2 != -I")
        object.__setattr__(self, "sigma", s)

    @property
    def n(self):
        return self.sigma.shape[0] // 2

    def mode_energies(self):
        d = np.diag(self.sigma)
        return d[0::2] + d[1::2]

    def reduce(self, modes):
        idx = np.ravel([[2 * m, 2 * m + 1] for m in modes])
        return self.sigma[np.ix_(idx, idx)]


@dataclass(frozen=True)
class SymplecticSpectrum:
    nus: np.ndarray

    def __post_init__(self):
        nus = np.sort(np.asarray(self.nus, dtype=float).ravel())[::-1]
        if nus.size == 0 or nus.min() < 1.0 - NU_CLAMP:
            raise InvalidInputError("symplectic eigenvalues must be >= 1")
        object.__setattr__(self, "nus", np.maximum(nus, 1.0))


def symplectic_eigenvalues(sigma, n_A):
    """Symplectic spectrum of the leading n_A modes (moduli of eig(i J_A sigma_A))."""
    s = sigma.sigma if isinstance(sigma, CovarianceMatrix) else CovarianceMatrix(sigma).sigma
    n = s.shape[0] // 2
    if not 1 <= n_A <= n:
        raise InvalidInputError(f"need 1 <= n_A <= {n}")
    sa = s[: 2 * n_A, : 2 * n_A]
    ev = np.sort(np.abs(np.linalg.eigvals(1j * symplectic_form(n_A) @ sa)))[::-1]
    nus = ev[0::2]
    nus = np.where((nus >= 1.0 - NU_CLAMP) & (nus < 1.0), 1.0, nus)
    return SymplecticSpectrum(nus)


def h(x):
    """Entropy in bits of a mode with symplectic eigenvalue x; h(1) = 0."""
    x = np.asarray(x, dtype=float)
    a, b = (x + 1) / 2, (x - 1) / 2
    with np.errstate(divide="ignore", invalid="ignore"):
        tb = np.where(b > 0, b * np.log2(np.where(b > 0, b, 1.0)), 0.0)
    out = a * np.log2(a) - tb
    return float(out) if out.ndim == 0 else out


def _nus(spec):
    return spec.nus if isinstance(spec, SymplecticSpectrum) else SymplecticSpectrum(spec).nus


def gaussian_entropy(nus):
    return float(np.sum(h(_nus(nus))))


def gaussian_purity(nus):
    return float(1.0 / np.prod(_nus(nus)))


# ---------------------------------------------------------------- Euler factors


@dataclass(frozen=True)
class EulerFactors:
    U: np.ndarray
    U_prime: np.ndarray
    s: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.s, dtype=float).ravel()
        U, Up = np.asarray(self.U, complex), np.asarray(self.U_prime, complex)
        if np.any(s < 0):
            raise InvalidInputError("squeezing parameters must be nonnegative")
        for m in (U, Up):
            if m.shape != (s.size, s.size) or not np.allclose(m.conj().T @ m, np.eye(s.size), atol=1e-10):
                raise InvalidInputError("passive factors must be n x n unitaries")
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "U", U)
        object.__setattr__(self, "U_prime", Up)


def passive_symplectic(U):
    """Real orthogonal symplectic representation of an n x n unitary."""
    U = np.asarray(U, dtype=complex)
    n = U.shape[0]
    S = np.empty((2 * n, 2 * n))
    S[0::2, 0::2] = U.real
    S[0::2, 1::2] = -U.imag
    S[1::2, 0::2] = U.imag
    S[1::2, 1::2] = U.real
    return S


def squeeze_symplectic(s):
    s = np.asarray(s, dtype=float)
    return np.diag(np.ravel(np.column_stack([np.exp(s / 2), np.exp(-s / 2)])))


def euler_symplectic(factors):
    return passive_symplectic(factors.U) @ squeeze_symplectic(factors.s) @ passive_symplectic(factors.U_prime)


def build_covariance(factors):
    """Pure covariance S S^T of the state S |vacuum>."""
    S = euler_symplectic(factors)
    return CovarianceMatrix(S @ S.T, pure=True)


def squeezings_from_energies(E):
    """s_k = arccosh(E_k / 2)."""
    return np.arccosh(np.maximum(np.asarray(E, dtype=float) / 2.0, 1.0))


def random_pure_covariance(energies, rng=None):
    """Pure state with Haar passive factors and squeezer energies ``energies``."""
    rng = as_generator(rng)
    E = energies.E if isinstance(energies, EnergyVector) else np.asarray(energies, float)
    n = E.size
    f = EulerFactors(sample_haar_unitary(n, rng), sample_haar_unitary(n, rng), squeezings_from_energies(E))
    return build_covariance(f)


# ---------------------------------------------------------------- energy ensembles


@dataclass(frozen=True)
class EnergyVector:
    E: np.ndarray

    def __post_init__(self):
        E = np.asarray(self.E, dtype=float).ravel()
        if E.size == 0 or E.min() < 2.0 - 1e-12:
            raise InvalidInputError("mode energies must be >= 2")
        object.__setattr__(self, "E", E)

    @property
    def total(self):
        return float(self.E.sum())

    @property
    def excess(self):
        """E_total - 2n."""
        return float(self.E.sum() - 2 * self.E.size)


def sample_canonical_energies(n, T, rng=None):
    """E_j = 2 + Exponential(mean T), independently."""
    if T <= 0 or n < 1:
        raise InvalidInputError("need n >= 1 and T > 0")
    return EnergyVector(2.0 + as_generator(rng).exponential(T, size=n))


def sample_microcanonical_energies(n, E_total, rng=None):
    """(E_j - 2) flat on {x >= 0, sum x <= E_total - 2n}, via sorted-uniform spacings."""
    e = _excess(n, E_total)
    u = np.sort(as_generator(rng).random(n))
    gaps = np.diff(np.concatenate([[0.0], u]))
    return EnergyVector(2.0 + e * gaps)


def _excess(n, E_total):
    if n < 1:
        raise InvalidInputError("need n >= 1")
    e = E_total - 2 * n
    if e < 0:
        raise InvalidInputError(f"E_total = {E_total} below the vacuum energy {2 * n}")
    return float(e)


def microcanonical_marginal_pdf(x, n, E_excess):
    """Density (n / E)(1 - x/E)^(n-1) of a single E_j - 2 on [0, E]."""
    x = np.asarray(x, dtype=float)
    inside = (x >= 0) & (x <= E_excess)
    out = np.where(inside, n / E_excess * np.clip(1 - x / E_excess, 0, 1) ** (n - 1), 0.0)
    return float(out) if out.ndim == 0 else out


def microcanonical_marginal_cdf(x, n, E_excess):
    x = np.clip(np.asarray(x, dtype=float), 0.0, E_excess)
    out = 1.0 - (1.0 - x / E_excess) ** n
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------- purity moments
# Single-mode subsystem of an n-mode pure state; P^{-2} = det sigma_A.


def canonical_purity_moments(n, T):
    """Exact (E[P^-2], E[P^-4]) under the canonical measure at temperature T."""
    if n < 1 or T <= 0:
        raise InvalidInputError("need n >= 1 and T > 0")
    m2 = 0.25 * (n - 1) / (n + 1) * (T * T + 4 * T) + 1
    c = (n - 1) / (16.0 * (n + 1) * (n + 2) * (n + 3))
    poly = ((n * n + 11 * n + 22) * T ** 4 + 8 * (n * n + 8 * n + 6) * T ** 3
            + 8 * (3 * n * n + 15 * n + 10) * T ** 2 + 32 * (n + 3) * (n + 2) * T)
    return float(m2), float(c * poly + 1)


def microcanonical_purity_moments(n, E_total):
    """Exact (E[P^-2], E[P^-4]) under the flat measure at total energy E_total."""
    E = _excess(n, E_total)
    m2 = (n - 1) / (4.0 * (n + 2) * (n + 1) ** 2) * (E * E + 4 * (n + 2) * E) + 1
    logc = 2 * lgamma(n + 1) - lgamma(n + 5) - lgamma(n + 4)
    c = (n - 1) / 16.0 * np.exp(logc)
    poly = ((n * n + 11 * n + 22) * E ** 4 + 8 * (n + 6) * (n + 4) * (n + 1) * E ** 3
            + 8 * (n + 4) * (n + 3) * (3 * n * n + 15 * n + 10) * E ** 2
            + 32 * (n + 4) * (n + 3) ** 2 * (n + 2) ** 2 * E)
    return float(m2), float(c * poly + 1)


def purity_std(moments):
    """Standard deviation of P^-2 from (E[P^-2], E[P^-4])."""
    m2, m4 = moments
    return float(np.sqrt(max(m4 - m2 * m2, 0.0)))


def maximal_purity(E_total, n):
    """P_M with P_M^-2 = (E + 4)^2 / 16, E = E_total - 2n."""
    return float(4.0 / (_excess(n, E_total) + 4.0))


def headline_distance(n, E_excess=None):
    """(P_M^-2 - E[P_mc^-2]) / std(P^-2) under the flat measure, default E = 10 n."""
    E = 10.0 * n if E_excess is None else E_excess
    moments = microcanonical_purity_moments(n, E + 2 * n)
    pm2 = maximal_purity(E + 2 * n, n) ** -2
    return (pm2 - moments[0]) / purity_std(moments)


def symplectic_spectrum_weight(nus, n_A, n_B):
    """Unnormalized weight prod_{h>k} (nu_h^2 - nu_k^2)^2 prod_j nu_j^2 (nu_j^2 - 1)^(n_B - n_A)."""
    nu = np.asarray(nus, dtype=float).ravel()
    if nu.size != n_A or n_A > n_B or np.any(nu < 1.0 - NU_CLAMP):
        raise InvalidInputError("need n_A values >= 1 and n_A <= n_B")
    sq = nu * nu
    iu = np.triu_indices(n_A, 1)
    rep = np.prod((sq[:, None] - sq[None, :])[iu] ** 2)
    return float(rep * np.prod(sq * np.clip(sq - 1.0, 0.0, None) ** (n_B - n_A)))


# ---------------------------------------------------------------- Monte Carlo


def _det_values(n, ensemble, param, size, rng):
    sampler = sample_canonical_energies if ensemble == "canonical" else sample_microcanonical_energies
    out = np.empty(size)
    for k in range(size):
        cov = random_pure_covariance(sampler(n, param, rng), rng)
        out[k] = np.linalg.det(cov.sigma[:2, :2])
    return out


def inverse_purity_samples(n, ensemble, param, samples, rng=None, threads=1):
    """det sigma_A = P^-2 of mode 1 for ``samples`` random pure states.

    ``ensemble`` is ``'canonical'`` (param = T) or ``'microcanonical'``
    (param = E_total).
    """
    if ensemble not in ("canonical", "microcanonical"):
        raise InvalidInputError(f"unknown ensemble {ensemble!r}")
    seed = rng if isinstance(rng, (int, np.integer)) else seed_from(rng)
    parts = chunked_values(lambda size, r: _det_values(n, ensemble, param, size, r), samples, seed, threads)
    return np.concatenate(parts), int(seed)


def estimate_inverse_purity(n, ensemble, param, samples, rng=None, threads=1, power=1):
    """Monte Carlo E[(det sigma_A)^power] with its standard error."""
    vals, seed = inverse_purity_samples(n, ensemble, param, samples, rng, threads)
    stats = RunningStats(vals ** power)
    return MonteCarloEstimate(stats.mean, stats.std_error, samples, seed)
