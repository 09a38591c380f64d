"""Closed-form predictions and Monte Carlo estimators for Haar-random pure states.

Entropies are in bits. Natural logarithms appear only where the closed forms
use them (the 1/ln 2 prefactors and the exponent of the concentration bound).
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate
from scipy.special import gammaln

from .core import EntanglementSpectrum, entropy, purity, spectrum_of_matrix
from .errors import InvalidInputError
from .haar import random_state_matrices
from .rng import as_generator, seed_from, substream

LN2 = np.log(2.0)
CHUNK = 512


@dataclass(frozen=True)
class BipartiteDims:
    N_A: int
    N_B: int

    def __post_init__(self):
        if int(self.N_A) < 1 or int(self.N_B) < int(self.N_A):
            raise InvalidInputError(f"need 1 <= N_A <= N_B, got ({self.N_A}, {self.N_B})")
        object.__setattr__(self, "N_A", int(self.N_A))
        object.__setattr__(self, "N_B", int(self.N_B))


def as_dims(dims):
    if isinstance(dims, BipartiteDims):
        return dims
    return BipartiteDims(*dims)


@dataclass(frozen=True)
class MonteCarloEstimate:
    mean: float
    std_error: float
    n_samples: int
    seed: int
    histogram: dict = field(default=None, compare=False)

    def __post_init__(self):
        if self.n_samples < 2 or self.std_error < 0:
            raise InvalidInputError("need n_samples >= 2 and std_error >= 0")

    def within(self, value, k=3.0):
        """True when |mean - value| <= k standard errors."""
        return abs(self.mean - value) <= k * self.std_error


# ---------------------------------------------------------------- closed forms


def log_normalization(dims):
    """ln Z with Z = prod_j Gamma(N_B - j) Gamma(N_A - j + 1) / Gamma(N_A N_B)."""
    d = as_dims(dims)
    j = np.arange(d.N_A)
    return float(np.sum(gammaln(d.N_B - j) + gammaln(d.N_A - j + 1)) - gammaln(d.N_A * d.N_B))


def log_joint_density(p, dims):
    """Log of the joint density of squared Schmidt coefficients on the simplex."""
    d = as_dims(dims)
    p = np.asarray(p.probs if isinstance(p, EntanglementSpectrum) else p, dtype=float).ravel()
    if p.size != d.N_A:
        raise InvalidInputError(f"spectrum length {p.size} != N_A = {d.N_A}")
    if p.min() < -1e-8 or abs(p.sum() - 1.0) > 1e-8:
        raise InvalidInputError("spectrum is off the simplex")
    p = np.clip(p, 0.0, None)
    iu = np.triu_indices(p.size, 1)
    diffs = np.abs(p[:, None] - p[None, :])[iu]
    if np.any(diffs == 0.0):
        return -np.inf
    logv = 2.0 * np.log(diffs).sum()
    ext = d.N_B - d.N_A
    if ext:
        if np.any(p == 0.0):
            return -np.inf
        logv += ext * np.log(p).sum()
    return float(logv - log_normalization(d))


def page_average_entropy(dims):
    """Exact Haar average of the subsystem entropy, in bits."""
    d = as_dims(dims)
    k = np.arange(d.N_B + 1, d.N_A * d.N_B + 1, dtype=float)
    return float((np.sum(1.0 / k) - (d.N_A - 1) / (2.0 * d.N_B)) / LN2)


def page_lower_bound(dims):
    """log2 N_A - N_A / (N_B ln 2)."""
    d = as_dims(dims)
    return float(np.log2(d.N_A) - d.N_A / (d.N_B * LN2))


def average_purity(dims):
    d = as_dims(dims)
    return (d.N_A + d.N_B) / (d.N_A * d.N_B + 1)


def concentration_bound(dims, alpha):
    """Upper bound on Pr{S < log2 N_A - N_A/(N_B ln 2) - alpha}.

    The logarithm inside the exponent's denominator is taken base 2, matching
    the entropy unit.
    """
    d = as_dims(dims)
    if alpha <= 0:
        raise InvalidInputError("alpha must be positive")
    if d.N_A < 2:
        raise InvalidInputError("bound undefined for N_A = 1 (log N_A = 0)")
    expo = -(d.N_A * d.N_B - 1) * alpha ** 2 / (8 * np.pi ** 2 * LN2 * np.log2(d.N_A) ** 2)
    return float(np.clip(np.exp(expo), 0.0, 1.0))


def marchenko_pastur_edges(dims):
    d = as_dims(dims)
    ra, rb = 1.0 / np.sqrt(d.N_A), 1.0 / np.sqrt(d.N_B)
    return (ra - rb) ** 2, (ra + rb) ** 2


def marchenko_pastur_density(p, dims):
    """Large-N density of squared Schmidt coefficients; integrates to N_A."""
    d = as_dims(dims)
    a, b = marchenko_pastur_edges(d)
    p = np.asarray(p, dtype=float)
    inside = (p > a) & (p < b) & (p > 0)
    safe = np.where(inside, p, 1.0)
    val = d.N_A * d.N_B / (2 * np.pi) * np.sqrt(np.clip((safe - a) * (b - safe), 0.0, None)) / safe
    out = np.where(inside, val, 0.0)
    return float(out) if out.ndim == 0 else out


def _mp_theta_integrand(theta, a, b, scale):
    # p = a + (b - a) sin^2(theta) removes the square-root edge singularities
    s2 = np.sin(theta) ** 2
    p = a + (b - a) * s2
    return scale * 2.0 * (b - a) ** 2 * s2 * (1.0 - s2) / p


def marchenko_pastur_cdf(x, dims, epsabs=1e-8):
    """Normalized CDF (divided by N_A) by adaptive quadrature of the density."""
    d = as_dims(dims)
    a, b = marchenko_pastur_edges(d)
    scale = d.N_A * d.N_B / (2 * np.pi) / d.N_A
    x = np.atleast_1d(np.asarray(x, dtype=float))
    order = np.argsort(x)
    out = np.empty_like(x)
    acc, prev = 0.0, 0.0
    for idx in order:
        xi = x[idx]
        if xi <= a:
            out[idx] = 0.0
            continue
        if xi >= b:
            out[idx] = 1.0
            continue
        th = np.arcsin(np.sqrt((xi - a) / (b - a)))
        if th > prev:
            acc += integrate.quad(_mp_theta_integrand, prev, th, args=(a, b, scale), epsabs=epsabs)[0]
            prev = th
        out[idx] = min(acc, 1.0)
    return out


def ks_distance(samples, cdf):
    """Two-sided Kolmogorov-Smirnov statistic of ``samples`` against a CDF callable."""
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    n = x.size
    f = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - f), np.max(f - (i - 1) / n), 0.0))


# ---------------------------------------------------------------- Monte Carlo


class RunningStats:
    """Count, mean and M2 with order-stable pairwise merging."""

    def __init__(self, values=None):
        self.n, self.mean, self.m2 = 0, 0.0, 0.0
        if values is not None:
            v = np.asarray(values, dtype=float)
            self.n = v.size
            if self.n:
                self.mean = float(v.mean())
                self.m2 = float(((v - self.mean) ** 2).sum())

    def merge(self, other):
        if other.n == 0:
            return self
        if self.n == 0:
            self.n, self.mean, self.m2 = other.n, other.mean, other.m2
            return self
        n = self.n + other.n
        delta = other.mean - self.mean
        self.mean += delta * other.n / n
        self.m2 += other.m2 + delta * delta * self.n * other.n / n
        self.n = n
        return self

    @property
    def std_error(self):
        return float(np.sqrt(self.m2 / (self.n - 1) / self.n)) if self.n > 1 else 0.0


def sample_spectra(dims, n_samples, rng):
    """Descending spectra of ``n_samples`` Haar states, shape (n_samples, N_A)."""
    d = as_dims(dims)
    psi = random_state_matrices(d.N_A, d.N_B, rng, size=n_samples)
    return spectrum_of_matrix(psi)


_NAMED = {
    "purity": purity,
    "entropy": lambda p: entropy(p, 1.0),
    "renyi2": lambda p: entropy(p, 2.0),
}


def observable_values(observable, spectra):
    if isinstance(observable, str):
        try:
            fn = _NAMED[observable]
        except KeyError:
            raise InvalidInputError(f"unknown observable {observable!r}") from None
        return np.asarray(fn(spectra), dtype=float)
    return np.array([observable(EntanglementSpectrum.from_weights(p)) for p in spectra], dtype=float)


def chunked_values(make_values, n_samples, seed, threads=1):
    """Evaluate ``make_values(count, rng)`` over fixed-size chunks of sub-streams.

    Chunk ``k`` always uses ``substream(seed, k)``, so the concatenated output
    is independent of ``threads``.
    """
    sizes = [CHUNK] * (n_samples // CHUNK)
    if n_samples % CHUNK:
        sizes.append(n_samples % CHUNK)
    jobs = [(k, s) for k, s in enumerate(sizes)]

    def run(job):
        k, size = job
        return make_values(size, substream(seed, k))

    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, jobs))
    else:
        parts = [run(job) for job in jobs]
    return parts


def estimate(observable, dims, n_samples, rng=None, histogram=False, bins="fd", threads=1):
    """Sample mean and standard error of a spectrum observable over Haar states.

    ``observable`` is ``'purity'``, ``'entropy'``, ``'renyi2'`` or a callable
    taking an :class:`EntanglementSpectrum`.
    """
    if n_samples < 2:
        raise InvalidInputError("n_samples must be >= 2")
    d = as_dims(dims)
    seed = rng if isinstance(rng, (int, np.integer)) else seed_from(rng)
    parts = chunked_values(
        lambda size, r: observable_values(observable, sample_spectra(d, size, r)),
        n_samples, seed, threads,
    )
    stats = RunningStats()
    for part in parts:
        stats.merge(RunningStats(part))
    hist = None
    if histogram:
        values = np.concatenate(parts)
        edges = np.histogram_bin_edges(values, bins=bins)
        counts, edges = np.histogram(values, bins=edges)
        hist = {"edges": edges, "counts": counts, "binning": bins if isinstance(bins, str) else "explicit"}
    return MonteCarloEstimate(stats.mean, stats.std_error, n_samples, int(seed), hist)


def spectrum_vs_mp_distance(dims, n_samples, rng=None):
    """KS distance between pooled sampled spectra and the Marchenko-Pastur CDF."""
    d = as_dims(dims)
    spectra = sample_spectra(d, n_samples, as_generator(rng))
    return ks_distance(spectra.ravel(), lambda x: marchenko_pastur_cdf(x, d))


def concentration_tail(entropies, dims, alphas):
    """Empirical Pr{S < log2 N_A - N_A/(N_B ln 2) - alpha} for each alpha."""
    s = np.asarray(entropies, dtype=float)
    base = page_lower_bound(dims)
    return np.array([np.mean(s < base - a) for a in np.atleast_1d(alphas)])
