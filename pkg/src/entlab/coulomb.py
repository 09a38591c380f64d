"""Log-gas energy of Schmidt spectra and its constrained minimization.

The energy of a spectrum p on the simplex is

    E(p) = -(N_B - N_A) sum_i ln p_i - 2 sum_{i<j} ln |p_i - p_j|

and its minimizers (optionally at fixed entropy, Renyi entropy or purity)
describe the most likely entanglement spectra.

When N_A == N_B the external potential vanishes and nothing keeps the
smallest charge off the wall p = 0; the minimizer then has exactly one
coordinate at 0 (a hard-wall contact). The solver handles this with an
active set: the contact charge is pinned and acts on the others as an extra
external charge 2, and the pin is accepted only if the KKT sign condition
holds. Otherwise an interior solution is found with an annealed log barrier.
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import kernels
from .errors import ConvergenceError, InvalidInputError
from .rng import as_generator
from .spectral import as_dims, ks_distance, marchenko_pastur_cdf, marchenko_pastur_edges

LN2 = np.log(2.0)
COINCIDENT = 1e-14
RESIDUAL_TOL = 1e-6


# ---------------------------------------------------------------- data types


@dataclass(frozen=True)
class ConstraintSpec:
    """Constraint E(p) = value on top of sum p = 1.

    kind is one of ``none``, ``entropy_q1`` (bits), ``renyi_q`` (bits, order
    ``q``) or ``purity``.
    """

    kind: str = "none"
    value: float = None
    q: float = None

    def __post_init__(self):
        if self.kind not in ("none", "entropy_q1", "renyi_q", "purity"):
            raise InvalidInputError(f"unknown constraint kind {self.kind!r}")
        if self.kind != "none" and self.value is None:
            raise InvalidInputError("constraint value required")
        if self.kind == "renyi_q" and (self.q is None or self.q <= 0 or self.q == 1):
            raise InvalidInputError("renyi_q needs q > 0, q != 1")

    @property
    def active(self):
        return self.kind != "none"

    def check_feasible(self, N_A):
        if not self.active:
            return
        if self.kind == "purity":
            lo, hi = 1.0 / N_A, 1.0
        else:
            lo, hi = 0.0, np.log2(N_A)
        if not lo - 1e-12 <= self.value <= hi + 1e-12:
            raise InvalidInputError(
                f"{self.kind} = {self.value} infeasible for N_A = {N_A}: range [{lo}, {hi}]"
            )

    def evaluate(self, p):
        """Constraint function, gradient and Hessian at positive p."""
        if self.kind == "purity":
            return float(p @ p), 2.0 * p, 2.0 * np.eye(p.size)
        if self.kind == "entropy_q1":
            lp = np.log(p)
            return float(-(p * lp).sum() / LN2), -(lp + 1.0) / LN2, np.diag(-1.0 / (p * LN2))
        q = self.q
        m = float(np.sum(p ** q))
        k = 1.0 / ((1.0 - q) * LN2)
        g1 = q * p ** (q - 1)
        grad = k * g1 / m
        hess = k * (np.diag(q * (q - 1) * p ** (q - 2)) / m - np.outer(g1, g1) / m ** 2)
        return float(k * np.log(m)), grad, hess

    def value_of(self, p):
        """Constraint function at a spectrum that may contain zeros."""
        p = np.asarray(p, dtype=float)
        nz = p[p > 0]
        return self.evaluate(nz)[0]


@dataclass(frozen=True)
class GasConfiguration:
    """A spectrum (ascending) with its Lagrange multipliers.

    ``mu`` multiplies sum p, ``multiplier`` the extra constraint. Entries are
    positive except for a single hard-wall contact at 0 when N_A == N_B.
    """

    p: np.ndarray
    mu: float = float("nan")
    multiplier: float = 0.0
    constraint: ConstraintSpec = field(default_factory=ConstraintSpec)
    energy: float = float("nan")
    starts: tuple = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        p = np.sort(np.asarray(self.p, dtype=float).ravel())
        if p.size == 0 or p[0] < 0 or abs(p.sum() - 1.0) > 1e-8:
            raise InvalidInputError("gas configuration must lie on the simplex")
        object.__setattr__(self, "p", p)

    @property
    def descending(self):
        return self.p[::-1]


class Phase(str, Enum):
    MAXIMALLY_ENTANGLED = "maximally_entangled"
    TYPICAL = "typical"
    SEPARABLE_LIKE = "separable_like"


# ---------------------------------------------------------------- energy


def _external_charge(dims):
    d = as_dims(dims)
    return float(d.N_B - d.N_A)


def gas_energy(config, dims):
    """Log-gas energy; +inf on coincident charges or a wall contact with N_B > N_A."""
    p = config.p if isinstance(config, GasConfiguration) else np.sort(np.asarray(config, dtype=float))
    c = _external_charge(dims)
    if p.size > 1 and np.min(np.diff(np.sort(p))) < COINCIDENT:
        return np.inf
    if np.any(p <= 0):
        if c > 0:
            return np.inf
        p_ext = p[p > 0]
    else:
        p_ext = p
    energy, _, _ = kernels.pair_terms(np.ascontiguousarray(p, dtype=float))
    return float(energy - c * np.log(p_ext).sum())


def _half_gradient_terms(p, c):
    """A_i = sum_{j != i} 1/(p_j - p_i) - c / (2 p_i); inf-safe at p_i = 0 with c = 0."""
    d = p[None, :] - p[:, None]
    np.fill_diagonal(d, np.inf)
    a = (1.0 / d).sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        ext = np.where(p > 0, c / (2.0 * np.where(p > 0, p, 1.0)), 0.0)
    return a - ext


def stationarity_residual(config, dims):
    """Max violation of the stationary-phase equations.

    For free coordinates this is |sum_{j!=i} 1/(p_j - p_i) - (N_B-N_A)/(2 p_i)
    + mu/2 + lam/2 dE/dp_i| with mu (and lam, if constrained) fitted by least
    squares. A wall contact (p_i = 0) contributes only a violated KKT sign.
    """
    p = config.p if isinstance(config, GasConfiguration) else np.sort(np.asarray(config, dtype=float))
    constraint = config.constraint if isinstance(config, GasConfiguration) else ConstraintSpec()
    c = _external_charge(dims)
    if p.size == 1:
        return 0.0
    if np.min(np.diff(p)) < COINCIDENT:
        return np.inf
    free = p > 0
    if not free.all() and c > 0:
        return np.inf
    a = _half_gradient_terms(p, c)
    cols = [np.full(p.size, 0.5)]
    g = None
    if constraint.active:
        g = np.full(p.size, np.nan)
        g[free] = constraint.evaluate(p[free])[1]
        if constraint.kind == "purity":
            g[~free] = 0.0
        elif constraint.kind == "entropy_q1":
            g[~free] = np.inf
        else:
            g[~free] = np.inf if constraint.q < 1 else 0.0
        cols.append(0.5 * g)
    design = np.column_stack(cols)
    coef, *_ = np.linalg.lstsq(design[free], -a[free], rcond=None)
    r = a[free] + design[free] @ coef
    worst = float(np.max(np.abs(r)))
    if not free.all():
        with np.errstate(invalid="ignore"):
            r_wall = a[~free] + 0.5 * coef[0]
            if g is not None:
                lam = coef[1]
                gw = g[~free]
                r_wall = r_wall + np.where(np.isinf(gw), np.sign(lam) * np.inf if lam else 0.0, 0.5 * lam * gw)
        worst = max(worst, float(np.max(np.maximum(0.0, -r_wall))))
    return worst


def fitted_multipliers(p, dims, constraint):
    """Least-squares (mu, lam) for a configuration, as used by the residual."""
    c = _external_charge(dims)
    free = p > 0
    a = _half_gradient_terms(p, c)[free]
    cols = [np.full(a.size, 0.5)]
    if constraint.active:
        cols.append(0.5 * constraint.evaluate(p[free])[1])
    coef, *_ = np.linalg.lstsq(np.column_stack(cols), -a, rcond=None)
    return float(coef[0]), float(coef[1]) if constraint.active else 0.0


# ---------------------------------------------------------------- solver


class _Problem:
    """Reduced problem on the free charges.

    Minimizes -c_eff sum ln p - 2 sum_{i<j} ln|p_i - p_j| (+ AL terms) over
    free charges summing to 1; ``c_eff`` folds in the external charge, the
    barrier weight and pinned wall contacts.
    """

    def __init__(self, c_eff, constraint):
        self.c_eff = c_eff
        self.constraint = constraint

    def base(self, p):
        e, g, h = kernels.pair_terms(p)
        if not np.isfinite(e):
            return np.inf, g, h
        lp = np.log(p)
        e = e - self.c_eff * lp.sum()
        g = g - self.c_eff / p
        h = h + np.diag(self.c_eff / (p * p))
        return e, g, h

    def augmented(self, p, lam, rho):
        e, g, h = self.base(p)
        if not np.isfinite(e) or not self.constraint.active:
            return e, g, h, 0.0
        val, cg, ch = self.constraint.evaluate(p)
        r = val - self.constraint.value
        e = e + lam * r + 0.5 * rho * r * r
        g = g + (lam + rho * r) * cg
        h = h + (lam + rho * r) * ch + rho * np.outer(cg, cg)
        return e, g, h, r


def _tangent_basis(n):
    q, _ = np.linalg.qr(np.column_stack([np.ones(n), np.eye(n)[:, : n - 1]]))
    return q[:, 1:]


def _max_step(p, d, frac=0.9):
    """Largest alpha <= 1 keeping p positive and strictly ordered."""
    alpha = 1.0
    neg = d < 0
    if np.any(neg):
        alpha = min(alpha, frac * np.min(-p[neg] / d[neg]))
    gap = np.diff(p)
    dgap = np.diff(d)
    shrink = dgap < 0
    if np.any(shrink):
        alpha = min(alpha, frac * np.min(-gap[shrink] / dgap[shrink]))
    return alpha


def _newton_minimize(prob, p, lam, rho, z, max_iter=200):
    """Saddle-free projected Newton on the tangent space of sum p = const."""
    phi, g, h, r = prob.augmented(p, lam, rho)
    for _ in range(max_iter):
        gz = z.T @ g
        hz = z.T @ h @ z
        w, v = np.linalg.eigh(hz)
        floor = max(np.abs(w).max() * 1e-13, 1e-300)
        w = np.maximum(np.abs(w), floor)
        y = -(v @ ((v.T @ gz) / w))
        d = z @ y
        dec = -float(g @ d)
        if dec < 1e-22 * max(1.0, abs(phi)):
            break
        alpha = _max_step(p, d)
        while alpha > 1e-16:
            trial = p + alpha * d
            phi_t, g_t, h_t, r_t = prob.augmented(trial, lam, rho)
            if np.isfinite(phi_t) and phi_t <= phi - 1e-4 * alpha * dec:
                break
            alpha *= 0.5
        else:
            break
        if phi - phi_t <= 1e-15 * max(1.0, abs(phi)):
            p, phi, g, h, r = trial, phi_t, g_t, h_t, r_t
            break
        p, phi, g, h, r = trial, phi_t, g_t, h_t, r_t
    return p, r


def _augmented_lagrangian(prob, p, z, lam=0.0, rho=10.0, tol=1e-12, outer=60):
    if not prob.constraint.active:
        p, _ = _newton_minimize(prob, p, 0.0, 0.0, z)
        return p, 0.0
    r_prev = np.inf
    for _ in range(outer):
        p, r = _newton_minimize(prob, p, lam, rho, z)
        lam += rho * r
        if abs(r) < tol:
            break
        if abs(r) > 0.25 * abs(r_prev):
            rho = min(rho * 10.0, 1e12)
        r_prev = r
    return p, lam


def _kkt_polish(prob, p, lam, max_iter=60):
    """Plain Newton on the full KKT system (p, mu, lam); accepts only improving steps."""
    n = p.size
    active = prob.constraint.active

    def system(p, mu, lam):
        _, g, h = prob.base(p)
        f = [g + mu]
        jac_top = [h.copy(), np.ones((n, 1))]
        rows = [np.concatenate([np.ones(n), [0.0] * (2 if active else 1)])]
        eqs = [p.sum() - 1.0]
        if active:
            val, cg, ch = prob.constraint.evaluate(p)
            f[0] = f[0] + lam * cg
            jac_top[0] += lam * ch
            jac_top.append(cg[:, None])
            rows.append(np.concatenate([cg, [0.0, 0.0]]))
            eqs.append(val - prob.constraint.value)
        jac = np.vstack([np.hstack(jac_top)] + [r[None, :] for r in rows])
        return np.concatenate([f[0], eqs]), jac

    _, g, _ = prob.base(p)
    if active:
        cg = prob.constraint.evaluate(p)[1]
        coef = np.linalg.lstsq(np.column_stack([np.ones(n), cg]), -g, rcond=None)[0]
        mu, lam = coef
    else:
        mu = -float(np.mean(g))
    f, jac = system(p, mu, lam)
    norm = np.max(np.abs(f))
    for _ in range(max_iter):
        try:
            step = np.linalg.solve(jac, -f)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(jac, -f, rcond=None)[0]
        dp = step[:n]
        alpha = min(1.0, _max_step(p, dp, frac=0.5) if np.any(dp) else 1.0)
        improved = False
        while alpha > 1e-12:
            pt = p + alpha * dp
            mut = mu + alpha * step[n]
            lamt = lam + alpha * step[n + 1] if active else lam
            ft, jt = system(pt, mut, lamt)
            nt = np.max(np.abs(ft))
            if np.isfinite(nt) and nt < norm:
                improved = True
                break
            alpha *= 0.5
        if not improved:
            break
        p, mu, lam, f, jac, norm = pt, mut, lamt, ft, jt, nt
        if norm < 1e-13:
            break
    return p, float(mu), float(lam)


def _wall_sign_ok(p_free, dims, constraint, mu, lam):
    """KKT sign for a pinned wall contact: half-gradient at 0 must be >= 0."""
    r0 = float(np.sum(1.0 / p_free)) + 0.5 * mu
    if constraint.active:
        if constraint.kind == "purity":
            pass
        elif constraint.kind == "entropy_q1" or constraint.q < 1:
            if lam > 0:
                return True
            if lam < 0:
                return False
        # Renyi with q > 1: gradient at 0 is 0
    return r0 >= -1e-9 * max(1.0, abs(r0))


def _solve_one(dims, constraint, p0, rng):
    d = as_dims(dims)
    c = _external_charge(d)
    n = d.N_A
    attempts = []
    if c == 0 and n == 2 and not constraint.active:
        attempts.append(np.array([0.0, 1.0]))
    elif c == 0 and n > 2:
        # pinned wall contact: remaining charges feel an external charge 2
        q0 = np.sort(p0)[1:]
        q0 = q0 / q0.sum()
        prob = _Problem(2.0, constraint)
        z = _tangent_basis(n - 1)
        q, lam = _augmented_lagrangian(prob, q0, z)
        q, mu, lam = _kkt_polish(prob, q, lam)
        if _wall_sign_ok(q, d, constraint, mu, lam):
            attempts.append(np.concatenate([[0.0], q]))
    if not attempts:
        z = _tangent_basis(n)
        p = np.sort(p0)
        lam = 0.0
        schedule = [0.0] if c > 0 else [10.0 ** -k for k in range(0, 11)] + [0.0]
        for t in schedule:
            prob = _Problem(c + t, constraint)
            p, lam = _augmented_lagrangian(prob, p, z, lam=lam)
        p, mu, lam = _kkt_polish(_Problem(c, constraint), p, lam)
        attempts.append(p)
    p = attempts[0]
    mu, lam = fitted_multipliers(p, d, constraint)
    return GasConfiguration(p, mu, lam, constraint, gas_energy(p, d))


def marchenko_pastur_quantiles(dims):
    """N_A spectrum points at the MP quantiles (k - 1/2)/N_A, renormalized."""
    from scipy.optimize import brentq

    d = as_dims(dims)
    a, b = marchenko_pastur_edges(d)
    grid = np.linspace(a, b, 4001)
    cdf = marchenko_pastur_cdf(grid, d)
    levels = (np.arange(d.N_A) + 0.5) / d.N_A
    pts = np.interp(levels, cdf, grid)
    # refine the interpolated quantiles
    pts = np.array([
        brentq(lambda x, L=L: marchenko_pastur_cdf(x, d)[0] - L, max(a, 1e-300), b, xtol=1e-15)
        if 0 < L < 1 else x
        for L, x in zip(levels, pts)
    ])
    return pts / pts.sum()


def _initial_points(dims, constraint, init, starts, rng):
    d = as_dims(dims)
    n = d.N_A
    points = []
    if init is not None:
        points.append(np.asarray(init.p if isinstance(init, GasConfiguration) else init, dtype=float))
    if not constraint.active:
        base = marchenko_pastur_quantiles(d)
        points.append(base)
        while len(points) < starts:
            jit = base * np.exp(0.05 * rng.standard_normal(n))
            points.append(jit / jit.sum())
    while len(points) < starts:
        jit = 1.0 + 0.2 * rng.standard_normal(n)
        jit = np.abs(jit) + 1e-3
        points.append(jit / jit.sum())
    return [np.sort(pt) for pt in points[:max(starts, 1)]]


def _degenerate_solution(dims, constraint):
    d = as_dims(dims)
    n = d.N_A
    if n == 1:
        return GasConfiguration(np.ones(1), 0.0, 0.0, constraint, 0.0)
    if constraint.active:
        top = 1.0 / n if constraint.kind == "purity" else np.log2(n)
        if abs(constraint.value - top) < 1e-12:
            return GasConfiguration(np.full(n, 1.0 / n), float("nan"), float("nan"), constraint, np.inf)
        bottom = 1.0 if constraint.kind == "purity" else 0.0
        if abs(constraint.value - bottom) < 1e-12:
            p = np.zeros(n)
            p[-1] = 1.0
            return GasConfiguration(p, float("nan"), float("nan"), constraint, np.inf)
    return None


def minimize_gas(dims, constraint=None, init=None, rng=None, starts=8):
    """Minimize the log-gas energy on the simplex, optionally under a constraint.

    Runs ``starts`` independent starts (MP quantiles and jittered copies when
    unconstrained, jittered uniform spectra otherwise) and returns the
    lowest-energy configuration whose stationarity residual is below 1e-6.
    The per-start summaries are attached as ``result.starts``.
    """
    d = as_dims(dims)
    constraint = constraint or ConstraintSpec()
    constraint.check_feasible(d.N_A)
    trivial = _degenerate_solution(d, constraint)
    if trivial is not None:
        return trivial
    rng = as_generator(rng)
    log, best, best_any = [], None, None
    for k, p0 in enumerate(_initial_points(d, constraint, init, starts, rng)):
        try:
            cfg = _solve_one(d, constraint, p0, rng)
        except (np.linalg.LinAlgError, FloatingPointError) as exc:
            log.append({"start": k, "error": str(exc)})
            continue
        res = stationarity_residual(cfg, d)
        feas = abs(constraint.value_of(cfg.p) - constraint.value) if constraint.active else 0.0
        ok = res < RESIDUAL_TOL and feas < 1e-8
        log.append({"start": k, "energy": cfg.energy, "residual": res,
                    "constraint_error": feas, "converged": ok})
        if best_any is None or cfg.energy < best_any.energy:
            best_any = cfg
        if ok and (best is None or cfg.energy < best.energy):
            best = cfg
    if best is None:
        raise ConvergenceError("no start reached the stationarity tolerance", best=best_any)
    return GasConfiguration(best.p, best.mu, best.multiplier, constraint, best.energy, tuple(log))


def classify_phase(config, dims, entropy_value=None):
    """Label a minimizer as maximally entangled, typical or separable-like.

    separable_like: the largest coefficient is at least twice the upper MP
    edge fitted to the remaining N_A - 1 coefficients. maximally_entangled:
    support narrower than half the unconstrained MP support. These thresholds
    are diagnostics of this library. ``entropy_value`` is accepted for record
    keeping and does not affect the label.
    """
    d = as_dims(dims)
    p = np.sort(config.p if isinstance(config, GasConfiguration) else np.asarray(config, float))
    a, b = marchenko_pastur_edges(d)
    if p[-1] - p[0] < 0.5 * (b - a):
        return Phase.MAXIMALLY_ENTANGLED
    if d.N_A >= 2:
        rest = 1.0 - p[-1]
        bulk_edge = rest * (1.0 / np.sqrt(d.N_A - 1) + 1.0 / np.sqrt(d.N_B)) ** 2
        if p[-1] >= 2.0 * bulk_edge:
            return Phase.SEPARABLE_LIKE
    return Phase.TYPICAL


def minimizer_mp_distance(config, dims):
    """KS distance between the minimizer's empirical CDF and the MP CDF."""
    d = as_dims(dims)
    return ks_distance(config.p, lambda x: marchenko_pastur_cdf(x, d))
