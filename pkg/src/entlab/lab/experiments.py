"""Registry of runnable experiments.

Each experiment declares a parameter schema and a function
``fn(params, n_samples, seed, threads) -> Table``. Functions must be
deterministic in ``(params, n_samples, seed)`` and independent of
``threads``.
"""

from dataclasses import dataclass, field
from itertools import product
from math import comb

import numpy as np
from scipy.special import roots_genlaguerre

from .. import circuits, coulomb, decoupling, gaussian, haar, spectral
from ..errors import ConvergenceError, InvalidInputError
from ..rng import substream

REQUIRED = object()


@dataclass(frozen=True)
class Param:
    kind: str  # int, float, str, ints, floats
    default: object = REQUIRED
    help: str = ""
    choices: tuple = ()

    @property
    def required(self):
        return self.default is REQUIRED

    def parse(self, name, value):
        try:
            if self.kind == "int":
                out = int(value)
            elif self.kind == "float":
                out = float(value)
            elif self.kind == "ints":
                out = [int(v) for v in str(value).split(",") if v.strip()]
            elif self.kind == "floats":
                out = [float(v) for v in str(value).split(",") if v.strip()]
            else:
                out = str(value)
        except ValueError:
            raise InvalidInputError(f"{name}: cannot parse {value!r} as {self.kind}") from None
        if self.choices and out not in self.choices:
            raise InvalidInputError(f"{name}: {out!r} not in {self.choices}")
        if self.kind in ("ints", "floats") and not out:
            raise InvalidInputError(f"{name}: empty list")
        return out


@dataclass
class Table:
    columns: list
    rows: list
    meta: dict = field(default_factory=dict)
    status: str = "ok"


@dataclass(frozen=True)
class Experiment:
    name: str
    fn: object
    params: dict
    description: str

    def resolve(self, raw):
        """Typed parameters with defaults filled in; raises on missing or unknown keys."""
        unknown = sorted(set(raw) - set(self.params))
        if unknown:
            raise InvalidInputError(f"unknown parameter(s): {', '.join(unknown)}")
        out = {}
        for name, spec in self.params.items():
            if name in raw:
                out[name] = spec.parse(name, raw[name])
            elif spec.required:
                raise InvalidInputError(f"{name}: missing")
            else:
                out[name] = spec.default
        return out


REGISTRY = {}


def experiment(name, description, **params):
    def wrap(fn):
        REGISTRY[name] = Experiment(name, fn, params, description)
        return fn
    return wrap


def _pairs(p):
    N_A = p["N_A"]
    N_B = p["N_B"] or N_A
    if len(N_B) != len(N_A):
        raise InvalidInputError("N_A and N_B lists must have equal length")
    return list(zip(N_A, N_B))


# ---------------------------------------------------------------- experiments


@experiment("haar-moments", "Moments E|U_11|^(2k) of Haar unitaries against 1/C(N+k-1, k)",
            N=Param("int", help="matrix size"), k_max=Param("int", 3, "highest moment"))
def haar_moments(p, n_samples, seed, threads):
    N, K = p["N"], p["k_max"]

    def values(size, rng):
        x = np.array([abs(haar.sample_haar_unitary(N, rng)[0, 0]) ** 2 for _ in range(size)])
        return x[:, None] ** np.arange(1, K + 1)

    parts = spectral.chunked_values(values, n_samples, seed, threads)
    rows = []
    for k in range(1, K + 1):
        st = spectral.RunningStats()
        for part in parts:
            st.merge(spectral.RunningStats(part[:, k - 1]))
        rows.append((k, st.mean, st.std_error, 1.0 / comb(N + k - 1, k)))
    return Table(["k", "mc_mean", "mc_stderr", "closed_form"], rows)


def _sweep(observable, reference, p, n_samples, seed, threads, extra=None):
    rows = []
    for i, dims in enumerate(_pairs(p)):
        est = spectral.estimate(observable, dims, n_samples, substream(seed, i).integers(2 ** 63), threads=threads)
        row = [dims[0], dims[1], est.mean, est.std_error, reference(dims)]
        if extra:
            row.append(extra(dims))
        rows.append(tuple(row))
    return rows


@experiment("page-sweep", "Mean entanglement entropy (bits) against the Page average",
            N_A=Param("ints"), N_B=Param("ints", None, "defaults to N_A"))
def page_sweep(p, n_samples, seed, threads):
    rows = _sweep("entropy", spectral.page_average_entropy, p, n_samples, seed, threads,
                  extra=spectral.page_lower_bound)
    return Table(["N_A", "N_B", "mc_mean", "mc_stderr", "page_formula", "lower_bound"], rows)


@experiment("purity-sweep", "Mean purity against (N_A + N_B)/(N_A N_B + 1)",
            N_A=Param("ints"), N_B=Param("ints", None, "defaults to N_A"))
def purity_sweep(p, n_samples, seed, threads):
    rows = _sweep("purity", spectral.average_purity, p, n_samples, seed, threads)
    return Table(["N_A", "N_B", "mc_mean", "mc_stderr", "closed_form"], rows)


@experiment("mp-spectrum", "Pooled Schmidt spectrum histogram against the Marchenko-Pastur density",
            N_A=Param("int"), N_B=Param("int"), bins=Param("int", 40))
def mp_spectrum(p, n_samples, seed, threads):
    d = spectral.BipartiteDims(p["N_A"], p["N_B"])
    parts = spectral.chunked_values(lambda size, r: spectral.sample_spectra(d, size, r).ravel(),
                                    n_samples, seed, threads)
    pooled = np.concatenate(parts)
    a, b = spectral.marchenko_pastur_edges(d)
    edges = np.linspace(0.0 if a < 1e-12 else a, max(b, pooled.max()), p["bins"] + 1)
    counts, _ = np.histogram(pooled, bins=edges)
    cdf = spectral.marchenko_pastur_cdf(edges, d)
    widths = np.diff(edges)
    emp = d.N_A * counts / (pooled.size * widths)
    ref = d.N_A * np.diff(cdf) / widths
    rows = [(edges[i], edges[i + 1], emp[i], ref[i]) for i in range(p["bins"])]
    ks = spectral.ks_distance(pooled, lambda x: spectral.marchenko_pastur_cdf(x, d))
    return Table(["bin_left", "bin_right", "empirical_density", "mp_density"], rows, {"ks_distance": ks})


@experiment("concentration", "Empirical lower tail of the entropy against the concentration bound",
            N_A=Param("int"), N_B=Param("int"),
            alphas=Param("floats", [round(0.1 * k, 1) for k in range(1, 11)]))
def concentration(p, n_samples, seed, threads):
    d = spectral.BipartiteDims(p["N_A"], p["N_B"])
    parts = spectral.chunked_values(lambda size, r: spectral.observable_values("entropy", spectral.sample_spectra(d, size, r)),
                                    n_samples, seed, threads)
    s = np.concatenate(parts)
    tail = spectral.concentration_tail(s, d, p["alphas"])
    rows = [(a, t, spectral.concentration_bound(d, a)) for a, t in zip(p["alphas"], tail)]
    return Table(["alpha", "empirical_tail", "bound"], rows,
                 {"bound_exceeded": bool(any(r[1] > r[2] for r in rows))})


@experiment("circuit-trajectory", "Entropy and purity along random two-qubit-gate circuits",
            n=Param("int"), n_A=Param("int"), ell=Param("int", help="number of gates"),
            record_every=Param("int", 1), initial=Param("str", "", "bitstring, default all zeros"))
def circuit_trajectory(p, n_samples, seed, threads):
    initial = p["initial"] or "0" * p["n"]
    if len(initial) != p["n"]:
        raise InvalidInputError("initial bitstring length must equal n")
    rows = []
    for k in range(n_samples):
        sub = int(substream(seed, k).integers(2 ** 63))
        for step, s, pur in circuits.evolve_trajectory(initial, p["n_A"], p["ell"], sub, p["record_every"]):
            rows.append((step, s, pur, sub))
    steps = sorted({r[0] for r in rows})
    ref = circuits.chain_purity_trajectory(initial, p["n_A"], steps) if p["n"] <= circuits.MAX_CHAIN_QUBITS else None
    meta = {"seed_column": "per-trajectory seed; evolve_trajectory(initial, n_A, ell, seed) replays the row group",
            "chain_expected_purity": dict(zip(steps, ref)) if ref else None}
    return Table(["step", "entropy_bits", "purity", "seed"], rows, meta)


@experiment("markov-purity", "Pauli-chain expected purity against statevector Monte Carlo",
            n=Param("int"), n_A=Param("int"), steps=Param("ints"), initial=Param("str", ""))
def markov_purity(p, n_samples, seed, threads):
    initial = p["initial"] or "0" * p["n"]
    steps = sorted(p["steps"])
    chain = circuits.chain_purity_trajectory(initial, p["n_A"], steps)
    parts = spectral.chunked_values(
        lambda size, r: circuits.statevector_purity_samples(initial, p["n_A"], steps, size, r),
        n_samples, seed, threads)
    rows = []
    for j, s in enumerate(steps):
        st = spectral.RunningStats()
        for part in parts:
            st.merge(spectral.RunningStats(part[:, j]))
        rows.append((s, chain[j], st.mean, st.std_error))
    stat = circuits.expected_purity(circuits.stationary_distribution(p["n"]), p["n_A"])
    return Table(["step", "chain_purity", "mc_mean", "mc_stderr"], rows,
                 {"stationary_purity": stat,
                  "haar_purity": spectral.average_purity((2 ** p["n_A"], 2 ** (p["n"] - p["n_A"])))
                  if p["n_A"] <= p["n"] - p["n_A"] else None})


@experiment("coulomb-min", "Log-gas minimizer, optionally at fixed entropy, Renyi entropy or purity",
            N_A=Param("int"), N_B=Param("int"),
            constraint=Param("str", "none", choices=("none", "entropy_q1", "renyi_q", "purity")),
            value=Param("float", None), q=Param("float", None), starts=Param("int", 8))
def coulomb_min(p, n_samples, seed, threads):
    d = spectral.BipartiteDims(p["N_A"], p["N_B"])
    spec = coulomb.ConstraintSpec(p["constraint"], p["value"], p["q"])
    status = "ok"
    try:
        cfg = coulomb.minimize_gas(d, spec, rng=seed, starts=p["starts"])
    except ConvergenceError as exc:
        if exc.best is None:
            raise
        cfg, status = exc.best, "nonconverged"
    quant = coulomb.marchenko_pastur_quantiles(d)
    if d.N_A == d.N_B:
        lag = np.concatenate([[0.0], roots_genlaguerre(d.N_A - 1, 1)[0]]) if d.N_A > 1 else np.ones(1)
    else:
        lag = roots_genlaguerre(d.N_A, d.N_B - d.N_A - 1)[0]
    lag = np.sort(lag) / lag.sum()
    rows = [(k, cfg.p[k], quant[k]) for k in range(d.N_A)]
    meta = {
        "energy": cfg.energy,
        "stationarity_residual": coulomb.stationarity_residual(cfg, d),
        "mu": cfg.mu, "multiplier": cfg.multiplier,
        "phase": coulomb.classify_phase(cfg, d).value,
        "ks_to_mp": coulomb.minimizer_mp_distance(cfg, d),
        "max_abs_dev_from_laguerre_zeros": float(np.max(np.abs(cfg.p - lag))) if not spec.active else None,
        "starts": list(cfg.starts),
    }
    return Table(["k", "p", "mp_quantile"], rows, meta, status)


@experiment("decoupling-sweep", "Trace distance of rho_AC from (I/N_A) x rho_C against the dimension margin",
            N_A=Param("int", 2), N_C=Param("int", 2), N_B=Param("ints", [1, 2, 4, 8, 16, 32]),
            initial=Param("str", "product", choices=decoupling.INITIAL_STATES))
def decoupling_sweep(p, n_samples, seed, threads):
    rows = decoupling.decoupling_sweep(p["N_A"], p["N_C"], p["N_B"], n_samples, seed, p["initial"], threads)
    return Table(["N_B", "margin", "mc_mean", "mc_stderr"], rows,
                 {"distance": decoupling.DISTANCE, "initial_state": p["initial"]})


@experiment("page-curve", "Mean entropy of the first n_A qubits of a Haar state, n_A = 0..n",
            n=Param("int"))
def page_curve(p, n_samples, seed, threads):
    n = p["n"]
    rows = []
    for n_A, m, se in decoupling.page_curve(n, seed, n_samples, threads):
        small, big = sorted((2 ** n_A, 2 ** (n - n_A)))
        rows.append((n_A, m, se, spectral.page_average_entropy((small, big))))
    return Table(["n_A", "mean_entropy_bits", "std_error", "page_formula"], rows)


@experiment("cv-moments", "Single-mode inverse purity moments of random Gaussian pure states",
            ensemble=Param("str", "canonical", choices=("canonical", "microcanonical")),
            n=Param("ints"), T_or_E=Param("floats", help="temperature T, or excess energy E_total - 2n"),
            moment=Param("int", 2, "2 for P^-2, 4 for P^-4", (2, 4)))
def cv_moments(p, n_samples, seed, threads):
    rows = []
    for i, (n, x) in enumerate(product(p["n"], p["T_or_E"])):
        if p["ensemble"] == "canonical":
            param, ref = x, gaussian.canonical_purity_moments(n, x)
        else:
            param, ref = x + 2 * n, gaussian.microcanonical_purity_moments(n, x + 2 * n)
        sub = int(substream(seed, i).integers(2 ** 63))
        est = gaussian.estimate_inverse_purity(n, p["ensemble"], param, n_samples, sub, threads,
                                               power=p["moment"] // 2)
        rows.append((n, x, ref[p["moment"] // 2 - 1], est.mean, est.std_error))
    return Table(["n", "T_or_E", "formula_value", "mc_mean", "mc_stderr"], rows)


@experiment("cv-microcanonical", "Marginal energy distribution of the flat measure, plus maximal-purity distance",
            n=Param("int"), E_excess=Param("float"), bins=Param("int", 40))
def cv_microcanonical(p, n_samples, seed, threads):
    n, E = p["n"], p["E_excess"]
    parts = spectral.chunked_values(
        lambda size, r: np.array([gaussian.sample_microcanonical_energies(n, E + 2 * n, r).E[0] - 2 for _ in range(size)]),
        n_samples, seed, threads)
    x = np.concatenate(parts)
    edges = np.linspace(0.0, E, p["bins"] + 1)
    counts, _ = np.histogram(x, bins=edges)
    widths = np.diff(edges)
    ref = np.diff(gaussian.microcanonical_marginal_cdf(edges, n, E)) / widths
    rows = [(edges[i], edges[i + 1], counts[i] / (x.size * widths[i]), ref[i]) for i in range(p["bins"])]
    meta = {"ks_distance": spectral.ks_distance(x, lambda v: gaussian.microcanonical_marginal_cdf(v, n, E)),
            "distance_in_std": gaussian.headline_distance(n, E)}
    return Table(["bin_left", "bin_right", "empirical_density", "formula_density"], rows, meta)


@experiment("fixed-purity", "Average local purity of unitarily random states at fixed global purity",
            n=Param("int"), n_A=Param("int"), P=Param("floats"))
def fixed_purity(p, n_samples, seed, threads):
    n, n_A = p["n"], p["n_A"]
    rows = []
    for i, P in enumerate(p["P"]):
        lam = haar.spectrum_with_purity(P, 2 ** n)

        def values(size, rng, lam=lam):
            out = np.empty(size)
            for k in range(size):
                rho = haar.reduce_qubits(haar.sample_fixed_purity_state(lam, rng).entries, n_A)
                out[k] = np.einsum("ij,ji->", rho, rho).real
            return out

        parts = spectral.chunked_values(values, n_samples, int(substream(seed, i).integers(2 ** 63)), threads)
        st = spectral.RunningStats()
        for part in parts:
            st.merge(spectral.RunningStats(part))
        rows.append((P, st.mean, st.std_error, haar.average_local_purity_fixed_global(P, n_A, n - n_A)))
    return Table(["P", "mc_mean", "mc_stderr", "formula_value"], rows)


def describe(name):
    exp = REGISTRY[name]
    lines = [f"{name}: {exp.description}"]
    for pname, spec in exp.params.items():
        default = "required" if spec.required else f"default {spec.default!r}"
        extra = f" one of {spec.choices}" if spec.choices else ""
        hint = f"  {spec.help}" if spec.help else ""
        lines.append(f"    {pname} ({spec.kind}, {default}){extra}{hint}")
    return "\n".join(lines)

