"""Acceptance checks, one test per criterion.

Each test prints a single ``PASS``/``FAIL`` line (also collected into the
pytest terminal summary) and then asserts at the stated tolerance. Run
standalone with ``python tests/test_acceptance.py``.
"""

import time

import numpy as np
from scipy import integrate

from entlab import circuits, coulomb, decoupling, gaussian, haar, spectral
from entlab.lab.experiments import REGISTRY
from entlab.lab.runner import run

RESULTS = []


def report(number, title, ok, detail, elapsed, budget=None):
    within = budget is None or elapsed < budget
    ok = bool(ok and within)
    limit = f" (limit {budget:.0f} s)" if budget else ""
    line = f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {title}: {detail}; {elapsed:.1f} s{limit}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def test_01_page_formula():
    t0 = time.perf_counter()
    parts, ok = [], True
    for n, quoted in [(2, 0.4808), (4, 1.3307)]:
        ref = spectral.page_average_entropy((n, n))
        est = spectral.estimate("entropy", (n, n), 10_000, rng=101 + n)
        ok &= est.within(ref, 3) and abs(ref - quoted) < 1e-4
        parts.append(f"{n}x{n} mc {est.mean:.4f}+-{est.std_error:.4f} vs {ref:.4f}")
    report(1, "Page average entropy", ok, ", ".join(parts), time.perf_counter() - t0, 60)


def test_02_average_purity():
    t0 = time.perf_counter()
    parts, ok = [], True
    for dims, exact in [((2, 2), 4 / 5), ((2, 4), 2 / 3), ((8, 8), 16 / 65)]:
        est = spectral.estimate("purity", dims, 10_000, rng=200 + dims[1])
        ok &= est.within(exact, 3) and abs(spectral.average_purity(dims) - exact) < 1e-15
        parts.append(f"{dims} {est.mean:.4f}+-{est.std_error:.4f} vs {exact:.4f}")
    report(2, "Average purity", ok, ", ".join(parts), time.perf_counter() - t0, 60)


def test_03_marchenko_pastur():
    t0 = time.perf_counter()
    d = spectral.BipartiteDims(64, 64)
    ks = spectral.spectrum_vs_mp_distance(d, 100, rng=303)
    a, b = spectral.marchenko_pastur_edges(d)
    m0 = integrate.quad(lambda p: spectral.marchenko_pastur_density(p, d), a, b, epsabs=1e-13, limit=200)[0]
    m1 = integrate.quad(lambda p: p * spectral.marchenko_pastur_density(p, d), a, b, epsabs=1e-13, limit=200)[0]
    ok = ks < 0.05 and abs(m0 - 64) < 1e-6 and abs(m1 - 1) < 1e-6
    detail = f"KS {ks:.4f} (<0.05), int w - N_A = {m0 - 64:.1e}, int p w - 1 = {m1 - 1:.1e}"
    report(3, "Marchenko-Pastur spectrum", ok, detail, time.perf_counter() - t0, 120)


def test_04_concentration():
    t0 = time.perf_counter()
    d = spectral.BipartiteDims(8, 8)
    s = spectral.observable_values("entropy", spectral.sample_spectra(d, 10_000, np.random.default_rng(404)))
    alphas = np.round(np.arange(1, 11) * 0.1, 1)
    tail = spectral.concentration_tail(s, d, alphas)
    bound = np.array([spectral.concentration_bound(d, a) for a in alphas])
    worst = float(np.max(tail - bound))
    report(4, "Concentration bound", bool(np.all(tail <= bound)),
           f"max(tail - bound) over alpha 0.1..1.0 = {worst:.3f}", time.perf_counter() - t0)


def test_05_random_circuits():
    t0 = time.perf_counter()
    steps = [1, 2, 5, 10]
    ok_a, worst = True, 0.0
    for n in (2, 3, 4):
        n_A = n // 2
        chain = np.array(circuits.chain_purity_trajectory("0" * n, n_A, steps))
        mc = circuits.statevector_purity_samples("0" * n, n_A, steps, 3000, rng=500 + n)
        se = mc.std(0, ddof=1) / np.sqrt(mc.shape[0])
        z = np.abs(mc.mean(0) - chain) / se
        worst = max(worst, float(z.max()))
        ok_a &= bool(np.all(z <= 3))
    stat = circuits.expected_purity(circuits.stationary_distribution(6), 3)
    fixed = circuits.pauli_markov_step(circuits.stationary_distribution(6))
    ok_b = abs(stat - 16 / 65) < 1e-10 and abs(circuits.expected_purity(fixed, 3) - 16 / 65) < 1e-10
    bound = circuits.gate_count_bound(4, 0.1)
    detail = (f"(a) chain vs statevector max |z| = {worst:.2f}; (b) stationary purity - 16/65 = "
              f"{stat - 16 / 65:.1e}; (c) gate_count_bound(4, 0.1) = {bound}")
    report(5, "Random circuits", ok_a and ok_b and bound == 287, detail, time.perf_counter() - t0, 300)


def test_06_coulomb_gas():
    t0 = time.perf_counter()
    d = (200, 200)
    free = coulomb.minimize_gas(d, rng=600)
    res = coulomb.stationarity_residual(free, d)
    ks = coulomb.minimizer_mp_distance(free, d)
    low_dims = (64, 64)
    low = coulomb.minimize_gas(low_dims, coulomb.ConstraintSpec("entropy_q1", 0.2 * np.log2(64)), rng=601)
    phase = coulomb.classify_phase(low, low_dims)
    p = low.descending
    ok = res < 1e-6 and ks < 0.05 and phase == coulomb.Phase.SEPARABLE_LIKE
    detail = (f"200x200 residual {res:.1e} (<1e-6), KS {ks:.4f} (<0.05); 64x64 at S=1.2 bits: "
              f"p_1 = {p[0]:.3f}, p_2 = {p[1]:.4f}, phase {phase.value}")
    report(6, "Coulomb gas minimizer", ok, detail, time.perf_counter() - t0, 600)


def test_07_cv_moments():
    t0 = time.perf_counter()
    can = gaussian.estimate_inverse_purity(4, "canonical", 2.0, 10_000, rng=700)
    can_ref = gaussian.canonical_purity_moments(4, 2.0)[0]
    mic = gaussian.estimate_inverse_purity(4, "microcanonical", 8.0 + 8, 10_000, rng=701)
    mic_ref = gaussian.microcanonical_purity_moments(4, 8.0 + 8)[0]
    rng = np.random.default_rng(702)
    x = np.array([gaussian.sample_microcanonical_energies(5, 20.0, rng).E[0] - 2 for _ in range(100_000)])
    ks = spectral.ks_distance(x, lambda v: gaussian.microcanonical_marginal_cdf(v, 5, 10.0))
    ok = can.within(can_ref, 3) and mic.within(mic_ref, 3) and ks < 0.02
    detail = (f"canonical {can.mean:.4f}+-{can.std_error:.4f} vs {can_ref:.4f}; micro-canonical "
              f"{mic.mean:.4f}+-{mic.std_error:.4f} vs {mic_ref:.4f}; marginal KS {ks:.4f} (<0.02)")
    report(7, "CV purity moments", ok, detail, time.perf_counter() - t0, 120)


def test_08_headline_distances():
    t0 = time.perf_counter()
    d5, d20 = gaussian.headline_distance(5), gaussian.headline_distance(20)
    ok = abs(d5 - 16.5) <= 0.5 and abs(d20 - 257.1) <= 1.0
    report(8, "Maximal purity distance", ok, f"n=5: {d5:.3f} (16.5+-0.5), n=20: {d20:.3f} (257.1+-1.0)",
           time.perf_counter() - t0, 1)


def test_09_fixed_purity():
    t0 = time.perf_counter()
    n, n_A, parts, ok = 4, 2, [], True
    rng = np.random.default_rng(900)
    for P in (0.25, 0.5, 1.0):
        lam = haar.spectrum_with_purity(P, 2 ** n)
        vals = np.empty(10_000)
        for k in range(vals.size):
            rho = haar.reduce_qubits(haar.sample_fixed_purity_state(lam, rng).entries, n_A)
            vals[k] = np.einsum("ij,ji->", rho, rho).real
        ref = haar.average_local_purity_fixed_global(P, n_A, n - n_A)
        se = vals.std(ddof=1) / np.sqrt(vals.size)
        ok &= abs(vals.mean() - ref) <= 3 * se
        parts.append(f"P={P}: {vals.mean():.4f}+-{se:.4f} vs {ref:.4f}")
    ident = abs(haar.average_local_purity_fixed_global(1.0, 2, 2) - spectral.average_purity((4, 4)))
    ok &= ident < 1e-12
    parts.append(f"P=1 identity gap {ident:.1e}")
    report(9, "Fixed global purity", ok, ", ".join(parts), time.perf_counter() - t0, 120)


def test_10_decoupling_and_page_curve():
    t0 = time.perf_counter()
    rows = decoupling.decoupling_sweep(2, 2, [1, 2, 4, 8, 16, 32], 400, rng=1000)
    margins = [r[1] for r in rows]
    means = [r[2] for r in rows]
    strictly = all(a > b for a, b in zip(means, means[1:]))
    curve = decoupling.page_curve(10, rng=1001, samples=2000)
    m = np.array([r[1] for r in curve])
    se = np.array([r[2] for r in curve])
    sym = bool(np.all(np.abs(m - m[::-1]) <= 3 * np.hypot(se, se[::-1])))
    peak = int(np.argmax(m))
    page = spectral.page_average_entropy((32, 32))
    ok = strictly and margins[0] == -2 and margins[-1] == 8 and sym and peak == 5 and abs(m[5] - page) <= 3 * se[5]
    detail = (f"deviation {' > '.join(f'{x:.3f}' for x in means)} over margins {margins[0]:g}..{margins[-1]:g}; "
              f"curve symmetric {sym}, peak n_A={peak}, S(5) {m[5]:.4f}+-{se[5]:.4f} vs {page:.4f}")
    report(10, "Decoupling and Page curve", ok, detail, time.perf_counter() - t0, 300)


SMALL_CONFIGS = {
    "haar-moments": "N = 3\n",
    "page-sweep": "N_A = 2,3\n",
    "purity-sweep": "N_A = 2\nN_B = 5\n",
    "mp-spectrum": "N_A = 8\nN_B = 16\nbins = 10\n",
    "concentration": "N_A = 4\nN_B = 4\n",
    "circuit-trajectory": "n = 4\nn_A = 2\nell = 8\nrecord_every = 2\n",
    "markov-purity": "n = 3\nn_A = 1\nsteps = 1,4\n",
    "coulomb-min": "N_A = 6\nN_B = 6\nconstraint = purity\nvalue = 0.4\nstarts = 2\n",
    "decoupling-sweep": "N_B = 1,2,4\n",
    "page-curve": "n = 5\n",
    "cv-moments": "ensemble = microcanonical\nn = 3\nT_or_E = 5\n",
    "cv-microcanonical": "n = 4\nE_excess = 6\nbins = 8\n",
    "fixed-purity": "n = 3\nn_A = 1\nP = 0.5\n",
}


def test_11_determinism(tmp_path):
    t0 = time.perf_counter()
    assert set(SMALL_CONFIGS) == set(REGISTRY)
    same = []
    for name, body in SMALL_CONFIGS.items():
        text = f"experiment = {name}\nseed = 1100\nn_samples = 40\n{body}"
        outs = []
        for k, threads in enumerate((1, 3)):
            code, msg, paths = run(text, out=tmp_path / f"{name}-{k}", threads=threads)
            assert code == 0, f"{name}: {msg}"
            outs.append(paths[0].read_bytes())
        same.append(outs[0] == outs[1])
    report(11, "Determinism", all(same),
           f"{sum(same)}/{len(same)} experiments byte-identical across re-runs (1 and 3 threads)",
           time.perf_counter() - t0)


if __name__ == "__main__":
    import sys
    import tempfile
    from pathlib import Path

    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_"):
            try:
                if "tmp_path" in fn.__code__.co_varnames[: fn.__code__.co_argcount]:
                    with tempfile.TemporaryDirectory() as tmp:
                        fn(Path(tmp))
                else:
                    fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
