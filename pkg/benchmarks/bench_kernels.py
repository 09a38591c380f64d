"""Compare the Cython kernels against the numpy fallback.

Usage: python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import timeit

import numpy as np

from entlab import _kernels_py
from entlab.circuits import PAIR_TRANSFER, pauli_initial_distribution, pauli_markov_step

try:
    from entlab import _kernels as _kernels_c
except ImportError:
    _kernels_c = None


def cases():
    rng = np.random.default_rng(0)
    for N in (16, 64, 200):
        p = np.sort(rng.random(N))
        p /= p.sum()
        yield f"pair_terms N={N}", "pair_terms", (p,)
    for n in (4, 6, 8):
        w = pauli_initial_distribution("0" * n)
        for _ in range(3):
            w = pauli_markov_step(w)
        yield f"pauli_step n={n}", "pauli_step", (w.weights, n, PAIR_TRANSFER)


def best_time(fn, args, repeat):
    number = max(1, int(0.2 / max(timeit.timeit(lambda: fn(*args), number=1), 1e-7)))
    return min(timeit.repeat(lambda: fn(*args), number=number, repeat=repeat)) / number


def _rel(x, y):
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    return float(np.max(np.abs(x - y)) / max(np.max(np.abs(x)), 1e-300))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"{'kernel':<20}{'python [ms]':>14}{'cython [ms]':>14}{'speedup':>10}  max rel diff")
    for label, name, fargs in cases():
        t_py = best_time(getattr(_kernels_py, name), fargs, args.repeat)
        if _kernels_c is None:
            print(f"{label:<20}{t_py * 1e3:>14.3f}{'n/a':>14}")
            continue
        fc = getattr(_kernels_c, name)
        t_c = best_time(fc, fargs, args.repeat)
        a, b = getattr(_kernels_py, name)(*fargs), fc(*fargs)
        if isinstance(a, tuple):
            diff = max(_rel(x, y) for x, y in zip(a, b))
        else:
            diff = _rel(a, b)
        print(f"{label:<20}{t_py * 1e3:>14.3f}{t_c * 1e3:>14.3f}{t_py / t_c:>9.1f}x  {diff:.1e}")


if __name__ == "__main__":
    main()
