"""Backend selection for the hot loops.

The Cython extension ``entlab._kernels`` is used when it was built; otherwise
the numpy fallback in ``entlab._kernels_py``. Setting ``ENTLAB_PURE_PYTHON=1``
forces the fallback.

``pauli_step`` switches to the numpy version from ``PAULI_NUMPY_FROM`` qubits
on: there the dense 16 x 16 block product runs through BLAS and beats the
compiled sparse loop (see ``benchmarks/bench_kernels.py``).
"""

import os

from . import _kernels_py

if os.environ.get("ENTLAB_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _kernels_py

BACKEND = "cython" if _impl is not _kernels_py else "python"

PAULI_NUMPY_FROM = 6

pair_terms = _impl.pair_terms


def pauli_step(w, n, m):
    if n >= PAULI_NUMPY_FROM:
        return _kernels_py.pauli_step(w, n, m)
    return _impl.pauli_step(w, n, m)
