"""Pure numpy versions of the compiled kernels, used when the extension is absent."""

import numpy as np


def pair_terms(p):
    """Energy, gradient and Hessian of -2 sum_{i<j} ln|p_i - p_j|."""
    p = np.asarray(p, dtype=float)
    d = p[:, None] - p[None, :]
    np.fill_diagonal(d, 1.0)
    if np.any(d == 0.0):
        return np.inf, np.zeros_like(p), np.zeros((p.size, p.size))
    inv = 1.0 / d
    np.fill_diagonal(inv, 0.0)
    iu = np.triu_indices(p.size, 1)
    energy = -2.0 * np.log(np.abs(d[iu])).sum()
    grad = -2.0 * inv.sum(axis=1)
    hess = -2.0 * inv * inv
    np.fill_diagonal(hess, -hess.sum(axis=1))
    return energy, grad, hess


def pauli_step(w, n, m):
    """One averaged gate of the Pauli second-moment chain on a dense weight vector."""
    w = np.asarray(w, dtype=float).reshape([4] * n)
    out = np.zeros_like(w)
    for c in range(n):
        for t in range(n):
            if t == c:
                continue
            moved = np.tensordot(m, w, axes=([2, 3], [c, t]))
            out += np.moveaxis(moved, [0, 1], [c, t])
    return out.ravel() / (n * (n - 1))
