# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. Mirrors ``_kernels_py`` exactly."""

import numpy as np
cimport numpy as cnp
from libc.math cimport log, fabs

cnp.import_array()


def pair_terms(double[::1] p):
    """Energy, gradient and Hessian of -2 sum_{i<j} ln|p_i - p_j|."""
    cdef Py_ssize_t n = p.shape[0], i, j
    cdef double d, inv, inv2, energy = 0.0
    grad_arr = np.zeros(n)
    hess_arr = np.zeros((n, n))
    cdef double[::1] grad = grad_arr
    cdef double[:, ::1] hess = hess_arr
    for i in range(n):
        for j in range(i + 1, n):
            d = p[i] - p[j]
            if d == 0.0:
                return np.inf, grad_arr, hess_arr
            energy -= 2.0 * log(fabs(d))
            inv = 1.0 / d
            inv2 = 2.0 * inv * inv
            grad[i] -= 2.0 * inv
            grad[j] += 2.0 * inv
            hess[i, i] += inv2
            hess[j, j] += inv2
            hess[i, j] -= inv2
            hess[j, i] -= inv2
    return energy, grad_arr, hess_arr


def pauli_step(double[::1] w, int n, double[:, :, :, ::1] m):
    """One averaged gate of the Pauli second-moment chain on a dense weight vector.

    ``m[a, b, x, y]`` is the transfer weight from letters (x, y) on
    (control, target) to (a, b). For each ordered pair the update is a sparse
    4x4 -> 4x4 map applied as contiguous axpy runs over the digits below
    both positions.
    """
    cdef Py_ssize_t size = w.shape[0], run, i, hb, md, base, d, s_
    cdef Py_ssize_t n_hi, n_mid
    cdef int c, t, a, b, x, y, k, nnz = 0, pc, pt, lo, hi
    cdef Py_ssize_t sc, st
    cdef Py_ssize_t offs[16]
    cdef int src[256]
    cdef int dst[256]
    cdef double val[256]
    cdef double f
    cdef double npairs = n * (n - 1)
    out_arr = np.zeros(size)
    cdef double[::1] out = out_arr
    for a in range(4):
        for b in range(4):
            for x in range(4):
                for y in range(4):
                    if m[a, b, x, y] != 0.0:
                        dst[nnz] = 4 * a + b
                        src[nnz] = 4 * x + y
                        val[nnz] = m[a, b, x, y]
                        nnz += 1
    for c in range(n):
        pc = 2 * (n - 1 - c)
        sc = (<Py_ssize_t>1) << pc
        for t in range(n):
            if t == c:
                continue
            pt = 2 * (n - 1 - t)
            st = (<Py_ssize_t>1) << pt
            lo = pc if pc < pt else pt
            hi = pt if pc < pt else pc
            for x in range(4):
                for y in range(4):
                    offs[4 * x + y] = x * sc + y * st
            run = (<Py_ssize_t>1) << lo
            n_mid = (<Py_ssize_t>1) << (hi - lo - 2)
            n_hi = size >> (hi + 2)
            for hb in range(n_hi):
                for md in range(n_mid):
                    base = (hb << (hi + 2)) | (md << (lo + 2))
                    for k in range(nnz):
                        d = base + offs[dst[k]]
                        s_ = base + offs[src[k]]
                        f = val[k]
                        for i in range(run):
                            out[d + i] += f * w[s_ + i]
    for i in range(size):
        out[i] /= npairs
    return out_arr
