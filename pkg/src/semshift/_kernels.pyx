# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops, mirroring ``semshift._kernels_py``.

``tsne_step`` is the production fast path (a fused single pass; see
``benchmarks/bench_kernels.py``). ``cosine_block`` is slower than the BLAS
product the numpy twin uses and serves as an independent reference
implementation for cross-checks.

Per-pair accumulation is sequential over the feature axis, so results do not
depend on tiling or thread count; only the final scalar reductions (z, kl)
are summed, and those run over a fixed row order.
"""

import numpy as np

from cython.parallel cimport prange
from libc.math cimport log


def cosine_block(double[:, ::1] u, double[:, ::1] v):
    """out[i, j] = 1 - u[i] . v[j], clamped to [0, 2]; rows pre-normalized."""
    cdef Py_ssize_t m = u.shape[0]
    cdef Py_ssize_t n = v.shape[0]
    cdef Py_ssize_t d = u.shape[1]
    if v.shape[1] != d:
        raise ValueError("dimension mismatch")
    out_arr = np.empty((m, n), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, j, k
    cdef double acc
    for i in prange(m, nogil=True, schedule="static"):
        for j in range(n):
            acc = 0.0
            for k in range(d):
                acc = acc + u[i, k] * v[j, k]
            acc = 1.0 - acc
            if acc < 0.0:
                acc = 0.0
            elif acc > 2.0:
                acc = 2.0
            out[i, j] = acc
    return out_arr


def tsne_step(double[:, ::1] y, double[:, ::1] p_opt, double[:, ::1] p_report):
    """One exact t-SNE evaluation; see the numpy twin for the definition."""
    cdef Py_ssize_t n = y.shape[0]
    cdef Py_ssize_t dims = y.shape[1]
    if p_opt.shape[0] != n or p_opt.shape[1] != n or p_report.shape[0] != n or p_report.shape[1] != n:
        raise ValueError("affinity matrix shape mismatch")

    num_arr = np.empty((n, n), dtype=np.float64)
    row_z = np.zeros(n, dtype=np.float64)
    grad_arr = np.zeros((n, dims), dtype=np.float64)
    cdef double[:, ::1] num = num_arr
    cdef double[::1] zs = row_z
    cdef double[:, ::1] grad = grad_arr

    cdef Py_ssize_t i, j, k
    cdef double d2, acc, z, inv_z, coeff, q, kl
    for i in prange(n, nogil=True, schedule="static"):
        acc = 0.0
        for j in range(n):
            if i == j:
                num[i, j] = 0.0
                continue
            d2 = 0.0
            for k in range(dims):
                d2 = d2 + (y[i, k] - y[j, k]) * (y[i, k] - y[j, k])
            num[i, j] = 1.0 / (1.0 + d2)
            acc = acc + num[i, j]
        zs[i] = acc

    # Serial reduction in fixed row order keeps the result thread-count independent.
    z = 0.0
    for i in range(n):
        z += zs[i]
    inv_z = 1.0 / z

    for i in prange(n, nogil=True, schedule="static"):
        for j in range(n):
            if i == j:
                continue
            coeff = 4.0 * (p_opt[i, j] - num[i, j] * inv_z) * num[i, j]
            for k in range(dims):
                grad[i, k] += coeff * (y[i, k] - y[j, k])

    for i in prange(n, nogil=True, schedule="static"):
        acc = 0.0
        for j in range(n):
            if p_report[i, j] > 0.0:
                q = num[i, j] * inv_z
                acc = acc + p_report[i, j] * log(p_report[i, j] / q)
        zs[i] = acc
    kl = 0.0
    for i in range(n):
        kl += zs[i]
    return grad_arr, kl
