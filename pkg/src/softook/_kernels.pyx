# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: log I0 and the soft-input Viterbi recursion.

Both functions mirror :mod:`softook._pykernels` exactly; inputs are
assumed validated by the callers.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport log, INFINITY

cnp.import_array()

cdef double LOG_I0_CROSSOVER = 17.0
cdef double HALF_LOG_2PI = 0.9189385332046727


cdef inline double _log_i0(double x) noexcept nogil:
    cdef double q, term, total, k, x8
    if x < LOG_I0_CROSSOVER:
        q = 0.25 * x * x
        term = 1.0
        total = 1.0
        k = 1.0
        while True:
            term *= q / (k * k)
            total += term
            if term < 1e-17 * total:
                break
            k += 1.0
        return log(total)
    x8 = 8.0 * x
    term = 1.0
    total = 1.0
    k = 1.0
    while k < 60.0:
        term *= (2.0 * k - 1.0) * (2.0 * k - 1.0) / (x8 * k)
        total += term
        if term < 1e-17 * total:
            break
        k += 1.0
    return x - 0.5 * log(x) - HALF_LOG_2PI + log(total)


def log_i0(x):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] flat = np.ascontiguousarray(x, dtype=np.float64).ravel()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty_like(flat)
    cdef double[::1] xv = flat
    cdef double[::1] ov = out
    cdef Py_ssize_t i, n = flat.shape[0]
    with nogil:
        for i in range(n):
            ov[i] = _log_i0(xv[i])
    return out.reshape(np.shape(x))


cdef inline int _tie_prefers_one(const unsigned char[:, ::1] dec, int step,
                                 int p0, int p1, int m, int mask) noexcept nogil:
    # Walk both survivors back to their common ancestor; the earliest
    # differing input decides the lexicographic order.
    cdef int x = p0, y = p1, j = step, ux = 0, uy = 0
    while x != y and j > 0:
        ux = x >> (m - 1)
        uy = y >> (m - 1)
        x = ((x << 1) & mask) | dec[j - 1, x]
        y = ((y << 1) & mask) | dec[j - 1, y]
        j -= 1
    return ux > uy


def viterbi(llrs, outputs, int n_info, int m):
    """Return ``(bits, metric)`` for a zero-terminated rate-1/2 trellis.

    ``outputs[s, u]`` holds ``2 * c1 + c2`` for input ``u`` from state ``s``.
    """
    cdef const double[::1] L = np.ascontiguousarray(llrs, dtype=np.float64)
    cdef const cnp.int8_t[:, ::1] out = np.ascontiguousarray(outputs, dtype=np.int8)
    cdef int n_states = 1 << m
    cdef int mask = n_states - 1
    cdef int n_steps = n_info + m
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] dec_arr = np.zeros((n_steps, n_states), dtype=np.uint8)
    cdef unsigned char[:, ::1] dec = dec_arr
    cdef double[::1] cur = np.full(n_states, -INFINITY)
    cdef double[::1] nxt = np.empty(n_states)
    cdef double[::1] tmp
    cdef double bm[4]
    cdef double l1, l2, m0, m1
    cdef int k, n, u, p0, p1, c
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] bits = np.zeros(n_info, dtype=np.uint8)
    cur[0] = 0.0
    with nogil:
        for k in range(n_steps):
            l1 = L[2 * k]
            l2 = L[2 * k + 1]
            bm[0] = -l1 - l2
            bm[1] = -l1 + l2
            bm[2] = l1 - l2
            bm[3] = l1 + l2
            for n in range(n_states):
                u = n >> (m - 1)
                if u and k >= n_info:
                    nxt[n] = -INFINITY
                    continue
                p0 = (n << 1) & mask
                p1 = p0 | 1
                m0 = cur[p0] + bm[out[p0, u]]
                m1 = cur[p1] + bm[out[p1, u]]
                if m1 > m0:
                    nxt[n] = m1
                    dec[k, n] = 1
                elif m0 > m1 or m0 == -INFINITY:
                    nxt[n] = m0
                else:
                    nxt[n] = m0
                    if _tie_prefers_one(dec, k, p0, p1, m, mask):
                        dec[k, n] = 1
            tmp = cur
            cur = nxt
            nxt = tmp
        n = 0
        for k in range(n_steps - 1, -1, -1):
            if k < n_info:
                bits[k] = n >> (m - 1)
            n = ((n << 1) & mask) | dec[k, n]
    return bits, float(cur[0])
