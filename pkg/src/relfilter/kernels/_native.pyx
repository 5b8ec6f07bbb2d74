# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: language_level=3
"""Compiled implementations of the hot kernels.

Contracts match relfilter.kernels._numpy_impl exactly; see that module
for documentation.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, fabs, sqrt

cnp.import_array()


def kde_scores(x_in, q_in, double gamma):
    # BLAS carries the O(n*m*d) inner products; the C loop fuses the
    # clamp, exp and mean so no (n, m) temporaries get materialized.
    x_arr = np.ascontiguousarray(x_in, dtype=np.float64)
    q_arr = np.ascontiguousarray(q_in, dtype=np.float64)
    cdef Py_ssize_t n = x_arr.shape[0]
    cdef Py_ssize_t m = q_arr.shape[0]
    cdef double[::1] xx = np.einsum("ij,ij->i", x_arr, x_arr)
    cdef double[::1] qq = np.einsum("ij,ij->i", q_arr, q_arr)
    cdef double[:, ::1] dots = np.ascontiguousarray(x_arr @ q_arr.T)
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, j
    cdef double acc, dist2
    for i in range(n):
        acc = 0.0
        for j in range(m):
            dist2 = xx[i] + qq[j] - 2.0 * dots[i, j]
            if dist2 < 0.0:  # cancellation can leave tiny negatives
                dist2 = 0.0
            acc += exp(-gamma * dist2)
        out[i] = acc / m
    return out_arr


def svm_epoch(x_in, y_in, alpha_in, w_in, double c, qii_in, order_in):
    cdef double[:, ::1] x = x_in
    cdef double[::1] y = y_in
    cdef double[::1] alpha = alpha_in
    cdef double[::1] w = w_in
    cdef double[::1] qii = qii_in
    cdef long long[::1] order = order_in
    cdef Py_ssize_t n = order.shape[0]
    cdef Py_ssize_t d = x.shape[1]
    cdef Py_ssize_t t, k
    cdef long long i
    cdef double g, a, pg, a_new, delta, max_pg = 0.0
    for t in range(n):
        i = order[t]
        g = 0.0
        for k in range(d):
            g += w[k] * x[i, k]
        g = y[i] * g - 1.0
        a = alpha[i]
        if a <= 0.0:
            pg = g if g < 0.0 else 0.0
        elif a >= c:
            pg = g if g > 0.0 else 0.0
        else:
            pg = g
        if fabs(pg) > max_pg:
            max_pg = fabs(pg)
        if pg != 0.0:
            a_new = a - g / qii[i]
            if a_new < 0.0:
                a_new = 0.0
            elif a_new > c:
                a_new = c
            if a_new != a:
                delta = (a_new - a) * y[i]
                for k in range(d):
                    w[k] += delta * x[i, k]
                alpha[i] = a_new
    return max_pg


def cosine_pairs(x_in, double threshold):
    # Row blocks of the gram matrix come from BLAS; the C scan over the
    # upper triangle does the thresholding without per-row temporaries.
    x_arr = np.ascontiguousarray(x_in, dtype=np.float64)
    cdef double[:, ::1] x = x_arr
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t d = x.shape[1]
    cdef double[::1] norms = np.ascontiguousarray(np.linalg.norm(x_arr, axis=1))
    cdef Py_ssize_t block = 256
    cdef double[:, ::1] gram
    cdef Py_ssize_t i0, i1, bi, i, j, k
    cdef double sim
    cdef bint same
    ia, ja, sims = [], [], []
    for i0 in range(0, n, block):
        i1 = min(i0 + block, n)
        gram = np.ascontiguousarray(x_arr[i0:i1] @ x_arr.T)
        for bi in range(i1 - i0):
            i = i0 + bi
            if norms[i] == 0.0:
                continue
            for j in range(i + 1, n):
                if norms[j] == 0.0:
                    continue
                sim = gram[bi, j] / (norms[i] * norms[j])
                if sim > 1.0:
                    sim = 1.0
                if sim > 1.0 - 1e-12:
                    # identical rows must report exactly 1.0 even when
                    # the dot product rounded an ulp below it
                    same = True
                    for k in range(d):
                        if x[i, k] != x[j, k]:
                            same = False
                            break
                    if same:
                        sim = 1.0
                if sim >= threshold:
                    ia.append(i)
                    ja.append(j)
                    sims.append(sim)
    return (np.array(ia, dtype=np.int64), np.array(ja, dtype=np.int64),
            np.array(sims, dtype=np.float64))
