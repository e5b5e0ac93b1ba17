# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled rectangle-scan kernels.

Bit-compatible with `_ref`: identical accumulation order for the
summed-area tables and identical association for rectangle sums, so a
run may switch backends without changing any output byte.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def sat2(double[:, ::1] values):
    """Padded summed-area table: sat[i, j] = sum of values[:i, :j]."""
    cdef Py_ssize_t n = values.shape[0]
    cdef Py_ssize_t m = values.shape[1]
    out_arr = np.zeros((n + 1, m + 1), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, j
    # accumulate along axis 0, then axis 1 (matches _ref.sat2)
    for i in range(n):
        for j in range(m):
            out[i + 1, j + 1] = out[i, j + 1] + values[i, j]
    for i in range(n):
        for j in range(1, m):
            out[i + 1, j + 1] = out[i + 1, j] + out[i + 1, j + 1]
    return out_arr


def rect_sums(double[:, ::1] sat, x0, x1, y0, y1):
    """Sums over inclusive index rectangles, O(1) each via the table."""
    cdef const long long[::1] ax0 = np.ascontiguousarray(x0, dtype=np.int64)
    cdef const long long[::1] ax1 = np.ascontiguousarray(x1, dtype=np.int64)
    cdef const long long[::1] ay0 = np.ascontiguousarray(y0, dtype=np.int64)
    cdef const long long[::1] ay1 = np.ascontiguousarray(y1, dtype=np.int64)
    cdef Py_ssize_t nrect = ax0.shape[0]
    out_arr = np.empty(nrect, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t r
    cdef Py_ssize_t i0, i1, j0, j1
    for r in range(nrect):
        i0 = ax0[r]; i1 = ax1[r]; j0 = ay0[r]; j1 = ay1[r]
        out[r] = ((sat[i1 + 1, j1 + 1] - sat[i0, j1 + 1]) - sat[i1 + 1, j0]) + sat[i0, j0]
    return out_arr


def strong_maximal_scan(values, x0, x1, y0, y1):
    """Max over the given rectangles, per cell, of the rectangle mean."""
    values_arr = np.ascontiguousarray(values, dtype=np.float64)
    table = sat2(values_arr)
    sums = rect_sums(table, x0, x1, y0, y1)
    cdef const long long[::1] ax0 = np.ascontiguousarray(x0, dtype=np.int64)
    cdef const long long[::1] ax1 = np.ascontiguousarray(x1, dtype=np.int64)
    cdef const long long[::1] ay0 = np.ascontiguousarray(y0, dtype=np.int64)
    cdef const long long[::1] ay1 = np.ascontiguousarray(y1, dtype=np.int64)
    cdef const double[::1] csums = sums
    out_arr = np.zeros_like(values_arr)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t r, i, j
    cdef double avg
    for r in range(ax0.shape[0]):
        avg = csums[r] / ((ax1[r] - ax0[r] + 1) * (ay1[r] - ay0[r] + 1))
        for i in range(ax0[r], ax1[r] + 1):
            for j in range(ay0[r], ay1[r] + 1):
                if avg > out[i, j]:
                    out[i, j] = avg
    return out_arr


def axis_maximal_scan(values, a0, a1, axis):
    """One-parameter maximal scan: intervals on `axis`, other coordinate frozen."""
    if axis == 0:
        work = np.ascontiguousarray(values, dtype=np.float64)
    else:
        work = np.ascontiguousarray(np.asarray(values, dtype=np.float64).T)
    out = _axis0_maximal(work, np.ascontiguousarray(a0, dtype=np.int64),
                         np.ascontiguousarray(a1, dtype=np.int64))
    return out if axis == 0 else np.ascontiguousarray(out.T)


def _axis0_maximal(double[:, ::1] work, const long long[::1] a0, const long long[::1] a1):
    cdef Py_ssize_t n = work.shape[0]
    cdef Py_ssize_t m = work.shape[1]
    prefix_arr = np.zeros((n + 1, m), dtype=np.float64)
    cdef double[:, ::1] prefix = prefix_arr
    cdef Py_ssize_t i, j, r
    cdef double avg, cnt
    for i in range(n):
        for j in range(m):
            prefix[i + 1, j] = prefix[i, j] + work[i, j]
    out_arr = np.zeros((n, m), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    for r in range(a0.shape[0]):
        cnt = a1[r] - a0[r] + 1
        for j in range(m):
            avg = (prefix[a1[r] + 1, j] - prefix[a0[r], j]) / cnt
            for i in range(a0[r], a1[r] + 1):
                if avg > out[i, j]:
                    out[i, j] = avg
    return out_arr
