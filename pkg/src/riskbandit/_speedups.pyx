# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: case-base similarity scan and slate assembly.

Kept in lockstep with ``_kernels_py``; both backends must return bit-identical
results for identical inputs.
"""
from libc.math cimport sqrt, INFINITY
from libc.stdlib cimport malloc, free
from libc.stdint cimport int64_t


def scan_best_case(const double[::1] row_loc, const double[::1] row_time,
                   const double[::1] row_soc, const int64_t[::1] case_loc,
                   const int64_t[::1] case_time, const int64_t[::1] case_soc):
    cdef Py_ssize_t n = case_loc.shape[0]
    cdef Py_ssize_t i, best_i = 0
    cdef double s, best = -1.0
    for i in range(n):
        s = (row_loc[case_loc[i]] + row_time[case_time[i]] + row_soc[case_soc[i]]) / 3.0
        if s > best:
            best = s
            best_i = i
    return best_i, best


def select_slate(const double[::1] clicks, const double[::1] recoms, double log_t,
                 bint use_bonus, double eps, const double[::1] qs,
                 const double[::1] us, int64_t[::1] out):
    cdef Py_ssize_t n = clicks.shape[0]
    cdef Py_ssize_t slots = out.shape[0]
    cdef double *b = <double *> malloc(n * sizeof(double))
    cdef char *taken = <char *> malloc(n * sizeof(char))
    if b == NULL or taken == NULL:
        free(b)
        free(taken)
        raise MemoryError()
    cdef Py_ssize_t i, k, pick, j, remaining
    cdef double best
    cdef Py_ssize_t explored = 0
    try:
        for i in range(n):
            taken[i] = 0
            if recoms[i] > 0.0:
                b[i] = clicks[i] / recoms[i]
                if use_bonus:
                    b[i] = b[i] + sqrt(2.0 * log_t / recoms[i])
            else:
                b[i] = INFINITY if use_bonus else 0.0
        remaining = n
        for k in range(slots):
            pick = -1
            if qs[k] > eps:
                best = -INFINITY
                for i in range(n):
                    if taken[i] == 0 and b[i] > best:
                        best = b[i]
                        pick = i
                if pick < 0:  # every remaining index sits at -inf; take the first free one
                    for i in range(n):
                        if taken[i] == 0:
                            pick = i
                            break
            else:
                j = <Py_ssize_t> (us[k] * remaining)
                if j >= remaining:
                    j = remaining - 1
                for i in range(n):
                    if taken[i] == 0:
                        if j == 0:
                            pick = i
                            break
                        j -= 1
                explored += 1
            out[k] = pick
            taken[pick] = 1
            remaining -= 1
        return explored
    finally:
        free(b)
        free(taken)
