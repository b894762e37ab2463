# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernels: SOU batch evaluation and bucket accumulation.

Contracts mirror `_kernels_py`; the backend module picks whichever is
available at import time.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def sou_eval(cnp.uint64_t[:, ::1] term_words, cnp.float64_t[::1] alphas,
             cnp.uint64_t[:, ::1] subset_words):
    cdef Py_ssize_t d = term_words.shape[0]
    cdef Py_ssize_t words = term_words.shape[1]
    cdef Py_ssize_t count = subset_words.shape[0]
    out_arr = np.empty(count, dtype=np.float64)
    cdef cnp.float64_t[::1] out = out_arr
    cdef Py_ssize_t t, j, w
    cdef cnp.uint64_t clash
    cdef double acc
    with nogil:
        if words == 1:
            for t in range(count):
                acc = 0.0
                for j in range(d):
                    if (term_words[j, 0] & ~subset_words[t, 0]) == 0:
                        acc += alphas[j]
                out[t] = acc
        else:
            for t in range(count):
                acc = 0.0
                for j in range(d):
                    clash = 0
                    for w in range(words):
                        clash |= term_words[j, w] & ~subset_words[t, w]
                    if clash == 0:
                        acc += alphas[j]
                out[t] = acc
    return out_arr


def accumulate_buckets(cnp.uint8_t[:, ::1] members, cnp.int64_t[::1] sizes,
                       cnp.float64_t[::1] values,
                       cnp.float64_t[:, ::1] plus_sum,
                       cnp.int64_t[:, ::1] plus_cnt,
                       cnp.float64_t[:, ::1] minus_sum,
                       cnp.int64_t[:, ::1] minus_cnt):
    cdef Py_ssize_t count = members.shape[0]
    cdef Py_ssize_t n = members.shape[1]
    cdef Py_ssize_t t, i
    cdef Py_ssize_t s
    cdef double v
    with nogil:
        for t in range(count):
            s = sizes[t]
            v = values[t]
            for i in range(n):
                if members[t, i]:
                    plus_sum[i, s] += v
                    plus_cnt[i, s] += 1
                else:
                    minus_sum[i, s] += v
                    minus_cnt[i, s] += 1
