# cython: boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled similarity kernels.

Same contract and arithmetic as `_purepy`; compiled with FP contraction
disabled so results stay bitwise-identical to the Python backend. All
loops run without the GIL, so callers may parallelize over row ranges.
"""

from libc.stdint cimport int32_t, int64_t


def exact_rows(const int32_t[::1] fp_ids, double[:, ::1] out,
               Py_ssize_t row_start, Py_ssize_t row_end):
    """Fill rows [row_start, row_end) of the exact-identity matrix."""
    cdef Py_ssize_t i, j, n = fp_ids.shape[0]
    cdef int32_t fp
    cdef double s
    with nogil:
        for i in range(row_start, row_end):
            fp = fp_ids[i]
            for j in range(i, n):
                s = 1.0 if fp == fp_ids[j] else 0.0
                out[i, j] = s
                out[j, i] = s


def gradual_rows(const int32_t[::1] kind_ids,
                 const int32_t[::1] port_ids,
                 const int64_t[::1] port_offsets,
                 const int32_t[::1] token_ids,
                 const int64_t[::1] token_counts,
                 const int64_t[::1] token_offsets,
                 double w_sig, double w_beh, double[:, ::1] out,
                 Py_ssize_t row_start, Py_ssize_t row_end):
    """Fill rows [row_start, row_end) of the gradual-similarity matrix."""
    cdef Py_ssize_t i, j, n = kind_ids.shape[0]
    cdef double jp, jt, s
    with nogil:
        for i in range(row_start, row_end):
            out[i, i] = 1.0
            for j in range(i + 1, n):
                if kind_ids[i] != kind_ids[j]:
                    s = 0.0
                else:
                    jp = _set_jaccard(port_ids,
                                      port_offsets[i], port_offsets[i + 1],
                                      port_offsets[j], port_offsets[j + 1])
                    jt = _multiset_jaccard(token_ids, token_counts,
                                           token_offsets[i],
                                           token_offsets[i + 1],
                                           token_offsets[j],
                                           token_offsets[j + 1])
                    if jp == 1.0 and jt == 1.0:
                        s = 1.0
                    else:
                        s = w_sig * jp + w_beh * jt
                        if s > 1.0:
                            s = 1.0
                out[i, j] = s
                out[j, i] = s


cdef double _set_jaccard(const int32_t[::1] ids, Py_ssize_t a,
                         Py_ssize_t a_end, Py_ssize_t b,
                         Py_ssize_t b_end) nogil:
    cdef int64_t inter = 0, union_ = 0
    cdef int32_t x, y
    while a < a_end and b < b_end:
        x = ids[a]
        y = ids[b]
        if x == y:
            inter += 1
            union_ += 1
            a += 1
            b += 1
        elif x < y:
            union_ += 1
            a += 1
        else:
            union_ += 1
            b += 1
    union_ += (a_end - a) + (b_end - b)
    if union_ == 0:
        return 1.0
    return (<double> inter) / (<double> union_)


cdef double _multiset_jaccard(const int32_t[::1] ids,
                              const int64_t[::1] counts, Py_ssize_t a,
                              Py_ssize_t a_end, Py_ssize_t b,
                              Py_ssize_t b_end) nogil:
    cdef int64_t mins = 0, maxs = 0, ca, cb
    cdef int32_t x, y
    while a < a_end and b < b_end:
        x = ids[a]
        y = ids[b]
        if x == y:
            ca = counts[a]
            cb = counts[b]
            if ca < cb:
                mins += ca
                maxs += cb
            else:
                mins += cb
                maxs += ca
            a += 1
            b += 1
        elif x < y:
            maxs += counts[a]
            a += 1
        else:
            maxs += counts[b]
            b += 1
    while a < a_end:
        maxs += counts[a]
        a += 1
    while b < b_end:
        maxs += counts[b]
        b += 1
    if maxs == 0:
        return 1.0
    return (<double> mins) / (<double> maxs)
