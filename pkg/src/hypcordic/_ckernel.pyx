# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled micro-rotation kernel on 128-bit integers.

Operands travel as (hi: int64, lo: uint64) limb pairs; B-bit wraparound
is a left/right shift pair inside a 128-bit register.
"""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t, uint64_t, int32_t, uint8_t

cnp.import_array()

cdef extern from *:
    """
    typedef __int128 hc_i128;
    typedef unsigned __int128 hc_u128;

    static inline hc_i128 hc_join(int64_t hi, uint64_t lo) {
        return (hc_i128)(((hc_u128)(uint64_t)hi << 64) | (hc_u128)lo);
    }
    static inline int64_t hc_hi(hc_i128 v) { return (int64_t)(v >> 64); }
    static inline uint64_t hc_lo(hc_i128 v) { return (uint64_t)(hc_u128)v; }
    static inline hc_i128 hc_wrap(hc_i128 v, int pad) {
        return ((hc_i128)((hc_u128)v << pad)) >> pad;
    }
    static inline hc_i128 hc_add(hc_i128 a, hc_i128 b, int pad) {
        return hc_wrap((hc_i128)((hc_u128)a + (hc_u128)b), pad);
    }
    static inline hc_i128 hc_sub(hc_i128 a, hc_i128 b, int pad) {
        return hc_wrap((hc_i128)((hc_u128)a - (hc_u128)b), pad);
    }
    static inline hc_i128 hc_sar(hc_i128 a, int s) { return a >> (s > 127 ? 127 : s); }
    static inline int hc_neg(hc_i128 a) { return a < 0; }
    """
    ctypedef long long hc_i128
    hc_i128 hc_join(int64_t hi, uint64_t lo) nogil
    int64_t hc_hi(hc_i128 v) nogil
    uint64_t hc_lo(hc_i128 v) nogil
    hc_i128 hc_add(hc_i128 a, hc_i128 b, int pad) nogil
    hc_i128 hc_sub(hc_i128 a, hc_i128 b, int pad) nogil
    hc_i128 hc_sar(hc_i128 a, int s) nogil
    int hc_neg(hc_i128 a) nogil


def run_limbs(int64_t[::1] x_hi, uint64_t[::1] x_lo,
              int64_t[::1] y_hi, uint64_t[::1] y_lo,
              int64_t[::1] z_hi, uint64_t[::1] z_lo,
              int32_t[::1] shifts, uint8_t[::1] negative,
              int64_t[::1] t_hi, uint64_t[::1] t_lo,
              bint vectoring, int bits):
    """In-place batch run over limb arrays."""
    cdef Py_ssize_t n = x_hi.shape[0]
    cdef Py_ssize_t steps = shifts.shape[0]
    cdef Py_ssize_t j, k
    cdef int pad = 128 - bits
    cdef int s
    cdef int d_neg
    cdef hc_i128 x, y, z, tx, ty, th
    with nogil:
        for j in range(n):
            x = hc_join(x_hi[j], x_lo[j])
            y = hc_join(y_hi[j], y_lo[j])
            z = hc_join(z_hi[j], z_lo[j])
            for k in range(steps):
                s = shifts[k]
                th = hc_join(t_hi[k], t_lo[k])
                if negative[k]:
                    tx = hc_sub(x, hc_sar(x, s), pad)
                    ty = hc_sub(y, hc_sar(y, s), pad)
                else:
                    tx = hc_sar(x, s)
                    ty = hc_sar(y, s)
                if vectoring:
                    d_neg = hc_neg(x) == hc_neg(y)
                else:
                    d_neg = hc_neg(z)
                if d_neg:
                    x = hc_sub(x, ty, pad)
                    y = hc_sub(y, tx, pad)
                    z = hc_add(z, th, pad)
                else:
                    x = hc_add(x, ty, pad)
                    y = hc_add(y, tx, pad)
                    z = hc_sub(z, th, pad)
            x_hi[j] = hc_hi(x)
            x_lo[j] = hc_lo(x)
            y_hi[j] = hc_hi(y)
            y_lo[j] = hc_lo(y)
            z_hi[j] = hc_hi(z)
            z_lo[j] = hc_lo(z)
