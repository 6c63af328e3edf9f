# cython: boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled kernel backend.

Same conventions as the numpy fallback: site k is bit k of the basis index,
and a gate on sites (i, j) uses the local basis |q_i q_j> = 00, 01, 10, 11.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

cdef extern from *:
    """
    #if defined(__GNUC__) || defined(__clang__)
    #define EASYM_POPCOUNT64(x) __builtin_popcountll(x)
    #else
    static int EASYM_POPCOUNT64(unsigned long long v)
    { int c = 0; while (v) { v &= v - 1; ++c; } return c; }
    #endif
    """
    int EASYM_POPCOUNT64(unsigned long long) nogil


def apply_two_qubit_inplace(double complex[::1] amps, double complex[:, ::1] gate, int qi, int qj):
    """Apply a 4x4 gate to sites (qi, qj) of the statevector, in place."""
    cdef Py_ssize_t quarter = amps.shape[0] >> 2
    cdef int lo = qi if qi < qj else qj
    cdef int hi = qj if qi < qj else qi
    cdef unsigned long long mlo = (1ULL << lo) - 1ULL
    cdef unsigned long long mhi = (1ULL << hi) - 1ULL
    cdef unsigned long long bi = 1ULL << qi
    cdef unsigned long long bj = 1ULL << qj
    cdef double complex g00 = gate[0, 0], g01 = gate[0, 1], g02 = gate[0, 2], g03 = gate[0, 3]
    cdef double complex g10 = gate[1, 0], g11 = gate[1, 1], g12 = gate[1, 2], g13 = gate[1, 3]
    cdef double complex g20 = gate[2, 0], g21 = gate[2, 1], g22 = gate[2, 2], g23 = gate[2, 3]
    cdef double complex g30 = gate[3, 0], g31 = gate[3, 1], g32 = gate[3, 2], g33 = gate[3, 3]
    cdef Py_ssize_t n, i0, i1, i2, i3
    cdef unsigned long long x
    cdef double complex a0, a1, a2, a3
    with nogil:
        for n in range(quarter):
            x = <unsigned long long> n
            # insert a cleared bit at position lo, then at position hi
            x = ((x & ~mlo) << 1) | (x & mlo)
            x = ((x & ~mhi) << 1) | (x & mhi)
            i0 = <Py_ssize_t> x
            i1 = <Py_ssize_t> (x | bj)
            i2 = <Py_ssize_t> (x | bi)
            i3 = <Py_ssize_t> (x | bi | bj)
            a0 = amps[i0]
            a1 = amps[i1]
            a2 = amps[i2]
            a3 = amps[i3]
            amps[i0] = g00 * a0 + g01 * a1 + g02 * a2 + g03 * a3
            amps[i1] = g10 * a0 + g11 * a1 + g12 * a2 + g13 * a3
            amps[i2] = g20 * a0 + g21 * a1 + g22 * a2 + g23 * a3
            amps[i3] = g30 * a0 + g31 * a1 + g32 * a2 + g33 * a3


def pauli_matvec(double complex[::1] coeffs, unsigned long long[::1] flips,
                 unsigned long long[::1] signs, double complex[::1] amps,
                 double complex[::1] out):
    """Accumulate the Pauli-sum matvec into ``out`` (caller zeroes it)."""
    cdef Py_ssize_t nterms = coeffs.shape[0]
    cdef Py_ssize_t dim = amps.shape[0]
    cdef Py_ssize_t t, x
    cdef unsigned long long f, s
    cdef double complex c
    with nogil:
        for t in range(nterms):
            c = coeffs[t]
            f = flips[t]
            s = signs[t]
            if s == 0:
                for x in range(dim):
                    out[<Py_ssize_t> ((<unsigned long long> x) ^ f)] += c * amps[x]
            else:
                for x in range(dim):
                    if EASYM_POPCOUNT64((<unsigned long long> x) & s) & 1:
                        out[<Py_ssize_t> ((<unsigned long long> x) ^ f)] -= c * amps[x]
                    else:
                        out[<Py_ssize_t> ((<unsigned long long> x) ^ f)] += c * amps[x]
