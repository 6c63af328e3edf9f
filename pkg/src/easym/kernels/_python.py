"""Pure-numpy kernel backend.

Shared basis convention: site k of an L-site chain is bit k of the basis
index (site 0 least significant). A two-qubit gate on ordered sites (i, j)
acts in the local basis |q_i q_j> listed as 00, 01, 10, 11, i.e. local
index 2*b_i + b_j.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

_ONE = np.uint64(1)


@lru_cache(maxsize=256)
def _gate_indices(dim: int, qi: int, qj: int):
    """The four basis-index groups (b_i, b_j) = 00, 01, 10, 11 for a site pair."""
    lo, hi = sorted((qi, qj))
    n = np.arange(dim >> 2, dtype=np.uint64)
    mlo = np.uint64((1 << lo) - 1)
    mhi = np.uint64((1 << hi) - 1)
    # insert a cleared bit at position lo, then at position hi
    base = ((n & ~mlo) << _ONE) | (n & mlo)
    base = ((base & ~mhi) << _ONE) | (base & mhi)
    bi = np.uint64(1 << qi)
    bj = np.uint64(1 << qj)
    return base, base | bj, base | bi, base | bi | bj


@lru_cache(maxsize=32)
def _basis_indices(dim: int):
    return np.arange(dim, dtype=np.uint64)


def apply_two_qubit_inplace(amps, gate, qi, qj):
    """Apply a 4x4 gate to sites (qi, qj) of the statevector, in place."""
    i0, i1, i2, i3 = _gate_indices(amps.shape[0], qi, qj)
    block = np.empty((4, i0.shape[0]), dtype=np.complex128)
    block[0] = amps[i0]
    block[1] = amps[i1]
    block[2] = amps[i2]
    block[3] = amps[i3]
    new = gate @ block
    amps[i0] = new[0]
    amps[i1] = new[1]
    amps[i2] = new[2]
    amps[i3] = new[3]


def pauli_matvec(coeffs, flips, signs, amps, out):
    """Accumulate the Pauli-sum matvec into ``out`` (caller zeroes it)."""
    idx = _basis_indices(amps.shape[0])
    for c, f, s in zip(coeffs, flips, signs):
        v = idx & s
        # parity of the masked bits via xor-fold
        v ^= v >> np.uint64(32)
        v ^= v >> np.uint64(16)
        v ^= v >> np.uint64(8)
        v ^= v >> np.uint64(4)
        v ^= v >> np.uint64(2)
        v ^= v >> _ONE
        sign = 1.0 - 2.0 * (v & _ONE).astype(np.float64)
        # x ^ f is a bijection, so fancy-indexed += is safe
        out[idx ^ f] += (c * sign) * amps
