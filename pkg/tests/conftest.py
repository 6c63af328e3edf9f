"""Shared fixtures and independent dense oracles.

The Kronecker helpers build operators directly from tensor products and
are deliberately independent of the library's bit-mask code paths, so they
can serve as oracles for it.
"""

from __future__ import annotations

import numpy as np
import pytest

from easym.evolution import SpectralPropagator, build_spectral
from easym.pauli import HamiltonianParams, PauliSum, build_hamiltonian, materialize_dense

PAULI_1Q = {
    "i": np.eye(2, dtype=np.complex128),
    "x": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}


def kron_operator(num_sites: int, factors: dict[int, str]) -> np.ndarray:
    """Dense operator from single-site factors, site 0 the least significant bit."""
    out = np.ones((1, 1), dtype=np.complex128)
    for site in range(num_sites - 1, -1, -1):
        out = np.kron(out, PAULI_1Q[factors.get(site, "i")])
    return out


def kron_pauli_sum(psum: PauliSum) -> np.ndarray:
    """Dense matrix of a PauliSum built purely from Kronecker products."""
    total = np.zeros((psum.dim, psum.dim), dtype=np.complex128)
    for term in psum.terms:
        total += term.coefficient * kron_operator(psum.L, dict((s, a) for s, a in term.factors))
    return total


def random_state_array(num_sites: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=1 << num_sites) + 1j * rng.normal(size=1 << num_sites)
    return v / np.linalg.norm(v)


@pytest.fixture(scope="session")
def chain_propagator():
    """Session cache of spectral propagators keyed by chain parameters."""
    cache: dict[tuple, SpectralPropagator] = {}

    def get(L: int, gamma: float, delta1: float = 0.4, delta2: float = 0.0) -> SpectralPropagator:
        key = (L, gamma, delta1, delta2)
        if key not in cache:
            params = HamiltonianParams(L=L, gamma=gamma, delta1=delta1, delta2=delta2)
            cache[key] = build_spectral(materialize_dense(build_hamiltonian(params)))
        return cache[key]

    return get
