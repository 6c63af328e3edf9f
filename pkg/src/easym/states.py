"""Statevector container, basis conventions, and product-state preparation.

Conventions shared across the library:

* site k of an L-site chain is bit k of the basis index, site 0 least
  significant, so the product state with site values b_k has basis index
  sum_k b_k 2^k;
* |0> at a site is the +1 eigenstate of sigma^z (spin up), hence the
  all-zeros state carries total charge +L;
* two-qubit gates on ordered sites (i, j) act in the local basis
  |q_i q_j> listed as 00, 01, 10, 11.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels

FERROMAGNETIC = "ferromagnetic"
ANTIFERROMAGNETIC = "antiferromagnetic"
DOMAIN_WALL = "domain-wall"
PATTERNS = (FERROMAGNETIC, ANTIFERROMAGNETIC, DOMAIN_WALL)

_UNITARITY_TOL = 1e-8


@dataclass(frozen=True)
class ProductStateSpec:
    """A base bit pattern plus a per-site tilt angle in [0, pi/2] radians."""

    pattern: str
    tilt_angle: float = 0.0

    def __post_init__(self):
        if self.pattern not in PATTERNS:
            raise ValueError(f"unknown pattern {self.pattern!r}; expected one of {PATTERNS}")
        if not 0.0 <= self.tilt_angle <= math.pi / 2 + 1e-12:
            raise ValueError(f"tilt_angle must lie in [0, pi/2], got {self.tilt_angle}")


@dataclass(frozen=True)
class Region:
    """An ordered set of distinct site indices (strictly increasing)."""

    sites: tuple[int, ...]

    def __post_init__(self):
        sites = tuple(int(s) for s in self.sites)
        object.__setattr__(self, "sites", sites)
        if len(sites) == 0:
            raise ValueError("region must contain at least one site")
        if any(s < 0 for s in sites):
            raise ValueError(f"negative site index in region {sites}")
        if any(a >= b for a, b in zip(sites, sites[1:])):
            raise ValueError(f"region sites must be strictly increasing, got {sites}")

    def __len__(self) -> int:
        return len(self.sites)

    def validate_for(self, num_sites: int) -> None:
        if self.sites[-1] >= num_sites:
            raise ValueError(f"region {self.sites} exceeds chain of {num_sites} sites")


@dataclass
class StateVector:
    """Dense amplitudes over the 2^L computational basis of an L-site chain."""

    num_sites: int
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        if self.num_sites < 1:
            raise ValueError(f"num_sites must be >= 1, got {self.num_sites}")
        if self.amplitudes.shape != (1 << self.num_sites,):
            raise ValueError(
                f"amplitude vector has length {self.amplitudes.shape}, "
                f"expected 2^{self.num_sites}"
            )

    def copy(self) -> "StateVector":
        return StateVector(self.num_sites, self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def pattern_bits(pattern: str, num_sites: int) -> np.ndarray:
    """Per-site base values (0 = up) for the given pattern."""
    if pattern == FERROMAGNETIC:
        return np.zeros(num_sites, dtype=np.int64)
    if pattern == ANTIFERROMAGNETIC:
        return np.arange(num_sites, dtype=np.int64) % 2
    if pattern == DOMAIN_WALL:
        if num_sites % 2 != 0:
            raise ValueError("domain-wall pattern requires an even number of sites")
        bits = np.zeros(num_sites, dtype=np.int64)
        bits[num_sites // 2 :] = 1  # wall at the center, up spins on the left half
        return bits
    raise ValueError(f"unknown pattern {pattern!r}")


def basis_state(num_sites: int, index: int) -> StateVector:
    """The computational basis state with the given index."""
    if not 0 <= index < (1 << num_sites):
        raise ValueError(f"basis index {index} out of range for {num_sites} sites")
    amps = np.zeros(1 << num_sites, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(num_sites, amps)


def build_initial_state(spec: ProductStateSpec, num_sites: int) -> StateVector:
    """Product state with each site prepared in R_y(theta)|b_i>.

    R_y(theta)|0> = cos(theta/2)|0> + sin(theta/2)|1> and
    R_y(theta)|1> = -sin(theta/2)|0> + cos(theta/2)|1>.
    """
    if num_sites < 1:
        raise ValueError(f"num_sites must be >= 1, got {num_sites}")
    bits = pattern_bits(spec.pattern, num_sites)
    c = math.cos(spec.tilt_angle / 2)
    s = math.sin(spec.tilt_angle / 2)
    up = np.array([c, s], dtype=np.complex128)
    down = np.array([-s, c], dtype=np.complex128)
    amps = np.ones(1, dtype=np.complex128)
    for k in range(num_sites - 1, -1, -1):
        # leading kron factor is the most significant bit, i.e. the highest site
        amps = np.kron(amps, down if bits[k] else up)
    return StateVector(num_sites, amps)


def tilt_gate(theta: float) -> np.ndarray:
    """Single-site R_y(theta) rotation matrix."""
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def apply_two_qubit_gate(state: StateVector, gate: np.ndarray, sites: tuple[int, int]) -> StateVector:
    """Apply a 4x4 unitary to the ordered site pair (i, j).

    The gate's basis is |q_i q_j> in the order 00, 01, 10, 11; the result is
    a new StateVector (the input is not mutated).
    """
    i, j = sites
    if i == j:
        raise ValueError("gate sites must be distinct")
    for q in (i, j):
        if not 0 <= q < state.num_sites:
            raise ValueError(f"site {q} out of range for {state.num_sites} sites")
    gate = np.ascontiguousarray(gate, dtype=np.complex128)
    if gate.shape != (4, 4):
        raise ValueError(f"two-qubit gate must be 4x4, got {gate.shape}")
    deviation = np.linalg.norm(gate.conj().T @ gate - np.eye(4))
    if deviation > _UNITARITY_TOL:
        raise ValueError(f"gate is not unitary (Frobenius deviation {deviation:.3e})")
    amps = state.amplitudes.copy()
    kernels.apply_two_qubit_inplace(amps, gate, i, j)
    return StateVector(state.num_sites, amps)


def overlap(a: StateVector, b: StateVector) -> complex:
    """Inner product <a|b> (conjugation on a)."""
    if a.num_sites != b.num_sites:
        raise ValueError(f"state sizes differ: {a.num_sites} vs {b.num_sites}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def random_state(num_sites: int, rng: np.random.Generator) -> StateVector:
    """Haar-random pure state (normalized complex Gaussian vector)."""
    dim = 1 << num_sites
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return StateVector(num_sites, v / np.linalg.norm(v))
