"""Spin-chain Hamiltonians as Pauli-string sums with matrix-free application.

The chain Hamiltonian is

    H = -(1/4) sum_j [ X_j X_{j+1} + gamma Y_j Y_{j+1} + delta1 Z_j Z_{j+1} ]
        - delta2 sum_j [ X_j X_{j+2} + Y_j Y_{j+2} + Z_j Z_{j+2} ]

with periodic boundaries. ``gamma`` tunes the U(1) (total sigma^z) breaking:
the charge commutes with H exactly when gamma = 1. Note the next-nearest
line carries a bare -delta2 prefactor, not -delta2/4; pass ``nnn_prefactor``
to :func:`build_hamiltonian` to rescale it if a different convention is
needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse.linalg as spla

from . import kernels
from .exceptions import ConvergenceError
from .states import Region, StateVector

AXES = ("x", "y", "z")

DENSE_SITE_CAP = 14

_GROUND_STATE_MAXITER = 5000
_GROUND_STATE_RESIDUAL = 1e-8


@dataclass(frozen=True)
class PauliString:
    """A weighted product of single-site Pauli operators."""

    coefficient: float
    factors: tuple[tuple[int, str], ...]

    def __post_init__(self):
        if not math.isfinite(self.coefficient):
            raise ValueError(f"coefficient must be finite, got {self.coefficient}")
        factors = tuple((int(s), a) for s, a in self.factors)
        object.__setattr__(self, "factors", factors)
        sites = [s for s, _ in factors]
        if len(set(sites)) != len(sites):
            raise ValueError(f"repeated site in Pauli string {factors}")
        if any(s < 0 for s in sites):
            raise ValueError(f"negative site index in Pauli string {factors}")
        if any(a not in AXES for _, a in factors):
            raise ValueError(f"axes must be in {AXES}, got {factors}")


@dataclass(frozen=True)
class HamiltonianParams:
    """Couplings of the chain Hamiltonian above."""

    L: int
    gamma: float
    delta1: float = 0.4
    delta2: float = 0.0
    periodic: bool = True

    def __post_init__(self):
        if self.periodic and self.L < 3:
            raise ValueError("periodic chains need L >= 3 (L = 2 double-counts the bond)")
        if not self.periodic and self.L < 2:
            raise ValueError("open chains need L >= 2")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must lie in [0, 1], got {self.gamma}")
        for name in ("gamma", "delta1", "delta2"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")


@dataclass
class PauliSum:
    """A Hermitian operator as a list of real-weighted Pauli strings."""

    L: int
    terms: tuple[PauliString, ...]
    _compiled: tuple | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.terms = tuple(self.terms)
        for t in self.terms:
            for s, _ in t.factors:
                if s >= self.L:
                    raise ValueError(f"site {s} out of range for L={self.L}")

    @property
    def dim(self) -> int:
        return 1 << self.L

    def compiled(self):
        """Bit-mask encoding (coeffs with i^{#Y} folded in, flip masks, sign masks)."""
        if self._compiled is None:
            n = len(self.terms)
            coeffs = np.empty(n, dtype=np.complex128)
            flips = np.zeros(n, dtype=np.uint64)
            signs = np.zeros(n, dtype=np.uint64)
            for k, t in enumerate(self.terms):
                xmask = ymask = zmask = 0
                for site, axis in t.factors:
                    bit = 1 << site
                    if axis == "x":
                        xmask |= bit
                    elif axis == "y":
                        ymask |= bit
                    else:
                        zmask |= bit
                ny = bin(ymask).count("1")
                coeffs[k] = t.coefficient * (1j) ** ny
                flips[k] = xmask | ymask
                signs[k] = ymask | zmask
            self._compiled = (coeffs, flips, signs)
        return self._compiled


def build_hamiltonian(params: HamiltonianParams, *, nnn_prefactor: float = 1.0) -> PauliSum:
    """The chain Hamiltonian for the given couplings (see module docstring)."""
    L = params.L
    bonds = L if params.periodic else L - 1
    terms = []
    for j in range(bonds):
        k = (j + 1) % L
        terms.append(PauliString(-0.25, ((j, "x"), (k, "x"))))
        terms.append(PauliString(-0.25 * params.gamma, ((j, "y"), (k, "y"))))
        terms.append(PauliString(-0.25 * params.delta1, ((j, "z"), (k, "z"))))
    if params.delta2 != 0.0:
        coeff = -params.delta2 * nnn_prefactor
        nnn_bonds = L if params.periodic else L - 2
        for j in range(nnn_bonds):
            k = (j + 2) % L
            for axis in AXES:
                terms.append(PauliString(coeff, ((j, axis), (k, axis))))
    return PauliSum(L, tuple(terms))


def build_charge_operator(L: int, region: Region) -> PauliSum:
    """Sum of sigma^z over the region, with unit coefficients."""
    region.validate_for(L)
    return PauliSum(L, tuple(PauliString(1.0, ((s, "z"),)) for s in region.sites))


def _as_array(state: StateVector | np.ndarray, L: int) -> np.ndarray:
    amps = state.amplitudes if isinstance(state, StateVector) else np.asarray(state)
    if amps.shape != (1 << L,):
        raise ValueError(f"state has dimension {amps.shape}, expected 2^{L}")
    return np.ascontiguousarray(amps, dtype=np.complex128)


def apply(pauli_sum: PauliSum, state: StateVector | np.ndarray) -> np.ndarray:
    """Matrix-free H|psi>: X flips a bit, Y flips with an i*(-1)^bit phase,
    Z multiplies by (-1)^bit."""
    amps = _as_array(state, pauli_sum.L)
    coeffs, flips, signs = pauli_sum.compiled()
    out = np.zeros_like(amps)
    kernels.pauli_matvec(coeffs, flips, signs, amps, out)
    return out


def expectation_value(pauli_sum: PauliSum, state: StateVector) -> float:
    """<psi|H|psi>, real for Hermitian H."""
    amps = _as_array(state, pauli_sum.L)
    return float(np.real(np.vdot(amps, apply(pauli_sum, amps))))


def materialize_dense(pauli_sum: PauliSum, *, max_sites: int = DENSE_SITE_CAP) -> np.ndarray:
    """Dense 2^L x 2^L matrix of the operator (guarded by a site cap)."""
    if pauli_sum.L > max_sites:
        raise ValueError(
            f"dense materialization capped at {max_sites} sites, got L={pauli_sum.L}"
        )
    dim = pauli_sum.dim
    coeffs, flips, signs = pauli_sum.compiled()
    idx = np.arange(dim, dtype=np.uint64)
    mat = np.zeros((dim, dim), dtype=np.complex128)
    for c, f, s in zip(coeffs, flips, signs):
        parity = np.bitwise_count(idx & s) & np.uint64(1)
        vals = c * (1.0 - 2.0 * parity.astype(np.float64))
        mat[(idx ^ f).astype(np.intp), idx.astype(np.intp)] += vals
    return mat


def commutator_frobenius(a: PauliSum, b: PauliSum, *, max_sites: int = DENSE_SITE_CAP) -> float:
    """Frobenius norm of [A, B], evaluated densely (small L only)."""
    if a.L != b.L:
        raise ValueError(f"operator sizes differ: {a.L} vs {b.L}")
    ma = materialize_dense(a, max_sites=max_sites)
    mb = materialize_dense(b, max_sites=max_sites)
    return float(np.linalg.norm(ma @ mb - mb @ ma))


def ground_state(
    pauli_sum: PauliSum, *, maxiter: int = _GROUND_STATE_MAXITER
) -> tuple[float, StateVector]:
    """Lowest eigenpair via an iterative solver on the matrix-free apply.

    Raises ConvergenceError if the solver stalls or the residual
    ||Hv - Ev|| ends up above 1e-8. For degenerate ground spaces any vector
    satisfying the residual bound may be returned.
    """
    dim = pauli_sum.dim
    if dim <= 4:
        mat = materialize_dense(pauli_sum)
        energies, vectors = np.linalg.eigh(mat)
        energy, vec = float(energies[0]), vectors[:, 0]
    else:
        op = spla.LinearOperator(
            (dim, dim), matvec=lambda v: apply(pauli_sum, v), dtype=np.complex128
        )
        try:
            energies, vectors = spla.eigsh(op, k=1, which="SA", maxiter=maxiter)
        except spla.ArpackNoConvergence as exc:
            raise ConvergenceError(
                f"ground-state solver did not converge within {maxiter} iterations: {exc}"
            ) from exc
        energy, vec = float(energies[0]), vectors[:, 0]
    vec = vec / np.linalg.norm(vec)
    residual = float(np.linalg.norm(apply(pauli_sum, vec) - energy * vec))
    if residual > _GROUND_STATE_RESIDUAL:
        raise ConvergenceError(
            f"ground-state residual {residual:.3e} exceeds {_GROUND_STATE_RESIDUAL:.0e}"
        )
    return energy, StateVector(pauli_sum.L, vec)
