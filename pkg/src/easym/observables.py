"""Measurement layer: reduced density matrices, entropies, sector dephasing,
entanglement asymmetry, and charge statistics.

Entanglement asymmetry of a region is S(rho_Q) - S(rho), where rho is the
reduced density matrix and rho_Q its block-diagonal part in the eigenbasis
of the region charge (U(1): total sigma^z over the region; Z2: sigma^z
parity). It vanishes exactly when rho already commutes with the charge.
Entropies use the natural logarithm throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .states import Region, StateVector

_EIG_FLOOR = 1e-12
_NEG_EIG_HARD = 1e-8
_EA_CLAMP = 1e-9

# weight tables stay cached only where they are small
_CACHE_SITE_LIMIT = 20


@dataclass(frozen=True)
class SymmetryProbe:
    """Which region charge defines the dephasing sectors."""

    kind: str

    def __post_init__(self):
        if self.kind not in ("u1", "z2"):
            raise ValueError(f"probe kind must be 'u1' or 'z2', got {self.kind!r}")


U1 = SymmetryProbe("u1")
Z2 = SymmetryProbe("z2")


@dataclass
class DensityMatrix:
    """Dense Hermitian density matrix of an n-site subsystem."""

    n_sites: int
    entries: np.ndarray

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=np.complex128)
        dim = 1 << self.n_sites
        if self.entries.shape != (dim, dim):
            raise ValueError(
                f"density matrix shape {self.entries.shape} does not match {self.n_sites} sites"
            )


@lru_cache(maxsize=64)
def _hamming_weights(n_sites: int) -> np.ndarray:
    idx = np.arange(1 << n_sites, dtype=np.uint64)
    return np.bitwise_count(idx).astype(np.int64)


def _charge_diagonal(num_sites: int, sites: tuple[int, ...]) -> np.ndarray:
    """Eigenvalues of sum_{i in sites} sigma_i^z on the full basis."""
    if num_sites <= _CACHE_SITE_LIMIT:
        return _charge_diagonal_cached(num_sites, sites)
    return _charge_diagonal_raw(num_sites, sites)


@lru_cache(maxsize=64)
def _charge_diagonal_cached(num_sites: int, sites: tuple[int, ...]) -> np.ndarray:
    return _charge_diagonal_raw(num_sites, sites)


def _charge_diagonal_raw(num_sites: int, sites: tuple[int, ...]) -> np.ndarray:
    mask = np.uint64(sum(1 << s for s in sites))
    idx = np.arange(1 << num_sites, dtype=np.uint64)
    ones = np.bitwise_count(idx & mask).astype(np.float64)
    return len(sites) - 2.0 * ones


def reduced_density_matrix(state: StateVector, region: Region) -> DensityMatrix:
    """Partial trace over the complement of the region.

    The result's basis compacts the region sites in ascending order, the
    first (lowest) region site becoming the least significant bit.
    """
    region.validate_for(state.num_sites)
    L, n = state.num_sites, len(region)
    psi = state.amplitudes.reshape((2,) * L)
    # numpy axis a of the reshaped tensor holds site L-1-a
    keep = [L - 1 - s for s in reversed(region.sites)]
    keep_set = set(keep)
    rest = [a for a in range(L) if a not in keep_set]
    block = np.transpose(psi, keep + rest).reshape(1 << n, -1)
    rho = block @ block.conj().T
    return DensityMatrix(n, rho)


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """-sum(lambda ln lambda) over the spectrum (natural log).

    Eigenvalues below 1e-12 contribute zero; an eigenvalue below -1e-8
    means the input is not a valid density matrix and raises.
    """
    eigenvalues = np.linalg.eigvalsh(rho.entries)
    if eigenvalues[0] < -_NEG_EIG_HARD:
        raise ValueError(f"density matrix has eigenvalue {eigenvalues[0]:.3e} < -1e-8")
    positive = eigenvalues[eigenvalues > _EIG_FLOOR]
    return float(-np.sum(positive * np.log(positive)))


def sector_project(rho: DensityMatrix, probe: SymmetryProbe) -> DensityMatrix:
    """Dephase to the block-diagonal part in the charge eigenbasis.

    U(1) keeps entries whose Hamming weights agree; Z2 keeps entries whose
    weight parities agree. Trace and Hermiticity are preserved exactly.
    """
    w = _hamming_weights(rho.n_sites)
    if probe.kind == "u1":
        keep = w[:, None] == w[None, :]
    else:
        keep = ((w[:, None] ^ w[None, :]) & 1) == 0
    return DensityMatrix(rho.n_sites, np.where(keep, rho.entries, 0.0))


def _asymmetry_of(rho: DensityMatrix, probe: SymmetryProbe) -> float:
    rho_q = sector_project(rho, probe)
    if np.array_equal(rho_q.entries, rho.entries):
        return 0.0
    delta = von_neumann_entropy(rho_q) - von_neumann_entropy(rho)
    if delta < 0.0:
        if delta < -_EA_CLAMP:
            raise RuntimeError(
                f"entanglement asymmetry {delta:.3e} below -{_EA_CLAMP:.0e}; "
                "eigensolver output is not trustworthy"
            )
        return 0.0
    return float(delta)


def entanglement_asymmetry(state: StateVector, region: Region, probe: SymmetryProbe) -> float:
    """S(rho_Q) - S(rho) for the region; exactly 0.0 when dephasing is a no-op."""
    return _asymmetry_of(reduced_density_matrix(state, region), probe)


def charge_moments(state: StateVector, region: Region) -> tuple[float, float]:
    """Mean and variance of the region charge sum_{i in region} sigma_i^z.

    The charge is diagonal in the computational basis, so no operator is
    materialized: Q|x> = (n - 2 wt(x|region)) |x>.
    """
    region.validate_for(state.num_sites)
    q = _charge_diagonal(state.num_sites, region.sites)
    p = np.abs(state.amplitudes) ** 2
    mean = float(p @ q)
    variance = float(p @ (q * q)) - mean * mean
    if variance < 0.0:
        if variance < -1e-12:
            raise RuntimeError(f"charge variance {variance:.3e} below -1e-12")
        variance = 0.0
    return mean, variance


def charge_distribution(state: StateVector) -> dict[int, float]:
    """Probability of each total-charge sector Q in {-L, -L+2, ..., +L}.

    P_Q sums |amplitude|^2 over basis states of Hamming weight w with
    L - 2w = Q; the probabilities sum to one.
    """
    L = state.num_sites
    w = _hamming_weights(L)
    p = np.abs(state.amplitudes) ** 2
    per_weight = np.bincount(w, weights=p, minlength=L + 1)
    return {L - 2 * k: float(per_weight[k]) for k in range(L, -1, -1)}


PROBE_KINDS = ("ea_u1", "ea_z2", "ee", "eeq", "cv", "qmean", "pq")
_REGION_KINDS = ("ea_u1", "ea_z2", "ee", "eeq")


@dataclass(frozen=True)
class ProbeRequest:
    """A named observable evaluated along a trajectory.

    Kinds: ea_u1 / ea_z2 (entanglement asymmetry of the region), ee / eeq
    (region entropy, plain and U(1)-dephased), cv / qmean (full-chain charge
    variance and mean), pq (full-chain charge-sector distribution).
    """

    kind: str
    region: Region | None = None

    def __post_init__(self):
        if self.kind not in PROBE_KINDS:
            raise ValueError(f"unknown probe kind {self.kind!r}; expected one of {PROBE_KINDS}")
        if self.kind in _REGION_KINDS and self.region is None:
            raise ValueError(f"probe {self.kind!r} needs a region")


def evaluate_probes(state: StateVector, probes: list[ProbeRequest]) -> dict[str, float]:
    """Evaluate all probes on one state, returning named scalar channels.

    The pq probe expands into one channel per charge sector, named
    ``pq:q=<Q>``. Reduced density matrices are shared between probes that
    target the same region.
    """
    out: dict[str, float] = {}
    rdm_cache: dict[tuple[int, ...], DensityMatrix] = {}

    def rdm(region: Region) -> DensityMatrix:
        key = region.sites
        if key not in rdm_cache:
            rdm_cache[key] = reduced_density_matrix(state, region)
        return rdm_cache[key]

    full = Region(tuple(range(state.num_sites)))
    for probe in probes:
        if probe.kind == "ea_u1" or probe.kind == "ea_z2":
            which = U1 if probe.kind == "ea_u1" else Z2
            out[probe.kind] = _asymmetry_of(rdm(probe.region), which)
        elif probe.kind == "ee":
            out["ee"] = von_neumann_entropy(rdm(probe.region))
        elif probe.kind == "eeq":
            out["eeq"] = von_neumann_entropy(sector_project(rdm(probe.region), U1))
        elif probe.kind == "cv":
            out["cv"] = charge_moments(state, full)[1]
        elif probe.kind == "qmean":
            out["qmean"] = charge_moments(state, full)[0]
        elif probe.kind == "pq":
            for q, prob in charge_distribution(state).items():
                out[f"pq:q={q:+d}"] = prob
    return out
