"""Unitary time evolution exp(-iHt)|psi> via two interchangeable backends.

The spectral backend diagonalizes the dense Hamiltonian once and then
evaluates any time, however late, at matrix-vector cost and without error
accumulation; it is the default for chains the dense cap admits. The Krylov
backend steps a Lanczos approximation of the short-time propagator and
scales to chain sizes where the dense matrix is out of reach. Real
symmetric Hamiltonians (every chain Hamiltonian built here is one) take a
real eigendecomposition path, which is severalfold faster than the complex
one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .analysis import TimeSeries
from .exceptions import ConvergenceError
from .observables import ProbeRequest, evaluate_probes
from .pauli import PauliSum, apply
from .states import StateVector

_HERMITICITY_TOL = 1e-8
_BREAKDOWN_TOL = 1e-13
_MAX_STEP_HALVINGS = 30
_TIME_CHUNK = 256


@dataclass
class SpectralPropagator:
    """Full eigendecomposition of a dense Hamiltonian (columns are states)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    L: int

    @property
    def dim(self) -> int:
        return 1 << self.L


@dataclass(frozen=True)
class KrylovConfig:
    """Lanczos stepping parameters: subspace size, step, local error target."""

    subspace_dim: int = 30
    dt: float = 0.05
    tol: float = 1e-10

    def __post_init__(self):
        if self.subspace_dim < 2:
            raise ValueError("Krylov subspace dimension must be >= 2")
        if self.dt <= 0:
            raise ValueError("Krylov step must be positive")
        if self.tol <= 0:
            raise ValueError("Krylov tolerance must be positive")


def build_spectral(h_dense: np.ndarray) -> SpectralPropagator:
    """Eigendecompose a dense Hermitian matrix.

    A matrix with exactly zero imaginary part is diagonalized in real
    arithmetic; the eigenvector matrix is then stored real.
    """
    h_dense = np.asarray(h_dense)
    if h_dense.ndim != 2 or h_dense.shape[0] != h_dense.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h_dense.shape}")
    dim = h_dense.shape[0]
    num_sites = int(dim).bit_length() - 1
    if (1 << num_sites) != dim:
        raise ValueError(f"matrix dimension {dim} is not a power of two")
    deviation = np.max(np.abs(h_dense - h_dense.conj().T))
    if deviation > _HERMITICITY_TOL:
        raise ValueError(f"matrix is not Hermitian (max deviation {deviation:.3e})")
    if np.iscomplexobj(h_dense) and not np.any(h_dense.imag):
        h_dense = h_dense.real
    eigenvalues, eigenvectors = np.linalg.eigh(h_dense)
    return SpectralPropagator(eigenvalues, eigenvectors, num_sites)


def _to_eigenbasis(prop: SpectralPropagator, amps: np.ndarray) -> np.ndarray:
    v = prop.eigenvectors
    if np.iscomplexobj(v):
        return v.conj().T @ amps
    return (v.T @ amps.real) + 1j * (v.T @ amps.imag)


def _from_eigenbasis(prop: SpectralPropagator, coeffs: np.ndarray) -> np.ndarray:
    v = prop.eigenvectors
    if np.iscomplexobj(v):
        return v @ coeffs
    return (v @ coeffs.real) + 1j * (v @ coeffs.imag)


def evolve_spectral(prop: SpectralPropagator, state: StateVector, t: float) -> StateVector:
    """V exp(-iEt) V^dagger |psi>."""
    if state.num_sites != prop.L:
        raise ValueError(f"state has {state.num_sites} sites, propagator {prop.L}")
    coeffs = _to_eigenbasis(prop, state.amplitudes)
    coeffs = np.exp(-1j * prop.eigenvalues * t) * coeffs
    return StateVector(prop.L, _from_eigenbasis(prop, coeffs))


def _evolve_spectral_batch(prop: SpectralPropagator, amps: np.ndarray, times: np.ndarray):
    """Yield (time, evolved amplitudes) for each requested time."""
    coeffs = _to_eigenbasis(prop, amps)
    for start in range(0, times.size, _TIME_CHUNK):
        chunk = times[start : start + _TIME_CHUNK]
        phases = np.exp(-1j * np.outer(prop.eigenvalues, chunk))
        block = _from_eigenbasis(prop, phases * coeffs[:, None])
        for col, t in enumerate(chunk):
            yield float(t), block[:, col]


def _lanczos_step(h: PauliSum, amps: np.ndarray, dt: float, m: int):
    """One Lanczos approximation of exp(-iH dt)|amps>; returns (result, error estimate)."""
    dim = amps.shape[0]
    m = min(m, dim)
    scale = float(np.linalg.norm(amps))
    if scale == 0.0:
        return amps.copy(), 0.0
    basis = np.empty((m, dim), dtype=np.complex128)
    alphas = np.zeros(m)
    betas = np.zeros(max(m - 1, 0))
    basis[0] = amps / scale
    w = apply(h, basis[0])
    alphas[0] = np.real(np.vdot(basis[0], w))
    w = w - alphas[0] * basis[0]
    used = 1
    residual = 0.0
    for j in range(1, m):
        beta = float(np.linalg.norm(w))
        if beta < _BREAKDOWN_TOL:
            break  # invariant subspace reached; the result is exact
        betas[j - 1] = beta
        basis[j] = w / beta
        w = apply(h, basis[j]) - beta * basis[j - 1]
        alphas[j] = np.real(np.vdot(basis[j], w))
        w = w - alphas[j] * basis[j]
        used = j + 1
    else:
        residual = float(np.linalg.norm(w))
    tridiag = np.diag(alphas[:used])
    if used > 1:
        tridiag += np.diag(betas[: used - 1], 1) + np.diag(betas[: used - 1], -1)
    small = scipy.linalg.expm(-1j * dt * tridiag)[:, 0]
    result = scale * (basis[:used].T @ small)
    error = abs(dt) * residual * abs(small[-1])
    return result, error


def evolve_krylov(
    h: PauliSum, state: StateVector, t: float, cfg: KrylovConfig | None = None
) -> StateVector:
    """Propagate by exp(-iHt) with fixed-size Lanczos steps.

    Steps of cfg.dt are halved (recursively, up to 30 levels) whenever the
    local error estimate exceeds cfg.tol; if halving cannot reach the
    tolerance a ConvergenceError reports the step diagnostics. The walk is
    deterministic for given inputs.
    """
    if t < 0:
        raise ValueError(f"time must be non-negative, got {t}")
    if cfg is None:
        cfg = KrylovConfig()
    if state.num_sites != h.L:
        raise ValueError(f"state has {state.num_sites} sites, Hamiltonian {h.L}")
    amps = state.amplitudes.copy()
    remaining = float(t)
    while remaining > 1e-12:
        step = min(cfg.dt, remaining)
        amps = _krylov_substep(h, amps, step, cfg, 0)
        remaining -= step
    return StateVector(h.L, amps)


def _krylov_substep(h: PauliSum, amps: np.ndarray, dt: float, cfg: KrylovConfig, depth: int):
    result, error = _lanczos_step(h, amps, dt, cfg.subspace_dim)
    if error <= cfg.tol:
        return result
    if depth >= _MAX_STEP_HALVINGS:
        raise ConvergenceError(
            f"Krylov step failed: local error {error:.3e} > {cfg.tol:.0e} at "
            f"dt={dt:.3e} with m={cfg.subspace_dim} after {depth} halvings"
        )
    half = _krylov_substep(h, amps, dt / 2, cfg, depth + 1)
    return _krylov_substep(h, half, dt / 2, cfg, depth + 1)


def trajectory(
    hamiltonian: PauliSum | SpectralPropagator,
    state0: StateVector,
    times: np.ndarray,
    probes: list[ProbeRequest],
    krylov_config: KrylovConfig | None = None,
) -> dict[str, TimeSeries]:
    """Evaluate probes along exp(-iHt)|state0> at the requested times.

    With a SpectralPropagator each time is computed independently from t=0
    (no error accumulation); with a PauliSum the state is stepped
    sequentially through the grid with the Krylov backend. Returns one
    TimeSeries per probe channel.
    """
    times = np.asarray(times, dtype=np.float64)
    if times.size == 0:
        raise ValueError("trajectory needs at least one time")
    if times[0] < 0 or np.any(np.diff(times) <= 0):
        raise ValueError("times must be strictly increasing and start at t >= 0")
    if not probes:
        raise ValueError("trajectory needs at least one probe")

    channels: dict[str, list[float]] = {}

    def record(state: StateVector):
        for name, value in evaluate_probes(state, probes).items():
            channels.setdefault(name, []).append(value)

    if isinstance(hamiltonian, SpectralPropagator):
        if state0.num_sites != hamiltonian.L:
            raise ValueError("state and propagator sizes differ")
        for _, amps in _evolve_spectral_batch(hamiltonian, state0.amplitudes, times):
            record(StateVector(hamiltonian.L, amps))
    else:
        cfg = krylov_config or KrylovConfig()
        current = state0
        previous_t = 0.0
        for t in times:
            span = float(t) - previous_t
            if span > 0:
                current = evolve_krylov(hamiltonian, current, span, cfg)
            previous_t = float(t)
            record(current)

    return {name: TimeSeries(times.copy(), np.array(vals)) for name, vals in channels.items()}
