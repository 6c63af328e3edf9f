"""Brick-wall random circuit engine with seeded, parallel ensemble averaging.

Each time unit applies an even layer (pairs (0,1), (2,3), ...) followed by
an odd layer (pairs (1,2), (3,4), ..., (L-1,0)); boundaries are periodic.
Every gate is independently a fully Haar-random two-qubit unitary with
probability ``p_haar``, otherwise a charge-conserving block gate: a phase
on |00>, a 2x2 Haar block on span{|01>, |10>}, a phase on |11>.

Randomness is splittable and keyed by (master_seed, realization, layer,
gate slot), so every gate draw is independent of execution order and of the
parallel schedule, and any single realization can be reproduced in
isolation.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial

import numpy as np

from . import kernels
from .analysis import TimeSeries
from .observables import ProbeRequest, evaluate_probes
from .states import ProductStateSpec, StateVector, build_initial_state

GATE_U1 = "u1-symmetric"
GATE_HAAR = "haar"

_TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class CircuitConfig:
    """Geometry, doping, depth and seeding of a circuit ensemble."""

    L: int
    p_haar: float
    depth_units: int
    master_seed: int
    n_realizations: int

    def __post_init__(self):
        if self.L < 2 or self.L % 2 != 0:
            raise ValueError(f"brick-wall pairing needs even L >= 2, got {self.L}")
        if not 0.0 <= self.p_haar <= 1.0:
            raise ValueError(f"p_haar must lie in [0, 1], got {self.p_haar}")
        if self.depth_units < 0:
            raise ValueError(f"depth_units must be >= 0, got {self.depth_units}")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")
        if self.n_realizations < 1:
            raise ValueError(f"n_realizations must be >= 1, got {self.n_realizations}")


@dataclass
class EnsembleSeries:
    """Per-time-unit ensemble mean and standard error over realizations."""

    times: np.ndarray
    mean: np.ndarray
    std_error: np.ndarray
    n: int

    def __post_init__(self):
        self.times = np.asarray(self.times)
        self.mean = np.asarray(self.mean, dtype=np.float64)
        self.std_error = np.asarray(self.std_error, dtype=np.float64)
        if not (self.times.shape == self.mean.shape == self.std_error.shape):
            raise ValueError("times, mean and std_error must have equal length")
        if np.any(self.std_error < 0):
            raise ValueError("standard errors must be non-negative")


def sample_haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary: complex Ginibre, QR, R-diagonal phases fixed."""
    if dim not in (2, 4):
        raise ValueError(f"gate dimension must be 2 or 4, got {dim}")
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def sample_u1_gate(rng: np.random.Generator) -> np.ndarray:
    """Charge-conserving two-qubit gate, block-diagonal in (|00>,|01>,|10>,|11>)."""
    gate = np.zeros((4, 4), dtype=np.complex128)
    gate[0, 0] = np.exp(1j * rng.uniform(0.0, _TWO_PI))
    gate[1:3, 1:3] = sample_haar_unitary(2, rng)
    gate[3, 3] = np.exp(1j * rng.uniform(0.0, _TWO_PI))
    return gate


def layer_pairs(L: int, parity: str) -> list[tuple[int, int]]:
    """Site pairs of one brick-wall layer (periodic wrap on the odd layer)."""
    if L % 2 != 0:
        raise ValueError(f"brick-wall pairing needs even L, got {L}")
    if parity == "even":
        return [(j, j + 1) for j in range(0, L, 2)]
    if parity == "odd":
        return [(j, (j + 1) % L) for j in range(1, L, 2)]
    raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")


def build_layer(L, parity, p_haar, rng):
    """Sample one layer as a list of (sites, kind, matrix).

    ``rng`` is either a single Generator (slots draw from it sequentially)
    or a sequence of L/2 Generators, one per gate slot.
    """
    pairs = layer_pairs(L, parity)
    if isinstance(rng, np.random.Generator):
        streams = [rng] * len(pairs)
    else:
        streams = list(rng)
        if len(streams) != len(pairs):
            raise ValueError(f"need {len(pairs)} per-slot generators, got {len(streams)}")
    layer = []
    for sites, stream in zip(pairs, streams):
        if stream.uniform() < p_haar:
            layer.append((sites, GATE_HAAR, sample_haar_unitary(4, stream)))
        else:
            layer.append((sites, GATE_U1, sample_u1_gate(stream)))
    return layer


def gate_stream(master_seed: int, realization: int, layer_index: int, slot: int):
    """The dedicated random stream of one gate slot."""
    seq = np.random.SeedSequence(master_seed, spawn_key=(realization, layer_index, slot))
    return np.random.default_rng(seq)


def run_realization(
    config: CircuitConfig,
    initial: StateVector,
    probes: list[ProbeRequest],
    realization_index: int,
) -> dict[str, TimeSeries]:
    """One seeded circuit realization, probed at t = 0 and after every unit."""
    if initial.num_sites != config.L:
        raise ValueError(f"initial state has {initial.num_sites} sites, config {config.L}")
    if not 0 <= realization_index < config.n_realizations:
        raise ValueError(f"realization index {realization_index} out of range")
    amps = initial.amplitudes.copy()
    slots = config.L // 2
    channels: dict[str, list[float]] = {}

    def record():
        state = StateVector(config.L, amps)
        for name, value in evaluate_probes(state, probes).items():
            channels.setdefault(name, []).append(value)

    record()
    for unit in range(config.depth_units):
        for half, parity in enumerate(("even", "odd")):
            layer_index = 2 * unit + half
            streams = [
                gate_stream(config.master_seed, realization_index, layer_index, s)
                for s in range(slots)
            ]
            for (i, j), _, matrix in build_layer(config.L, parity, config.p_haar, streams):
                kernels.apply_two_qubit_inplace(amps, matrix, i, j)
        record()

    times = np.arange(config.depth_units + 1, dtype=np.float64)
    return {name: TimeSeries(times.copy(), np.array(vals)) for name, vals in channels.items()}


def _realization_values(config, initial_spec, probes, index):
    initial = build_initial_state(initial_spec, config.L)
    series = run_realization(config, initial, probes, index)
    return {name: ts.values for name, ts in series.items()}


def ensemble_average(
    config: CircuitConfig,
    initial_spec: ProductStateSpec,
    probes: list[ProbeRequest],
    n_workers: int = 1,
) -> dict[str, EnsembleSeries]:
    """Mean and standard error of each probe channel over all realizations.

    Realizations run independently (optionally in parallel worker
    processes); aggregation always happens in realization-index order, so
    the output is bit-identical for any worker count. A failed realization
    aborts the whole ensemble.
    """
    if config.n_realizations < 2:
        raise ValueError("ensemble averaging needs n_realizations >= 2")
    if n_workers < 1:
        raise ValueError(f"n_workers must be >= 1, got {n_workers}")
    worker = partial(_realization_values, config, initial_spec, probes)
    indices = range(config.n_realizations)
    if n_workers == 1:
        results = [worker(i) for i in indices]
    else:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            results = list(pool.map(worker, indices, chunksize=4))

    times = np.arange(config.depth_units + 1, dtype=np.int64)
    out: dict[str, EnsembleSeries] = {}
    for name in results[0]:
        stacked = np.vstack([r[name] for r in results])
        mean = np.mean(stacked, axis=0)
        sem = np.std(stacked, axis=0, ddof=1) / np.sqrt(config.n_realizations)
        out[name] = EnsembleSeries(times.copy(), mean, sem, config.n_realizations)
    return out
