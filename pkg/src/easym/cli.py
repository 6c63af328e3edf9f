"""Batch experiment runner and data emitter.

``easym run <config> --out <dir>`` executes one experiment described by a
JSON config (or a preset name) and writes one CSV per probe plus a
``summary.json`` carrying the resolved config echo, analysis outputs and
provenance. Re-running from the echoed config reproduces every numeric
output bit-identically. Exit codes: 0 success, 2 config error, 3 numerical
failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__, analytic, kernels
from .analysis import (
    DEFAULT_MIN_PERSISTENCE,
    TimeSeries,
    classify_early_growth,
    detect_crossing,
    find_peak,
    late_time_average,
    linear_fit_extrapolate,
    power_law_fit,
)
from .circuit import CircuitConfig, EnsembleSeries, ensemble_average
from .evolution import KrylovConfig, build_spectral, trajectory
from .exceptions import ConfigError, ConvergenceError
from .observables import ProbeRequest
from .pauli import (
    DENSE_SITE_CAP,
    HamiltonianParams,
    build_hamiltonian,
    ground_state,
    materialize_dense,
)
from .states import DOMAIN_WALL, PATTERNS, ProductStateSpec, Region, build_initial_state

MODES = ("quench", "circuit", "ground-state", "analyze")

# normative probe names (config surface) -> internal channel kinds
PROBE_NAMES = {
    "ea-u1": "ea_u1",
    "ea-z2": "ea_z2",
    "cv": "cv",
    "qmean": "qmean",
    "pq": "pq",
    "ee": "ee",
    "eeq": "eeq",
}

ANALYSIS_KINDS = ("peak", "late-average", "crossing", "classify", "powerlaw", "finite-size")

SPECTRAL_MAX_SITES = 12
DEFAULT_HORIZON_CAP = 10.0

SEED_RULE = (
    "gate stream = default_rng(SeedSequence(master_seed, "
    "spawn_key=(realization, layer, slot)))"
)


@dataclass
class ExperimentConfig:
    """Validated experiment description (see README for the JSON schema)."""

    mode: str
    hamiltonian: HamiltonianParams | None = None
    circuit: CircuitConfig | None = None
    initial: ProductStateSpec | None = None
    region_spec: str | tuple[int, ...] | None = None
    probes: tuple[str, ...] = ()
    t_max: float | None = None
    dt: float | None = None
    late_window: tuple[float, float, int] | None = None
    backend: str = "auto"
    krylov: KrylovConfig = field(default_factory=KrylovConfig)
    nnn_prefactor: float = 1.0
    emit_cv_reference: bool = False
    analyses: tuple[dict, ...] = ()
    series_inputs: dict[str, str] = field(default_factory=dict)

    @staticmethod
    def from_dict(raw: dict) -> "ExperimentConfig":
        try:
            return _parse_config(raw)
        except ConfigError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    def to_dict(self) -> dict:
        """Fully resolved echo; feeding it back reproduces the run."""
        out: dict = {"mode": self.mode, "backend": self.backend}
        if self.hamiltonian is not None:
            h = self.hamiltonian
            out["hamiltonian"] = {
                "L": h.L,
                "gamma": h.gamma,
                "delta1": h.delta1,
                "delta2": h.delta2,
                "periodic": h.periodic,
            }
            if self.nnn_prefactor != 1.0:
                out["nnn_prefactor"] = self.nnn_prefactor
        if self.circuit is not None:
            c = self.circuit
            out["circuit"] = {
                "L": c.L,
                "p_haar": c.p_haar,
                "depth_units": c.depth_units,
                "master_seed": c.master_seed,
                "n_realizations": c.n_realizations,
            }
        if self.initial is not None:
            out["initial"] = {
                "pattern": self.initial.pattern,
                "tilt_angle": self.initial.tilt_angle,
            }
        if self.region_spec is not None:
            region = self.region_spec
            out["region"] = list(region) if isinstance(region, tuple) else region
        if self.probes:
            out["probes"] = list(self.probes)
        if self.t_max is not None:
            out["time_grid"] = {"t_max": self.t_max, "dt": self.dt}
        if self.late_window is not None:
            out["late_window"] = list(self.late_window)
        if self.mode == "quench" and self.backend != "spectral":
            out["krylov"] = {
                "subspace_dim": self.krylov.subspace_dim,
                "dt": self.krylov.dt,
                "tol": self.krylov.tol,
            }
        if self.emit_cv_reference:
            out["emit_cv_reference"] = True
        if self.analyses:
            out["analysis"] = [dict(a) for a in self.analyses]
        if self.series_inputs:
            out["series"] = dict(self.series_inputs)
        return out


def _parse_config(raw: dict) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    known = {
        "mode",
        "hamiltonian",
        "circuit",
        "initial",
        "region",
        "probes",
        "time_grid",
        "late_window",
        "backend",
        "krylov",
        "nnn_prefactor",
        "emit_cv_reference",
        "analysis",
        "series",
    }
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    mode = raw.get("mode")
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}, got {mode!r}")

    cfg = ExperimentConfig(mode=mode)

    if "hamiltonian" in raw:
        h = dict(raw["hamiltonian"])
        cfg.hamiltonian = HamiltonianParams(
            L=int(h.pop("L")),
            gamma=float(h.pop("gamma")),
            delta1=float(h.pop("delta1", 0.4)),
            delta2=float(h.pop("delta2", 0.0)),
            periodic=bool(h.pop("periodic", True)),
        )
        if h:
            raise ConfigError(f"unknown hamiltonian keys: {sorted(h)}")
    if "circuit" in raw:
        c = dict(raw["circuit"])
        cfg.circuit = CircuitConfig(
            L=int(c.pop("L")),
            p_haar=float(c.pop("p_haar")),
            depth_units=int(c.pop("depth_units")),
            master_seed=int(c.pop("master_seed")),
            n_realizations=int(c.pop("n_realizations")),
        )
        if c:
            raise ConfigError(f"unknown circuit keys: {sorted(c)}")
    if "initial" in raw:
        i = dict(raw["initial"])
        pattern = str(i.pop("pattern"))
        if pattern not in PATTERNS:
            raise ConfigError(f"initial.pattern must be one of {PATTERNS}, got {pattern!r}")
        cfg.initial = ProductStateSpec(pattern, float(i.pop("tilt_angle", 0.0)))
        if i:
            raise ConfigError(f"unknown initial keys: {sorted(i)}")
    if "region" in raw:
        region = raw["region"]
        if isinstance(region, str):
            if region not in ("third", "quarter"):
                raise ConfigError(f"region shorthand must be 'third' or 'quarter', got {region!r}")
            cfg.region_spec = region
        else:
            cfg.region_spec = tuple(int(s) for s in region)
    if "probes" in raw:
        names = [str(p).lower() for p in raw["probes"]]
        bad = [p for p in names if p not in PROBE_NAMES]
        if bad:
            raise ConfigError(f"unknown probes {bad}; expected {sorted(PROBE_NAMES)}")
        if len(set(names)) != len(names):
            raise ConfigError("duplicate probes in config")
        cfg.probes = tuple(names)
    if "time_grid" in raw:
        grid = dict(raw["time_grid"])
        cfg.t_max = float(grid.pop("t_max"))
        cfg.dt = float(grid.pop("dt"))
        if grid:
            raise ConfigError(f"unknown time_grid keys: {sorted(grid)}")
        if cfg.t_max <= 0 or cfg.dt <= 0 or cfg.dt > cfg.t_max:
            raise ConfigError(f"need 0 < dt <= t_max, got dt={cfg.dt}, t_max={cfg.t_max}")
    if "late_window" in raw:
        t1, t2, n = raw["late_window"]
        cfg.late_window = (float(t1), float(t2), int(n))
        if not (0 <= t1 < t2) or int(n) < 10:
            raise ConfigError(f"late_window needs 0 <= t1 < t2 and >= 10 samples, got {raw['late_window']}")
    cfg.backend = str(raw.get("backend", "auto"))
    if cfg.backend not in ("auto", "spectral", "krylov"):
        raise ConfigError(f"backend must be auto, spectral or krylov, got {cfg.backend!r}")
    if "krylov" in raw:
        k = dict(raw["krylov"])
        cfg.krylov = KrylovConfig(
            subspace_dim=int(k.pop("subspace_dim", 30)),
            dt=float(k.pop("dt", 0.05)),
            tol=float(k.pop("tol", 1e-10)),
        )
        if k:
            raise ConfigError(f"unknown krylov keys: {sorted(k)}")
    cfg.nnn_prefactor = float(raw.get("nnn_prefactor", 1.0))
    cfg.emit_cv_reference = bool(raw.get("emit_cv_reference", False))
    if "analysis" in raw:
        analyses = []
        for req in raw["analysis"]:
            req = dict(req)
            kind = req.get("kind")
            if kind not in ANALYSIS_KINDS:
                raise ConfigError(f"unknown analysis kind {kind!r}; expected {ANALYSIS_KINDS}")
            analyses.append(req)
        cfg.analyses = tuple(analyses)
    if "series" in raw:
        cfg.series_inputs = {str(k): str(v) for k, v in raw["series"].items()}

    _check_mode_requirements(cfg)
    return cfg


def _check_mode_requirements(cfg: ExperimentConfig) -> None:
    if cfg.mode == "quench":
        missing = [
            name
            for name, val in (
                ("hamiltonian", cfg.hamiltonian),
                ("initial", cfg.initial),
                ("time_grid", cfg.t_max),
            )
            if val is None
        ]
        if missing:
            raise ConfigError(f"quench mode requires {missing}")
        if not cfg.probes:
            raise ConfigError("quench mode requires a nonempty probe list")
    elif cfg.mode == "circuit":
        if cfg.circuit is None or cfg.initial is None:
            raise ConfigError("circuit mode requires 'circuit' and 'initial'")
        if not cfg.probes:
            raise ConfigError("circuit mode requires a nonempty probe list")
    elif cfg.mode == "ground-state":
        if cfg.hamiltonian is None:
            raise ConfigError("ground-state mode requires 'hamiltonian'")
        if not cfg.probes:
            raise ConfigError("ground-state mode requires a nonempty probe list")
    elif cfg.mode == "analyze":
        if not cfg.series_inputs:
            raise ConfigError("analyze mode requires a 'series' mapping")
        if not cfg.analyses:
            raise ConfigError("analyze mode requires analysis requests")
    region_kinds = {"ea-u1", "ea-z2", "ee", "eeq"}
    if any(p in region_kinds for p in cfg.probes) and cfg.region_spec is None:
        raise ConfigError("region-resolved probes need a 'region' entry")


def resolve_region(spec, L: int, pattern: str | None) -> Region:
    """Turn a shorthand or explicit site list into a Region.

    Shorthands take floor(L/3) or floor(L/4) sites starting at site 0; for
    a domain-wall initial state the block is centered on the wall instead.
    """
    if isinstance(spec, str):
        n = L // 3 if spec == "third" else L // 4
        if n < 1:
            raise ConfigError(f"region shorthand {spec!r} is empty at L={L}")
        start = (L // 2 - n // 2) if pattern == DOMAIN_WALL else 0
        return Region(tuple(range(start, start + n)))
    region = Region(tuple(spec))
    if region.sites[-1] >= L:
        raise ConfigError(f"region {region.sites} exceeds chain of {L} sites")
    return region


def _probe_requests(cfg: ExperimentConfig, L: int) -> list[ProbeRequest]:
    region = None
    if cfg.region_spec is not None:
        pattern = cfg.initial.pattern if cfg.initial is not None else None
        region = resolve_region(cfg.region_spec, L, pattern)
    return [ProbeRequest(PROBE_NAMES[name], region) for name in cfg.probes]


def _time_grid(cfg: ExperimentConfig) -> np.ndarray:
    times = np.arange(0.0, cfg.t_max + cfg.dt / 2, cfg.dt)
    if cfg.late_window is not None:
        t1, t2, n = cfg.late_window
        times = np.unique(np.concatenate([times, np.linspace(t1, t2, n)]))
    return times


@dataclass
class ResultRecord:
    """Everything one run produced: echo, series, analysis, provenance."""

    config: dict
    series: dict
    analysis: list[dict]
    provenance: dict
    scalars: dict = field(default_factory=dict)


def run_experiment(cfg: ExperimentConfig, out_dir: Path | None, n_workers: int = 1) -> ResultRecord:
    """Execute one experiment; write CSVs and summary.json when out_dir is set."""
    if cfg.mode == "quench":
        record = _run_quench(cfg, n_workers)
    elif cfg.mode == "circuit":
        record = _run_circuit(cfg, n_workers)
    elif cfg.mode == "ground-state":
        record = _run_ground_state(cfg)
    else:
        record = _run_analyze(cfg)
    if out_dir is not None:
        _write_outputs(record, Path(out_dir))
    return record


def _provenance() -> dict:
    return {
        "version": __version__,
        "created": datetime.now(timezone.utc).isoformat(),
        "seed_rule": SEED_RULE,
        "kernel_backend": kernels.backend_name(),
    }


# ---------------------------------------------------------------- quench


def _quench_backend(cfg: ExperimentConfig):
    """Resolve backend choice and build the propagator handle."""
    backend = cfg.backend
    if backend == "auto":
        backend = "spectral" if cfg.hamiltonian.L <= SPECTRAL_MAX_SITES else "krylov"
    if backend == "spectral" and cfg.hamiltonian.L > DENSE_SITE_CAP:
        raise ConfigError(
            f"spectral backend is capped at {DENSE_SITE_CAP} sites, got L={cfg.hamiltonian.L}"
        )
    h = build_hamiltonian(cfg.hamiltonian, nnn_prefactor=cfg.nnn_prefactor)
    if backend == "spectral":
        return backend, build_spectral(materialize_dense(h))
    return backend, h


def _run_quench(cfg: ExperimentConfig, n_workers: int) -> ResultRecord:
    backend, propagator = _quench_backend(cfg)
    times = _time_grid(cfg)
    probes = _probe_requests(cfg, cfg.hamiltonian.L)
    state0 = build_initial_state(cfg.initial, cfg.hamiltonian.L)
    series = trajectory(propagator, state0, times, probes, cfg.krylov)

    if cfg.emit_cv_reference and "cv" in series:
        reference = np.array(
            [
                analytic.early_time_cv(
                    cfg.initial.tilt_angle,
                    cfg.hamiltonian.gamma,
                    cfg.hamiltonian.delta1,
                    cfg.hamiltonian.L,
                    float(t),
                )
                for t in times
            ]
        )
        series["cv_reference"] = TimeSeries(times.copy(), reference)

    echo = cfg.to_dict()
    echo["backend"] = backend
    record = ResultRecord(echo, series, [], _provenance())

    for request in cfg.analyses:
        record.analysis.append(_quench_analysis(cfg, request, record, propagator, times))
    return record


def _pick_channel(request: dict, series: dict) -> str:
    channel = request.get("channel")
    if channel is None:
        for name in ("ea_u1", "ea_z2"):
            if name in series:
                return name
        return next(iter(series))
    if channel not in series:
        raise ConfigError(f"analysis channel {channel!r} not among {sorted(series)}")
    return channel


def _as_time_series(series_like) -> TimeSeries:
    if isinstance(series_like, EnsembleSeries):
        return TimeSeries(series_like.times.astype(np.float64), series_like.mean)
    return series_like


def _quench_analysis(cfg, request, record, propagator, times) -> dict:
    kind = request["kind"]
    out = dict(request)
    if kind == "peak":
        channel = _pick_channel(request, record.series)
        t_peak, v_peak = find_peak(_as_time_series(record.series[channel]))
        out.update(channel=channel, t_max=t_peak, v_max=v_peak)
    elif kind == "late-average":
        channel = _pick_channel(request, record.series)
        window = request.get("window")
        if window is None:
            raise ConfigError("late-average analysis needs a 'window': [t1, t2]")
        mean, std = late_time_average(_as_time_series(record.series[channel]), tuple(window))
        out.update(channel=channel, mean=mean, std=std)
    elif kind == "classify":
        channel = _pick_channel(request, record.series)
        horizon = request.get("horizon")
        if horizon is None:
            horizon = _auto_horizon(cfg, propagator, times)
        label = classify_early_growth(_as_time_series(record.series[channel]), float(horizon))
        out.update(channel=channel, horizon=float(horizon), classification=label)
    elif kind == "crossing":
        out.update(_crossing_analysis(cfg, request, record, propagator, times))
    elif kind == "finite-size":
        out.update(_finite_size_analysis(cfg, request))
    else:
        raise ConfigError(f"analysis kind {kind!r} is not available in quench mode")
    return out


def _auto_horizon(cfg, propagator, times) -> float:
    """Horizon for early-growth classification: the asymmetry-peak time of
    the matching untilted run, capped at t = 10."""
    region_source = cfg.region_spec if cfg.region_spec is not None else "quarter"
    region = resolve_region(region_source, cfg.hamiltonian.L, cfg.initial.pattern)
    baseline = build_initial_state(ProductStateSpec(cfg.initial.pattern, 0.0), cfg.hamiltonian.L)
    early = times[times <= DEFAULT_HORIZON_CAP]
    probe = [ProbeRequest("ea_u1", region)]
    reference = trajectory(propagator, baseline, early, probe, cfg.krylov)["ea_u1"]
    t_peak, v_peak = find_peak(reference)
    if t_peak <= 0.0 or v_peak <= 1e-12:
        return min(DEFAULT_HORIZON_CAP, float(times[-1]))
    return min(float(t_peak), DEFAULT_HORIZON_CAP, float(times[-1]))


def _crossing_analysis(cfg, request, record, propagator, times) -> dict:
    if "partner_tilt_angle" not in request:
        raise ConfigError("crossing analysis needs 'partner_tilt_angle'")
    partner_theta = float(request["partner_tilt_angle"])
    persistence = int(request.get("min_persistence", DEFAULT_MIN_PERSISTENCE))
    channel = _pick_channel(request, record.series)
    partner_spec = ProductStateSpec(cfg.initial.pattern, partner_theta)
    partner_state = build_initial_state(partner_spec, cfg.hamiltonian.L)
    probes = _probe_requests(cfg, cfg.hamiltonian.L)
    partner_series = trajectory(propagator, partner_state, times, probes, cfg.krylov)
    for name, ts in partner_series.items():
        record.series[f"{name}@partner"] = ts
    base = _as_time_series(record.series[channel])
    partner = _as_time_series(partner_series[channel])
    if partner_theta >= cfg.initial.tilt_angle:
        report = detect_crossing(base, partner, persistence)
    else:
        report = detect_crossing(partner, base, persistence)
    return {
        "channel": channel,
        "partner_tilt_angle": partner_theta,
        "min_persistence": persistence,
        "crossed": report.crossed,
        "t_cross": report.t_cross,
        "persistence": report.persistence,
    }


def _finite_size_analysis(cfg, request) -> dict:
    sizes = request.get("sizes")
    if not sizes or len(sizes) < 2:
        raise ConfigError("finite-size analysis needs 'sizes' with at least two entries")
    if not isinstance(cfg.region_spec, str):
        raise ConfigError("finite-size analysis needs a shorthand region (third/quarter)")
    channel = request.get("channel", "ea_u1")
    if channel not in ("ea_u1", "ea_z2"):
        raise ConfigError("finite-size analysis runs on an asymmetry channel")
    times = np.arange(0.0, cfg.t_max + cfg.dt / 2, cfg.dt)
    density_peaks = []
    for L in sorted(int(s) for s in sizes):
        params = HamiltonianParams(
            L=L,
            gamma=cfg.hamiltonian.gamma,
            delta1=cfg.hamiltonian.delta1,
            delta2=cfg.hamiltonian.delta2,
            periodic=cfg.hamiltonian.periodic,
        )
        h = build_hamiltonian(params, nnn_prefactor=cfg.nnn_prefactor)
        propagator = build_spectral(materialize_dense(h)) if L <= SPECTRAL_MAX_SITES else h
        region = resolve_region(cfg.region_spec, L, cfg.initial.pattern)
        state0 = build_initial_state(cfg.initial, L)
        probe = [ProbeRequest(PROBE_NAMES[channel.replace("_", "-")], region)]
        series = trajectory(propagator, state0, times, probe, cfg.krylov)[channel]
        _, v_peak = find_peak(series)
        density_peaks.append(v_peak / len(region))
    sizes_sorted = sorted(int(s) for s in sizes)
    inverse = np.array([1.0 / L for L in sizes_sorted])
    slope, intercept = linear_fit_extrapolate(inverse, np.array(density_peaks))
    return {
        "channel": channel,
        "sizes": sizes_sorted,
        "inverse_sizes": inverse.tolist(),
        "density_peaks": density_peaks,
        "slope": slope,
        "intercept": intercept,
    }


# ---------------------------------------------------------------- circuit


def _run_circuit(cfg: ExperimentConfig, n_workers: int) -> ResultRecord:
    probes = _probe_requests(cfg, cfg.circuit.L)
    series = ensemble_average(cfg.circuit, cfg.initial, probes, n_workers)
    record = ResultRecord(cfg.to_dict(), dict(series), [], _provenance())
    for request in cfg.analyses:
        record.analysis.append(_circuit_analysis(cfg, request, record, probes, n_workers))
    return record


def _circuit_analysis(cfg, request, record, probes, n_workers) -> dict:
    kind = request["kind"]
    out = dict(request)
    if kind == "peak":
        channel = _pick_channel(request, record.series)
        t_peak, v_peak = find_peak(_as_time_series(record.series[channel]))
        out.update(channel=channel, t_max=t_peak, v_max=v_peak)
    elif kind == "late-average":
        channel = _pick_channel(request, record.series)
        window = request.get("window")
        if window is None:
            raise ConfigError("late-average analysis needs a 'window': [t1, t2]")
        mean, std = late_time_average(_as_time_series(record.series[channel]), tuple(window))
        out.update(channel=channel, mean=mean, std=std)
    elif kind == "classify":
        channel = _pick_channel(request, record.series)
        horizon = request.get("horizon")
        if horizon is None:
            raise ConfigError("circuit-mode classification needs an explicit 'horizon'")
        label = classify_early_growth(_as_time_series(record.series[channel]), float(horizon))
        out.update(channel=channel, horizon=float(horizon), classification=label)
    elif kind == "crossing":
        if "partner_tilt_angle" not in request:
            raise ConfigError("crossing analysis needs 'partner_tilt_angle'")
        partner_theta = float(request["partner_tilt_angle"])
        persistence = int(request.get("min_persistence", DEFAULT_MIN_PERSISTENCE))
        channel = _pick_channel(request, record.series)
        partner_spec = ProductStateSpec(cfg.initial.pattern, partner_theta)
        partner = ensemble_average(cfg.circuit, partner_spec, probes, n_workers)
        for name, es in partner.items():
            record.series[f"{name}@partner"] = es
        base_ts = _as_time_series(record.series[channel])
        partner_ts = _as_time_series(partner[channel])
        if partner_theta >= cfg.initial.tilt_angle:
            report = detect_crossing(base_ts, partner_ts, persistence)
        else:
            report = detect_crossing(partner_ts, base_ts, persistence)
        out.update(
            channel=channel,
            partner_tilt_angle=partner_theta,
            min_persistence=persistence,
            crossed=report.crossed,
            t_cross=report.t_cross,
            persistence=report.persistence,
        )
    elif kind == "powerlaw":
        values = request.get("p_haar_values")
        if not values or len(values) < 3:
            raise ConfigError("powerlaw analysis needs 'p_haar_values' with >= 3 entries")
        channel = _pick_channel(request, record.series)
        peaks = []
        for p in values:
            sub = CircuitConfig(
                L=cfg.circuit.L,
                p_haar=float(p),
                depth_units=cfg.circuit.depth_units,
                master_seed=cfg.circuit.master_seed,
                n_realizations=cfg.circuit.n_realizations,
            )
            ensemble = ensemble_average(sub, cfg.initial, probes, n_workers)
            _, v_peak = find_peak(_as_time_series(ensemble[channel]))
            peaks.append(v_peak)
        a, b = power_law_fit(np.asarray(values, dtype=float), np.asarray(peaks))
        out.update(channel=channel, peaks=peaks, a=a, b=b)
    else:
        raise ConfigError(f"analysis kind {kind!r} is not available in circuit mode")
    return out


# ---------------------------------------------------------------- others


def _run_ground_state(cfg: ExperimentConfig) -> ResultRecord:
    h = build_hamiltonian(cfg.hamiltonian, nnn_prefactor=cfg.nnn_prefactor)
    energy, state = ground_state(h)
    probes = _probe_requests(cfg, cfg.hamiltonian.L)
    from .observables import evaluate_probes

    values = evaluate_probes(state, probes)
    record = ResultRecord(cfg.to_dict(), {}, [], _provenance())
    record.scalars = {"energy": energy, **values}
    return record


def _run_analyze(cfg: ExperimentConfig) -> ResultRecord:
    loaded = {name: _read_series_csv(Path(path)) for name, path in cfg.series_inputs.items()}
    record = ResultRecord(cfg.to_dict(), {}, [], _provenance())
    for request in cfg.analyses:
        kind = request["kind"]
        out = dict(request)
        if kind == "crossing":
            for key in ("less", "more"):
                if request.get(key) not in loaded:
                    raise ConfigError(f"crossing analysis needs '{key}' naming a loaded series")
            persistence = int(request.get("min_persistence", DEFAULT_MIN_PERSISTENCE))
            report = detect_crossing(loaded[request["less"]], loaded[request["more"]], persistence)
            out.update(crossed=report.crossed, t_cross=report.t_cross, persistence=report.persistence)
        elif kind in ("peak", "late-average", "classify"):
            name = request.get("series")
            if name not in loaded:
                raise ConfigError(f"analysis needs 'series' naming a loaded series, got {name!r}")
            ts = loaded[name]
            if kind == "peak":
                t_peak, v_peak = find_peak(ts)
                out.update(t_max=t_peak, v_max=v_peak)
            elif kind == "late-average":
                window = request.get("window")
                if window is None:
                    raise ConfigError("late-average analysis needs a 'window': [t1, t2]")
                mean, std = late_time_average(ts, tuple(window))
                out.update(mean=mean, std=std)
            else:
                horizon = request.get("horizon")
                if horizon is None:
                    raise ConfigError("analyze-mode classification needs an explicit 'horizon'")
                out.update(classification=classify_early_growth(ts, float(horizon)))
        else:
            raise ConfigError(f"analysis kind {kind!r} is not available in analyze mode")
        record.analysis.append(out)
    return record


# ---------------------------------------------------------------- output


def _format(value: float) -> str:
    return f"{value:.15e}"


def _write_outputs(record: ResultRecord, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    grouped_pq: dict[str, dict[str, object]] = {}
    for name, series in record.series.items():
        if name.startswith("pq:"):
            key = "pq_partner" if name.endswith("@partner") else "pq"
            grouped_pq.setdefault(key, {})[name] = series
        else:
            _write_series_csv(out_dir / f"{_safe_name(name)}.csv", series)
    for filename, group in grouped_pq.items():
        _write_pq_csv(out_dir / f"{filename}.csv", group)
    summary = {
        "config": record.config,
        "analysis": record.analysis,
        "provenance": record.provenance,
    }
    if record.scalars:
        summary["results"] = record.scalars
    with open(out_dir / "summary.json", "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _safe_name(channel: str) -> str:
    return channel.replace("@partner", "_partner").replace(":", "_").replace("=", "_")


def _write_series_csv(path: Path, series) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if isinstance(series, EnsembleSeries):
            fh.write("time,value,std_error\n")
            for t, v, e in zip(series.times, series.mean, series.std_error):
                fh.write(f"{_format(float(t))},{_format(float(v))},{_format(float(e))}\n")
        else:
            fh.write("time,value\n")
            for t, v in zip(series.times, series.values):
                fh.write(f"{_format(float(t))},{_format(float(v))}\n")


def _write_pq_csv(path: Path, group: dict) -> None:
    names = sorted(group, key=lambda n: int(n.split("q=")[1].split("@")[0]))
    first = group[names[0]]
    is_ensemble = isinstance(first, EnsembleSeries)
    headers = ["time"] + [f"P(Q={n.split('q=')[1].split('@')[0]})" for n in names]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(headers) + "\n")
        times = first.times
        for row, t in enumerate(times):
            cells = [_format(float(t))]
            for n in names:
                series = group[n]
                value = series.mean[row] if is_ensemble else series.values[row]
                cells.append(_format(float(value)))
            fh.write(",".join(cells) + "\n")


def _read_series_csv(path: Path) -> TimeSeries:
    if not path.exists():
        raise ConfigError(f"series file not found: {path}")
    data = np.genfromtxt(path, delimiter=",", names=True)
    names = data.dtype.names
    if names is None or "time" not in names or "value" not in names:
        raise ConfigError(f"series file {path} needs 'time' and 'value' columns")
    return TimeSeries(np.atleast_1d(data["time"]), np.atleast_1d(data["value"]))


# ---------------------------------------------------------------- CLI


def load_config(source: str) -> ExperimentConfig:
    """Load a config from a JSON file path or a preset name."""
    from .presets import PRESETS

    path = Path(source)
    if path.exists():
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
        return ExperimentConfig.from_dict(raw)
    if source in PRESETS:
        return ExperimentConfig.from_dict(PRESETS[source]["config"])
    raise ConfigError(f"{source!r} is neither a config file nor a preset name")


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="easym",
        description="Symmetry-breaking dynamics: quench and random-circuit experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_parser = sub.add_parser("run", help="execute an experiment config (file or preset name)")
    run_parser.add_argument("config", help="path to a JSON config, or a preset name")
    run_parser.add_argument("--out", required=True, help="output directory")
    run_parser.add_argument("--seed", type=int, default=None, help="override the master seed")
    run_parser.add_argument("--threads", type=int, default=1, help="ensemble worker count")

    presets_parser = sub.add_parser("presets", help="list the named experiment recipes")
    presets_parser.add_argument("--write", metavar="DIR", default=None, help="write preset configs as JSON files")

    args = parser.parse_args(argv)

    if args.command == "presets":
        return _presets_command(args.write)

    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            if cfg.circuit is None:
                raise ConfigError("--seed only applies to circuit-mode configs")
            cfg.circuit = CircuitConfig(
                L=cfg.circuit.L,
                p_haar=cfg.circuit.p_haar,
                depth_units=cfg.circuit.depth_units,
                master_seed=args.seed,
                n_realizations=cfg.circuit.n_realizations,
            )
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    try:
        run_experiment(cfg, Path(args.out), n_workers=args.threads)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ConvergenceError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    return 0


def _presets_command(write_dir: str | None) -> int:
    from .presets import PRESETS

    if write_dir is not None:
        target = Path(write_dir)
        target.mkdir(parents=True, exist_ok=True)
        for name, preset in PRESETS.items():
            with open(target / f"{name}.json", "w", encoding="utf-8") as fh:
                json.dump(preset["config"], fh, indent=2, sort_keys=True)
                fh.write("\n")
        print(f"wrote {len(PRESETS)} preset configs to {target}")
        return 0
    width = max(len(name) for name in PRESETS)
    for name, preset in PRESETS.items():
        print(f"{name:<{width}}  {preset['description']}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
