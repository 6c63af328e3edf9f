"""Time-series phenomenology: peaks, late-time averages, crossing detection,
early-growth classification, and simple fits."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

EXCEEDS = "exceeds"
STAYS_BELOW = "stays-below"

DEFAULT_MIN_PERSISTENCE = 3


@dataclass
class TimeSeries:
    """Sampled (time, value) pairs with strictly increasing times."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=np.float64)
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.times.ndim != 1 or self.times.shape != self.values.shape:
            raise ValueError("times and values must be 1-d arrays of equal length")
        if self.times.size == 0:
            raise ValueError("series must not be empty")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")

    def __len__(self) -> int:
        return int(self.times.size)


@dataclass
class CrossingReport:
    """Outcome of crossing detection between two relaxation curves."""

    crossed: bool
    t_cross: float | None
    persistence: int


def find_peak(series: TimeSeries) -> tuple[float, float]:
    """Global maximum over the samples; earliest time on exact ties."""
    k = int(np.argmax(series.values))
    return float(series.times[k]), float(series.values[k])


def late_time_average(series: TimeSeries, window: tuple[float, float]) -> tuple[float, float]:
    """Mean and standard deviation of the samples with t in [t1, t2].

    Requires at least 10 samples inside the window.
    """
    t1, t2 = window
    if t2 <= t1:
        raise ValueError(f"window must satisfy t1 < t2, got {window}")
    mask = (series.times >= t1) & (series.times <= t2)
    count = int(np.count_nonzero(mask))
    if count < 10:
        raise ValueError(f"window {window} contains only {count} samples (need >= 10)")
    chunk = series.values[mask]
    return float(np.mean(chunk)), float(np.std(chunk))


def detect_crossing(
    less_tilted: TimeSeries,
    more_tilted: TimeSeries,
    min_persistence: int = DEFAULT_MIN_PERSISTENCE,
) -> CrossingReport:
    """First persistent drop of the more-asymmetric curve below the other.

    Scans diff = more - less for sign changes. Changes whose new sign holds
    for fewer than ``min_persistence`` consecutive samples are treated as
    oscillation artifacts and skipped; the first persistent change decides
    the outcome: + to - is a crossing (``t_cross`` linearly interpolated at
    the change), - to + is not. Swapping the arguments flips every sign, so
    at most one orientation can report a crossing for a given pair.
    """
    if min_persistence < 1:
        raise ValueError("min_persistence must be >= 1")
    if not np.array_equal(less_tilted.times, more_tilted.times):
        raise ValueError("crossing detection needs identical time grids")
    diff = more_tilted.values - less_tilted.values
    signs = np.sign(diff)
    nonzero = np.nonzero(signs)[0]
    if nonzero.size == 0:
        return CrossingReport(False, None, 0)
    current = signs[nonzero[0]]
    for k in nonzero[1:]:
        if signs[k] == current:
            continue
        run = 0
        for v in signs[k:]:
            if v == signs[k]:
                run += 1
            else:
                break
        if run < min_persistence:
            current = signs[k]  # transient wiggle: adopt and keep scanning
            continue
        if current < 0:
            return CrossingReport(False, None, 0)
        t_prev, t_k = float(less_tilted.times[k - 1]), float(less_tilted.times[k])
        d_prev, d_k = float(diff[k - 1]), float(diff[k])
        if d_prev == 0.0:
            t_cross = t_prev
        else:
            t_cross = t_prev + d_prev * (t_k - t_prev) / (d_prev - d_k)
        return CrossingReport(True, t_cross, int(run))
    return CrossingReport(False, None, 0)


def classify_early_growth(series: TimeSeries, horizon: float) -> str:
    """Whether the series exceeds its t=0 value anywhere in (0, horizon].

    The comparison uses a tolerance of 1e-9 absolute plus 1e-6 relative to
    the initial value, making the outcome invariant under constant shifts.
    """
    if series.times[0] != 0.0:
        raise ValueError("classification needs a sample at t = 0")
    if not 0.0 < horizon <= series.times[-1]:
        raise ValueError(f"horizon {horizon} outside the series span")
    v0 = series.values[0]
    tol = 1e-9 + 1e-6 * abs(v0)
    mask = (series.times > 0.0) & (series.times <= horizon)
    if np.any(series.values[mask] > v0 + tol):
        return EXCEEDS
    return STAYS_BELOW


def power_law_fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Least-squares fit of y = a x^b on log-log axes; returns (a, b)."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be 1-d arrays of equal length")
    if x.size < 3:
        raise ValueError(f"power-law fit needs at least 3 points, got {x.size}")
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("power-law fit needs strictly positive data")
    slope, intercept = linear_fit_extrapolate(np.log(x), np.log(y))
    return math.exp(intercept), slope


def linear_fit_extrapolate(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Ordinary least squares y = slope*x + intercept; returns (slope, intercept).

    The intercept is the x -> 0 extrapolation (pass x = 1/L for a
    thermodynamic-limit estimate of an intensive quantity).
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be 1-d arrays of equal length")
    if x.size < 2:
        raise ValueError(f"linear fit needs at least 2 points, got {x.size}")
    dx = x - np.mean(x)
    denom = float(dx @ dx)
    if denom == 0.0:
        raise ValueError("degenerate fit: all x values are equal")
    slope = float(dx @ (y - np.mean(y))) / denom
    intercept = float(np.mean(y)) - slope * float(np.mean(x))
    return slope, intercept
