"""Closed-form reference values used as independent cross-checks."""

from __future__ import annotations

import math


def early_time_cv(theta: float, gamma: float, delta1: float, L: int, t: float) -> float:
    """Short-time expansion of the full-chain charge variance.

    Second-order expansion for a tilted all-up product state evolving under
    the nearest-neighbour chain (the next-nearest coupling must be zero;
    the expansion is not derived for it):

        sigma^2(t) = L [ sin^2(theta)
                         + (t^2/2) (1-gamma) ( (1-gamma)
                           + (1-delta1)(3 sin^2 cos^2 - sin^2) ) ]

    This is the extensive (whole-chain) value; divide by L for the
    per-site version.
    """
    if t < 0:
        raise ValueError(f"time must be non-negative, got {t}")
    s2 = math.sin(theta) ** 2
    c2 = math.cos(theta) ** 2
    curvature = (1.0 - gamma) * ((1.0 - gamma) + (1.0 - delta1) * (3.0 * s2 * c2 - s2))
    return L * (s2 + 0.5 * t * t * curvature)


def tilted_product_ea(n: int, theta: float) -> float:
    """Initial entanglement asymmetry of an n-site region of a tilted
    all-up product state.

    The region state is pure, so the asymmetry reduces to the Shannon
    entropy of its binomial charge distribution:

        -sum_k p_k ln p_k,   p_k = C(n, k) cos^(2(n-k))(theta/2) sin^(2k)(theta/2).
    """
    if n < 1:
        raise ValueError(f"region size must be >= 1, got {n}")
    if not 0.0 <= theta <= math.pi / 2 + 1e-12:
        raise ValueError(f"theta must lie in [0, pi/2], got {theta}")
    c2 = math.cos(theta / 2) ** 2
    s2 = math.sin(theta / 2) ** 2
    entropy = 0.0
    for k in range(n + 1):
        p = math.comb(n, k) * c2 ** (n - k) * s2**k
        if p > 0.0:
            entropy -= p * math.log(p)
    return entropy
