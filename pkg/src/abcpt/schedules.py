"""Tolerance/temperature ladders and the ring partition of the distance range."""

from __future__ import annotations

from bisect import bisect_left

import numpy as np

__all__ = [
    "log_spaced_schedule",
    "check_tolerances",
    "check_temperatures",
    "ring_partition",
    "ring_index",
]


def log_spaced_schedule(lo: float, hi: float, n: int) -> np.ndarray:
    """Geometric ladder of ``n`` values from ``lo`` to ``hi`` inclusive.

    Successive ratios are constant, ``(hi/lo)**(1/(n-1))``; both endpoints
    are hit exactly.
    """
    if n < 1:
        raise ValueError(f"need at least one schedule point, got n={n}")
    if lo <= 0 or hi <= 0:
        raise ValueError(f"schedule bounds must be positive, got ({lo}, {hi})")
    if hi < lo:
        raise ValueError(f"upper bound {hi} below lower bound {lo}")
    if n == 1:
        if lo != hi:
            raise ValueError("a single-point schedule requires lo == hi")
        return np.array([float(lo)])
    return np.geomspace(lo, hi, n)


def check_tolerances(values) -> np.ndarray:
    """Validate a tolerance ladder: positive and strictly increasing."""
    eps = np.asarray(values, dtype=float)
    if eps.ndim != 1 or eps.size < 1:
        raise ValueError("tolerances must be a non-empty 1-d sequence")
    if not np.all(np.isfinite(eps)) or eps[0] <= 0:
        raise ValueError("tolerances must be finite and positive")
    if eps.size > 1 and not np.all(np.diff(eps) > 0):
        raise ValueError("tolerances must be strictly increasing")
    eps.flags.writeable = False
    return eps

def check_temperatures(values, n_chains: int | None = None) -> np.ndarray:
    """Validate a temperature ladder: T_1 == 1, nondecreasing."""
    temps = np.asarray(values, dtype=float)
    if temps.ndim != 1 or temps.size < 1:
        raise ValueError("temperatures must be a non-empty 1-d sequence")
    if temps[0] != 1.0:
        raise ValueError(f"first temperature must be 1, got {temps[0]}")
    if not np.all(np.isfinite(temps)) or np.any(np.diff(temps) < 0):
        raise ValueError("temperatures must be finite and nondecreasing")
    if n_chains is not None and temps.size != n_chains:
        raise ValueError(f"expected {n_chains} temperatures, got {temps.size}")
    temps.flags.writeable = False
    return temps


def ring_partition(tolerances, n_rings: int) -> np.ndarray:
    """Split the distance range [0, eps_N] into ``n_rings`` contiguous rings.

    The tolerance ladder is cut into ``n_rings`` consecutive groups
    (ascending). When ``n_rings`` does not divide N, the lowest-tolerance
    groups take the extra levels (sizes ``ceil(N/K)`` then ``floor(N/K)``).
    Interior boundaries are arithmetic midpoints between the largest
    tolerance of one group and the smallest of the next; the first ring
    starts at 0 and the last ends at eps_N.

    Returns the ``n_rings + 1`` boundary values. Ring ``j`` (0-based) is
    the interval ``(b_j, b_{j+1}]``, except ring 0 which also contains 0.
    """
    eps = check_tolerances(tolerances)
    n = eps.size
    if n_rings < 1:
        raise ValueError(f"need at least one ring, got {n_rings}")
    if n_rings > n:
        raise ValueError(f"{n_rings} rings but only {n} tolerance levels")
    base, extra = divmod(n, n_rings)
    sizes = [base + 1] * extra + [base] * (n_rings - extra)
    bounds = np.empty(n_rings + 1)
    bounds[0] = 0.0
    bounds[-1] = eps[-1]
    edge = 0
    for k, size in enumerate(sizes[:-1]):
        edge += size
        bounds[k + 1] = 0.5 * (eps[edge - 1] + eps[edge])
    return bounds


def ring_index(distance: float, boundaries) -> int:
    """Ring (0-based) whose interval contains ``distance``.

    A distance equal to an interior boundary belongs to the lower ring;
    0 belongs to ring 0.
    """
    lo, hi = boundaries[0], boundaries[-1]
    if not lo <= distance <= hi:
        raise ValueError(f"distance {distance} outside [{lo}, {hi}]")
    if isinstance(boundaries, np.ndarray):
        boundaries = boundaries.tolist()
    return max(bisect_left(boundaries, distance) - 1, 0)
