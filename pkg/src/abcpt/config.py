"""Validated run configuration for the tempered-population sampler."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .schedules import check_temperatures, check_tolerances

__all__ = ["PtConfig", "config_hash"]

DEFAULT_REJECTION_CAP = 10**7


@dataclass(frozen=True)
class PtConfig:
    """Full specification of a population run.

    ``tolerances`` and ``temperatures`` must have equal length N >= 2;
    ``exchanges_per_iteration`` defaults to N, and ``ring_count`` of None
    means uniform pair selection. ``n_workers`` and ``debug_checks`` do
    not affect results and are excluded from the semantic hash.
    """

    tolerances: np.ndarray
    temperatures: np.ndarray
    iterations: int
    burn_in: int = 0
    thinning: int = 1
    exchanges_per_iteration: int | None = None
    ring_count: int | None = None
    master_seed: int = 0
    rejection_cap: int = DEFAULT_REJECTION_CAP
    n_workers: int = 1
    debug_checks: bool = field(default=False, compare=False)

    def __post_init__(self):
        eps = check_tolerances(self.tolerances)
        if eps.size < 2:
            raise ValueError("a population run needs at least 2 chains")
        temps = check_temperatures(self.temperatures, n_chains=eps.size)
        object.__setattr__(self, "tolerances", eps)
        object.__setattr__(self, "temperatures", temps)
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if not 0 <= self.burn_in < self.iterations:
            raise ValueError("burn_in must satisfy 0 <= burn_in < iterations")
        if self.thinning < 1:
            raise ValueError("thinning must be >= 1")
        if self.exchanges_per_iteration is None:
            object.__setattr__(self, "exchanges_per_iteration", eps.size)
        elif self.exchanges_per_iteration < 0:
            raise ValueError("exchanges_per_iteration must be >= 0")
        if self.ring_count is not None and not 1 <= self.ring_count <= eps.size:
            raise ValueError(f"ring_count must lie in [1, {eps.size}]")
        if self.rejection_cap < 1:
            raise ValueError("rejection_cap must be >= 1")
        if self.n_workers < 1:
            raise ValueError("n_workers must be >= 1")

    @property
    def n_chains(self) -> int:
        return self.tolerances.size

    def to_dict(self) -> dict:
        """Semantic fields as plain JSON-serializable values."""
        return {
            "tolerances": [float(e) for e in self.tolerances],
            "temperatures": [float(t) for t in self.temperatures],
            "iterations": int(self.iterations),
            "burn_in": int(self.burn_in),
            "thinning": int(self.thinning),
            "exchanges_per_iteration": int(self.exchanges_per_iteration),
            "ring_count": None if self.ring_count is None else int(self.ring_count),
            "master_seed": int(self.master_seed),
            "rejection_cap": int(self.rejection_cap),
        }


def config_hash(spec: dict) -> str:
    """Stable hash of a semantic run description (sorted-key JSON, sha256)."""
    canon = json.dumps(spec, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]
