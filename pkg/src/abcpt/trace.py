"""Run history: per-chain samples, local-move flags, and exchange events."""

from __future__ import annotations

import json

import numpy as np

__all__ = ["Trace", "EXCHANGE_REJECTED", "EXCHANGE_ACCEPTED", "EXCHANGE_SKIPPED"]

EXCHANGE_REJECTED = 0
EXCHANGE_ACCEPTED = 1
EXCHANGE_SKIPPED = 2  # no eligible ring; no pair was proposed


class Trace:
    """Everything a run recorded, dense enough to rebuild every table.

    ``thetas`` has shape (iterations, n_chains, dim) and holds each
    chain's parameter at the end of each iteration. ``local_accepts``
    has shape (iterations, n_chains). Exchange proposals are stored
    columnar in proposal order, ``exchanges_per_iteration`` per
    iteration, with 0-based chain indices ``i < j`` (skipped proposals
    carry ``i == j == 0`` and status ``EXCHANGE_SKIPPED``).
    """

    def __init__(self, thetas, local_accepts, exchange_i, exchange_j,
                 exchange_status, exchanges_per_iteration, meta=None):
        self.thetas = thetas
        self.local_accepts = local_accepts
        self.exchange_i = exchange_i
        self.exchange_j = exchange_j
        self.exchange_status = exchange_status
        self.exchanges_per_iteration = int(exchanges_per_iteration)
        self.meta = dict(meta or {})

    @property
    def iterations(self) -> int:
        return self.thetas.shape[0]

    @property
    def n_chains(self) -> int:
        return self.thetas.shape[1]

    @property
    def dim(self) -> int:
        return self.thetas.shape[2]

    def samples(self, chain: int = 0, burn_in: int | None = None,
                thin: int | None = None) -> np.ndarray:
        """Post-burn-in, thinned samples of one chain, shape (kept, dim).

        ``burn_in``/``thin`` default to the values stored in ``meta``
        (falling back to 0 / 1), so extraction never mutates the raw trace.
        """
        if burn_in is None:
            burn_in = int(self.meta.get("burn_in", 0))
        if thin is None:
            thin = int(self.meta.get("thinning", 1))
        if thin < 1:
            raise ValueError("thin must be >= 1")
        return self.thetas[burn_in:, chain, :][::thin]

    def exchange_iterations(self) -> np.ndarray:
        """Iteration index of each logged exchange proposal."""
        if self.exchanges_per_iteration == 0:
            return np.zeros(0, dtype=np.int64)
        k = np.arange(self.exchange_status.size, dtype=np.int64)
        return k // self.exchanges_per_iteration

    def exchange_log(self) -> np.ndarray:
        """Structured view (iteration, i, j, status) of every proposal."""
        log = np.zeros(self.exchange_status.size,
                       dtype=[("iteration", np.int64), ("i", np.int64),
                              ("j", np.int64), ("status", np.uint8)])
        log["iteration"] = self.exchange_iterations()
        log["i"] = self.exchange_i
        log["j"] = self.exchange_j
        log["status"] = self.exchange_status
        return log

    def accepted_exchange_count(self) -> int:
        return int(np.count_nonzero(self.exchange_status == EXCHANGE_ACCEPTED))

    def save(self, path) -> None:
        """Write the trace as a compressed ``.npz`` archive."""
        np.savez_compressed(
            path,
            thetas=self.thetas,
            local_accepts=self.local_accepts,
            exchange_i=self.exchange_i,
            exchange_j=self.exchange_j,
            exchange_status=self.exchange_status,
            exchanges_per_iteration=np.int64(self.exchanges_per_iteration),
            meta=np.frombuffer(json.dumps(self.meta).encode(), dtype=np.uint8),
        )

    @classmethod
    def load(cls, path) -> "Trace":
        with np.load(path) as data:
            meta = json.loads(bytes(data["meta"]).decode()) if "meta" in data else {}
            return cls(
                thetas=data["thetas"],
                local_accepts=data["local_accepts"],
                exchange_i=data["exchange_i"],
                exchange_j=data["exchange_j"],
                exchange_status=data["exchange_status"],
                exchanges_per_iteration=int(data["exchanges_per_iteration"]),
                meta=meta,
            )

    def equals(self, other: "Trace") -> bool:
        """Bitwise equality of all recorded arrays and metadata."""
        return (
            np.array_equal(self.thetas, other.thetas)
            and np.array_equal(self.local_accepts, other.local_accepts)
            and np.array_equal(self.exchange_i, other.exchange_i)
            and np.array_equal(self.exchange_j, other.exchange_j)
            and np.array_equal(self.exchange_status, other.exchange_status)
            and self.exchanges_per_iteration == other.exchanges_per_iteration
        )
