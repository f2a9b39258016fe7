"""Deterministic per-chain random streams.

Every source of randomness in a run is one of N+1 streams derived from a
single master seed: one stream per chain (local moves and initialization)
and one extra stream for pair/ring selection during exchange phases.
Because each chain consumes only its own stream, results are independent
of how chain updates are scheduled across workers.
"""

from __future__ import annotations

import numpy as np

_BLOCK = 4096


class RngStream:
    """Buffered scalar draws from a dedicated ``numpy`` generator.

    Scalar ``random()`` / ``standard_normal()`` calls are served from
    prefetched blocks, which makes tight sampling loops several times
    faster than calling the generator per draw. The draw sequence is a
    deterministic function of the underlying seed and the call order
    alone; consumers must not touch the wrapped generator directly.
    """

    __slots__ = ("generator", "_u", "_ui", "_n", "_ni")

    def __init__(self, generator: np.random.Generator):
        self.generator = generator
        self._u = ()
        self._ui = 0
        self._n = ()
        self._ni = 0

    def random(self) -> float:
        """Uniform draw on [0, 1)."""
        i = self._ui
        if i == len(self._u):
            self._u = self.generator.random(_BLOCK).tolist()
            i = 0
        self._ui = i + 1
        return self._u[i]

    def standard_normal(self) -> float:
        """Standard normal draw."""
        i = self._ni
        if i == len(self._n):
            self._n = self.generator.standard_normal(_BLOCK).tolist()
            i = 0
        self._ni = i + 1
        return self._n[i]

    def index(self, n: int) -> int:
        """Uniform integer on {0, ..., n-1} (consumes one uniform)."""
        return int(self.random() * n)


def rng_streams(master_seed: int, n_chains: int) -> list[RngStream]:
    """Create ``n_chains + 1`` independent streams from one master seed.

    Streams ``0 .. n_chains-1`` drive chains ``1 .. n_chains``; the last
    stream drives all pair/ring selection. Streams depend only on
    ``(master_seed, stream index)``, never on scheduling.
    """
    children = np.random.SeedSequence(master_seed).spawn(n_chains + 1)
    return [RngStream(np.random.default_rng(seq)) for seq in children]
