"""The three likelihood-free samplers: rejection, MCMC, and the tempered population.

All samplers share the same acceptance primitive: a proposed parameter
survives only if a dataset simulated under it lands within the relevant
tolerance of the observed summary. The population sampler runs N chains
at increasing tolerances and temperatures and mixes them with exchange
moves whose acceptance needs no likelihood: a swap between chains
``i < j`` is accepted exactly when chain j's cached distance already
satisfies chain i's (tighter) tolerance.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .config import PtConfig
from .model import ChainState, ModelBinding
from .rng import RngStream, rng_streams
from .schedules import ring_index, ring_partition
from .trace import EXCHANGE_ACCEPTED, EXCHANGE_REJECTED, EXCHANGE_SKIPPED, Trace

__all__ = [
    "RejectionCapError",
    "abc_rejection",
    "abc_mcmc_step",
    "abc_mcmc_run",
    "pt_initialize",
    "pt_exchange_attempt",
    "pt_exchange_phase_uniform",
    "pt_exchange_phase_rings",
    "run_abc_pt",
]


class RejectionCapError(RuntimeError):
    """Raised when rejection sampling exhausts its attempt budget."""


def _rejection_draw(model, observed_summary, epsilon, rng, budget):
    """One accepted (theta, dataset, summary, distance) plus attempts used."""
    attempts = 0
    while True:
        if budget is not None and attempts >= budget:
            raise RejectionCapError(
                f"rejection sampler used {attempts} attempts without an "
                f"acceptance at tolerance {epsilon}"
            )
        attempts += 1
        theta = model.prior_sample(rng)
        dataset = model.simulate(theta, rng)
        summary = model.summarize(dataset)
        dist = model.distance(summary, observed_summary)
        if dist < epsilon:
            return theta, dataset, summary, dist, attempts


def abc_rejection(model: ModelBinding, epsilon: float, count: int, rng: RngStream,
                  observed_summary=None, max_attempts: int | None = None):
    """Standard likelihood-free rejection sampler.

    Draws parameters from the prior and keeps those whose simulated
    summary lands within ``epsilon`` of the observed one, until ``count``
    acceptances. Returns ``(samples, proposals_used)`` where ``samples``
    has shape (count, dim). ``max_attempts``, if given, bounds the total
    number of proposals across the whole call.
    """
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    if observed_summary is None:
        observed_summary = model.observed_summary
    samples = np.empty((count, model.dim))
    used = 0
    for k in range(count):
        budget = None if max_attempts is None else max_attempts - used
        theta, _, _, _, attempts = _rejection_draw(
            model, observed_summary, epsilon, rng, budget)
        samples[k] = theta
        used += attempts
    return samples, used


def abc_mcmc_step(state: ChainState, model: ModelBinding, observed_summary,
                  epsilon: float, temperature: float, rng: RngStream):
    """One Metropolis step whose acceptance carries the distance indicator.

    Proposes from the (tempered) kernel, simulates one dataset, and
    accepts with probability ``min(1, prior x kernel ratio)`` masked by
    ``distance < epsilon``. Returns ``(accepted, state)``; on rejection
    the input state is returned unchanged. Proposals outside the prior
    support are rejected before simulating (the ratio is zero regardless
    of the dataset, and simulators may not accept such parameters).
    """
    if not state.distance < epsilon:
        raise ValueError(
            f"chain state distance {state.distance} violates tolerance {epsilon}")
    log_prior_cur = model.prior_log_density(state.theta)
    if log_prior_cur == -math.inf:
        raise RuntimeError("current state has zero prior density")
    theta_prop = model.propose(state.theta, temperature, rng)
    log_prior_prop = model.prior_log_density(theta_prop)
    if log_prior_prop == -math.inf:
        return False, state
    dataset = model.simulate(theta_prop, rng)
    summary = model.summarize(dataset)
    dist = model.distance(summary, observed_summary)
    if not dist < epsilon:
        return False, state
    log_ratio = log_prior_prop - log_prior_cur
    if not getattr(model, "symmetric_proposal", False):
        log_ratio += (model.proposal_log_density(state.theta, theta_prop, temperature)
                      - model.proposal_log_density(theta_prop, state.theta, temperature))
    if log_ratio < 0.0 and rng.random() >= math.exp(log_ratio):
        return False, state
    return True, ChainState(theta_prop, dataset, summary, dist, state.chain_index)


def abc_mcmc_run(model: ModelBinding, epsilon: float, iterations: int,
                 init_state: ChainState, rng: RngStream, observed_summary=None,
                 burn_in: int = 0, thinning: int = 1) -> Trace:
    """Single tempered-free chain driven by ``abc_mcmc_step``.

    Records every iteration; ``burn_in`` and ``thinning`` only set the
    defaults used by ``Trace.samples``.
    """
    if iterations < 0:
        raise ValueError("iterations must be >= 0")
    if observed_summary is None:
        observed_summary = model.observed_summary
    thetas = np.empty((iterations, 1, model.dim))
    accepts = np.empty((iterations, 1), dtype=bool)
    state = init_state
    for t in range(iterations):
        accepted, state = abc_mcmc_step(state, model, observed_summary,
                                        epsilon, 1.0, rng)
        accepts[t, 0] = accepted
        thetas[t, 0] = state.theta
    return Trace(
        thetas=thetas,
        local_accepts=accepts,
        exchange_i=np.zeros(0, dtype=np.uint16),
        exchange_j=np.zeros(0, dtype=np.uint16),
        exchange_status=np.zeros(0, dtype=np.uint8),
        exchanges_per_iteration=0,
        meta={"algorithm": "mcmc", "epsilon": float(epsilon),
              "iterations": int(iterations), "burn_in": int(burn_in),
              "thinning": int(thinning)},
    )


def pt_initialize(config: PtConfig, model: ModelBinding, observed_summary,
                  streams: list[RngStream]) -> list[ChainState]:
    """Draw each chain's starting state by rejection at its own tolerance."""
    states = []
    for i, eps in enumerate(config.tolerances):
        theta, dataset, summary, dist, _ = _rejection_draw(
            model, observed_summary, float(eps), streams[i], config.rejection_cap)
        states.append(ChainState(theta, dataset, summary, dist, i))
    return states


def pt_exchange_attempt(states: list[ChainState], tolerances, i: int, j: int) -> bool:
    """Try to swap the full states of chains ``i < j`` (0-based).

    Accepted exactly when chain j's cached distance is below chain i's
    tolerance; the detailed-balance ratio for the product target reduces
    to that indicator because both chains already satisfy their own
    tolerances. Never simulates. Mutates ``states`` in place on success.
    """
    if not i < j:
        raise ValueError(f"exchange requires i < j, got ({i}, {j})")
    state_j = states[j]
    if not state_j.distance < tolerances[i]:
        return False
    state_i = states[i]
    states[i] = state_j
    states[j] = state_i
    state_i.chain_index = j
    state_j.chain_index = i
    return True


def _all_pairs(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def pt_exchange_phase_uniform(states, tolerances, n_proposals: int,
                              selection: RngStream, pairs=None):
    """Propose ``n_proposals`` uniformly chosen pairs, applied sequentially.

    Pairs are drawn with replacement from all unordered pairs, so a chain
    swapped earlier in the phase can be selected again. Returns the event
    list ``[(i, j, status), ...]`` in proposal order.
    """
    if pairs is None:
        pairs = _all_pairs(len(states))
    n_pairs = len(pairs)
    events = []
    append = events.append
    rnd = selection.random
    for _ in range(n_proposals):
        i, j = pairs[int(rnd() * n_pairs)]
        accepted = pt_exchange_attempt(states, tolerances, i, j)
        append((i, j, EXCHANGE_ACCEPTED if accepted else EXCHANGE_REJECTED))
    return events


def pt_exchange_phase_rings(states, tolerances, boundaries, n_proposals: int,
                            selection: RngStream, debug_checks: bool = False):
    """Propose pairs restricted to chains currently sharing a distance ring.

    Each proposal picks uniformly among rings holding at least two chains,
    then a uniform unordered pair inside that ring. A proposal finding no
    eligible ring is recorded as skipped. Membership is computed from the
    current states; within a phase it cannot drift, because an accepted
    swap only trades distances between two chains of the same ring
    (asserted when ``debug_checks`` is on).
    """
    interior = list(boundaries)[1:-1]
    members: list[list[int]] = [[] for _ in range(len(interior) + 1)]
    for pos, state in enumerate(states):
        d = state.distance
        k = 0
        for b in interior:
            if d <= b:
                break
            k += 1
        members[k].append(pos)
    if debug_checks:
        for pos, state in enumerate(states):
            assert pos in members[ring_index(state.distance, list(boundaries))]
    # member lists come out ascending, so within-ring pairs are born ordered
    eligible = []
    for ring in members:
        size = len(ring)
        if size >= 2:
            eligible.append([(ring[a], ring[b])
                             for a in range(size) for b in range(a + 1, size)])
    n_eligible = len(eligible)
    events = []
    append = events.append
    rnd = selection.random
    for _ in range(n_proposals):
        if not n_eligible:
            append((0, 0, EXCHANGE_SKIPPED))
            continue
        ring_pairs = eligible[int(rnd() * n_eligible)]
        i, j = ring_pairs[int(rnd() * len(ring_pairs))]
        accepted = pt_exchange_attempt(states, tolerances, i, j)
        append((i, j, EXCHANGE_ACCEPTED if accepted else EXCHANGE_REJECTED))
        if debug_checks and accepted:
            for pos, state in enumerate(states):
                ring_now = ring_index(state.distance, list(boundaries))
                assert pos in members[ring_now], "ring membership drifted within a phase"
    return events


def run_abc_pt(config: PtConfig, model: ModelBinding, observed_summary=None,
               progress=None) -> Trace:
    """Full population run: tempered local moves then an exchange phase.

    Per iteration, every chain makes one local move computed from the
    pre-iteration states (chains never read each other during the local
    phase, so any scheduling gives identical results), followed by
    ``exchanges_per_iteration`` exchange proposals applied sequentially
    by a single coordinator. With ``exchanges_per_iteration == 0`` the
    chains are independent MCMC runs. The trace records every iteration;
    ``progress``, if given, is called with the iteration index.
    """
    if observed_summary is None:
        observed_summary = model.observed_summary
    n = config.n_chains
    streams = rng_streams(config.master_seed, n)
    selection = streams[n]
    states = pt_initialize(config, model, observed_summary, streams)

    eps = [float(e) for e in config.tolerances]
    temps = [float(t) for t in config.temperatures]
    iterations = config.iterations
    per_iter = config.exchanges_per_iteration
    boundaries = None
    if config.ring_count is not None:
        boundaries = ring_partition(config.tolerances, config.ring_count).tolist()
    pairs = _all_pairs(n)

    thetas = np.empty((iterations, n, model.dim))
    local_accepts = np.empty((iterations, n), dtype=bool)
    event_i = np.zeros(iterations * per_iter, dtype=np.uint16)
    event_j = np.zeros(iterations * per_iter, dtype=np.uint16)
    event_status = np.zeros(iterations * per_iter, dtype=np.uint8)

    pool = ThreadPoolExecutor(config.n_workers) if config.n_workers > 1 else None
    step = abc_mcmc_step

    def move(i):
        return step(states[i], model, observed_summary, eps[i], temps[i], streams[i])

    try:
        offset = 0
        for t in range(iterations):
            if pool is not None:
                results = list(pool.map(move, range(n)))
            else:
                results = [move(i) for i in range(n)]
            for i in range(n):
                accepted, state = results[i]
                states[i] = state
                local_accepts[t, i] = accepted
            if per_iter:
                if boundaries is None:
                    events = pt_exchange_phase_uniform(states, eps, per_iter,
                                                       selection, pairs)
                else:
                    events = pt_exchange_phase_rings(states, eps, boundaries,
                                                     per_iter, selection,
                                                     config.debug_checks)
                for i, j, status in events:
                    event_i[offset] = i
                    event_j[offset] = j
                    event_status[offset] = status
                    offset += 1
            for i in range(n):
                thetas[t, i] = states[i].theta
            if config.debug_checks:
                for i in range(n):
                    assert states[i].distance < eps[i], "tolerance invariant broken"
                    recomputed = model.distance(
                        model.summarize(states[i].dataset), observed_summary)
                    assert states[i].distance == recomputed, "distance cache stale"
            if progress is not None:
                progress(t)
    finally:
        if pool is not None:
            pool.shutdown()

    meta = {"algorithm": "pt", **config.to_dict()}
    if boundaries is not None:
        meta["ring_boundaries"] = boundaries
    return Trace(
        thetas=thetas,
        local_accepts=local_accepts,
        exchange_i=event_i,
        exchange_j=event_j,
        exchange_status=event_status,
        exchanges_per_iteration=per_iter,
        meta=meta,
    )
