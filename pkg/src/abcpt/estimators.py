"""Scikit-learn-style estimator fronts for the three samplers.

Each estimator stores its constructor arguments untouched (so
``get_params`` / ``set_params`` and grid-style composition work), then
validates and runs at ``fit`` time, exposing results through
trailing-underscore attributes. ``X`` in ``fit(X)`` is an optional raw
observed dataset in the model's own dataset space; when omitted, the
model's built-in observation is used.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from .config import DEFAULT_REJECTION_CAP, PtConfig
from .diagnostics import acceptance_table
from .model import ChainState, ModelBinding
from .rng import rng_streams
from .samplers import _rejection_draw, abc_mcmc_run, abc_rejection, run_abc_pt
from .schedules import ring_partition

__all__ = ["RejectionSampler", "McmcSampler", "PtSampler"]


def _check_model(model):
    if not isinstance(model, ModelBinding):
        raise TypeError(f"model must be a ModelBinding, got {type(model).__name__}")
    return model


class RejectionSampler(BaseEstimator):
    """Standard rejection-style likelihood-free sampler.

    Parameters
    ----------
    model : ModelBinding
    epsilon : float
        Acceptance tolerance on the summary distance.
    n_samples : int
        Number of accepted draws to collect.
    max_attempts : int or None
        Total proposal budget; exceeding it raises ``RejectionCapError``.
    random_state : int
        Master seed.

    Attributes
    ----------
    samples_ : ndarray of shape (n_samples, dim)
    n_proposals_ : int
    acceptance_rate_ : float
    """

    def __init__(self, model=None, epsilon=1.0, n_samples=1000,
                 max_attempts=DEFAULT_REJECTION_CAP, random_state=0):
        self.model = model
        self.epsilon = epsilon
        self.n_samples = n_samples
        self.max_attempts = max_attempts
        self.random_state = random_state

    def fit(self, X=None, y=None):
        model = _check_model(self.model)
        rng = rng_streams(int(self.random_state), 1)[0]
        observed = model.summary_for(X)
        self.observed_summary_ = observed
        self.samples_, self.n_proposals_ = abc_rejection(
            model, float(self.epsilon), int(self.n_samples), rng,
            observed_summary=observed, max_attempts=self.max_attempts)
        self.acceptance_rate_ = self.n_samples / self.n_proposals_
        return self


class McmcSampler(BaseEstimator):
    """Single-chain Markov sampler with the distance-indicator acceptance.

    The chain starts from a rejection-sampled state at the same tolerance.
    ``samples_`` holds the post-burn-in, thinned draws; ``trace_`` keeps
    every iteration.
    """

    def __init__(self, model=None, epsilon=1.0, n_iterations=10000, burn_in=0,
                 thin=1, max_attempts=DEFAULT_REJECTION_CAP, random_state=0):
        self.model = model
        self.epsilon = epsilon
        self.n_iterations = n_iterations
        self.burn_in = burn_in
        self.thin = thin
        self.max_attempts = max_attempts
        self.random_state = random_state

    def fit(self, X=None, y=None):
        model = _check_model(self.model)
        if not 0 <= self.burn_in <= self.n_iterations:
            raise ValueError("burn_in must lie in [0, n_iterations]")
        rng = rng_streams(int(self.random_state), 1)[0]
        observed = model.summary_for(X)
        theta, dataset, summary, dist, _ = _rejection_draw(
            model, observed, float(self.epsilon), rng, self.max_attempts)
        init = ChainState(theta, dataset, summary, dist, 0)
        self.trace_ = abc_mcmc_run(
            model, float(self.epsilon), int(self.n_iterations), init, rng,
            observed_summary=observed, burn_in=int(self.burn_in),
            thinning=int(self.thin))
        self.samples_ = self.trace_.samples(0)
        self.acceptance_rate_ = float(self.trace_.local_accepts.mean())
        self.observed_summary_ = observed
        return self


class PtSampler(BaseEstimator):
    """Population of tempered chains with likelihood-free exchange moves.

    Parameters
    ----------
    model : ModelBinding
    tolerances : sequence of float
        Strictly increasing ladder; its length fixes the number of chains.
    temperatures : sequence of float or None
        Nondecreasing ladder starting at 1; None means all ones.
    n_iterations, burn_in, thin : int
        Iteration budget and extraction defaults.
    n_exchanges : int or None
        Exchange proposals per iteration (None: one per chain). 0 turns
        the run into independent parallel chains.
    n_rings : int or None
        Number of distance rings used to restrict pair selection; None
        selects pairs uniformly.
    random_state : int
        Master seed for all chain and selection streams.
    n_workers : int
        Worker threads for the local-move phase; results do not depend
        on it.

    Attributes
    ----------
    trace_ : Trace
    samples_ : ndarray
        Post-burn-in, thinned draws of the first (lowest-tolerance) chain.
    local_acceptance_rates_ : ndarray of shape (n_chains,)
    accepted_exchanges_ : int
    ring_boundaries_ : ndarray or None
    """

    def __init__(self, model=None, tolerances=(0.1, 1.0), temperatures=None,
                 n_iterations=1000, burn_in=0, thin=1, n_exchanges=None,
                 n_rings=None, random_state=0, n_workers=1,
                 max_attempts=DEFAULT_REJECTION_CAP, debug_checks=False):
        self.model = model
        self.tolerances = tolerances
        self.temperatures = temperatures
        self.n_iterations = n_iterations
        self.burn_in = burn_in
        self.thin = thin
        self.n_exchanges = n_exchanges
        self.n_rings = n_rings
        self.random_state = random_state
        self.n_workers = n_workers
        self.max_attempts = max_attempts
        self.debug_checks = debug_checks

    def _config(self) -> PtConfig:
        tolerances = np.asarray(self.tolerances, dtype=float)
        temperatures = self.temperatures
        if temperatures is None:
            temperatures = np.ones_like(tolerances)
        return PtConfig(
            tolerances=tolerances,
            temperatures=np.asarray(temperatures, dtype=float),
            iterations=int(self.n_iterations),
            burn_in=int(self.burn_in),
            thinning=int(self.thin),
            exchanges_per_iteration=self.n_exchanges,
            ring_count=self.n_rings,
            master_seed=int(self.random_state),
            rejection_cap=self.max_attempts,
            n_workers=int(self.n_workers),
            debug_checks=bool(self.debug_checks),
        )

    def fit(self, X=None, y=None, progress=None):
        model = _check_model(self.model)
        config = self._config()
        observed = model.summary_for(X)
        self.observed_summary_ = observed
        self.trace_ = run_abc_pt(config, model, observed_summary=observed,
                                 progress=progress)
        self.samples_ = self.trace_.samples(0)
        table = acceptance_table(self.trace_)
        self.local_acceptance_rates_ = table.local_rates
        self.accepted_exchanges_ = self.trace_.accepted_exchange_count()
        self.ring_boundaries_ = (
            ring_partition(config.tolerances, config.ring_count)
            if config.ring_count is not None else None)
        return self
