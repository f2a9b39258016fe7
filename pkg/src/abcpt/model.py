"""Generative-model interface and per-chain sampler state.

A model binding packages everything the samplers need to know about a
generative model: prior, simulator, summary statistic, distance, and a
(possibly tempered) proposal kernel. Datasets and summaries are opaque to
the samplers; only the binding's own ``summarize`` and ``distance`` ever
touch them, so bindings are free to use whatever representation is
fastest (floats, tuples, arrays).
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any

import numpy as np

from .rng import RngStream

__all__ = ["ModelBinding", "ChainState", "make_state", "validate_model_binding"]


class ModelBinding(ABC):
    """Interface every generative model implements for the samplers.

    Implementations must be read-only after construction so that one
    binding can serve many chains concurrently. All randomness must come
    from the ``RngStream`` passed into each call.

    ``symmetric_proposal`` may be set to True by kernels whose forward and
    reverse log densities are equal for every pair of parameters; the
    local move then skips evaluating the (exactly zero) kernel ratio.
    The acceptance rule itself always carries the general ratio.
    """

    symmetric_proposal = False

    @abstractmethod
    def prior_sample(self, rng: RngStream) -> np.ndarray:
        """Draw a parameter vector from the prior."""

    @abstractmethod
    def prior_log_density(self, theta: np.ndarray) -> float:
        """Log prior density at ``theta`` (``-inf`` outside the support)."""

    @abstractmethod
    def simulate(self, theta: np.ndarray, rng: RngStream) -> Any:
        """Generate one synthetic dataset given ``theta``."""

    @abstractmethod
    def summarize(self, dataset: Any) -> Any:
        """Summary statistic of a dataset."""

    @abstractmethod
    def distance(self, summary: Any, observed: Any) -> float:
        """Nonnegative, symmetric discrepancy between two summaries."""

    @abstractmethod
    def propose(self, theta: np.ndarray, temperature: float, rng: RngStream) -> np.ndarray:
        """Draw a candidate parameter from the kernel around ``theta``."""

    @abstractmethod
    def proposal_log_density(
        self, theta_to: np.ndarray, theta_from: np.ndarray, temperature: float
    ) -> float:
        """Log density of proposing ``theta_to`` from ``theta_from``."""

    @property
    @abstractmethod
    def observed_summary(self) -> Any:
        """Summary of the built-in observed dataset."""

    @property
    @abstractmethod
    def dim(self) -> int:
        """Parameter dimension."""

    def summary_for(self, observed: Any = None) -> Any:
        """Summary of ``observed`` (a raw dataset), or the built-in one."""
        if observed is None:
            return self.observed_summary
        return self.summarize(observed)


@dataclass(slots=True)
class ChainState:
    """Current state of one chain: parameter, dataset, cached summary/distance.

    ``distance`` always equals ``model.distance(summary, observed_summary)``
    for the run's observed summary; exchanges swap the full payload so the
    cache never goes stale. ``chain_index`` is the 0-based position of the
    owning chain.
    """

    theta: np.ndarray
    dataset: Any
    summary: Any
    distance: float
    chain_index: int


def make_state(model: ModelBinding, theta: np.ndarray, dataset: Any,
               observed_summary: Any, chain_index: int) -> ChainState:
    """Build a chain state with its summary and distance caches filled."""
    summary = model.summarize(dataset)
    return ChainState(
        theta=theta,
        dataset=dataset,
        summary=summary,
        distance=model.distance(summary, observed_summary),
        chain_index=chain_index,
    )


def validate_model_binding(model: ModelBinding, rng: RngStream,
                           n_draws: int = 200) -> None:
    """Cheap coherence checks on a model binding; raises on violation.

    Verifies distance axioms (zero on identical summaries, symmetry,
    nonnegativity) on simulated summaries, that prior draws land inside
    the prior support, and that the proposal log density is finite and
    symmetric in its arguments at unit temperature (the built-in kernels
    are symmetric; a deliberately asymmetric kernel should override this
    check). Distribution-level consistency of ``propose`` against
    ``proposal_log_density`` is exercised by the Monte Carlo tests in
    ``proposal_consistency_check``.
    """
    theta = model.prior_sample(rng)
    if not np.all(np.isfinite(theta)):
        raise ValueError("prior_sample produced non-finite parameters")
    if model.prior_log_density(theta) == -np.inf:
        raise ValueError("prior_sample landed outside the prior support")
    obs = model.observed_summary
    if model.distance(obs, obs) != 0.0:
        raise ValueError("distance(s, s) must be 0")
    for _ in range(n_draws):
        t = model.prior_sample(rng)
        s = model.summarize(model.simulate(t, rng))
        d, d_rev = model.distance(s, obs), model.distance(obs, s)
        if d < 0:
            raise ValueError(f"negative distance {d}")
        if d != d_rev:
            raise ValueError(f"asymmetric distance: {d} != {d_rev}")
    a, b = model.prior_sample(rng), model.prior_sample(rng)
    fwd = model.proposal_log_density(a, b, 1.0)
    rev = model.proposal_log_density(b, a, 1.0)
    if not (np.isfinite(fwd) and np.isfinite(rev)):
        raise ValueError("proposal_log_density must be finite at prior draws")
    if abs(fwd - rev) > 1e-9 * max(1.0, abs(fwd)):
        raise ValueError("proposal kernel reports as symmetric but is not")


def proposal_consistency_check(model: ModelBinding, theta: np.ndarray,
                               temperature: float, rng: RngStream,
                               n_draws: int = 20000, mean_tol: float = 0.02,
                               spread_tol: float = 0.06) -> None:
    """Monte Carlo consistency of ``propose`` with ``proposal_log_density``.

    Draws from the kernel, fits a Gaussian to the draws, and compares
    the claimed log density against the fitted log density at the draws
    themselves. For a correct (near-)Gaussian kernel the residuals
    vanish up to O(d/sqrt(n)) fit noise; a density whose location,
    scale, correlation, or normalization disagrees with the draws shifts
    or spreads them by O(1). Deliberately non-Gaussian kernels need a
    bespoke check instead. Raises ``ValueError`` on mismatch.
    """
    draws = np.array([model.propose(theta, temperature, rng) for _ in range(n_draws)])
    d = draws.shape[1]
    mean = draws.mean(axis=0)
    cov = np.atleast_2d(np.cov(draws, rowvar=False)) + 1e-300 * np.eye(d)
    inv = np.linalg.inv(cov)
    delta = draws - mean
    log_fit = -0.5 * np.einsum("ij,jk,ik->i", delta, inv, delta) \
        - 0.5 * (d * np.log(2 * np.pi) + np.linalg.slogdet(cov)[1])
    log_q = np.array([model.proposal_log_density(x, theta, temperature)
                      for x in draws])
    resid = log_q - log_fit
    if abs(resid.mean()) > mean_tol or resid.std() > spread_tol:
        raise ValueError(
            f"proposal log density disagrees with the draw distribution "
            f"(residual mean {resid.mean():.4f}, spread {resid.std():.4f})"
        )
