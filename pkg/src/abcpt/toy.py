"""Gaussian-mixture toy model with closed-form target densities.

The model draws a single observation from a three-component mixture
``w1*N(theta, 1) + w2*N(theta, 1/100) + w3*N(theta-5, 1)`` under a
uniform prior on [-10, 10]; summaries are the raw draw and the distance
is ``|z - x|``. Because the hit probability ``P(|z - x| < eps | theta)``
has a closed form in the standard-normal CDF, both the exact posterior
and its tolerance-smeared approximation are available analytically and
serve as oracles for the samplers.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy.integrate import quad
from scipy.special import ndtr

from .model import ModelBinding
from .rng import RngStream

__all__ = [
    "ToyModel",
    "toy_hit_probability",
    "toy_eps_posterior_density",
    "toy_exact_posterior_density",
    "toy_exact_posterior_mass",
]

PRIOR_LO, PRIOR_HI = -10.0, 10.0
DEFAULT_WEIGHTS = (0.45, 0.45, 0.1)
_OFFSETS = (0.0, 0.0, -5.0)
_SDS = (1.0, 0.1, 1.0)
_LOG_PRIOR = -math.log(PRIOR_HI - PRIOR_LO)
_SQRT2 = math.sqrt(2.0)


class ToyModel(ModelBinding):
    """Mixture-of-Gaussians model for a single scalar observation.

    Parameters
    ----------
    weights : tuple of 3 floats
        Mixture weights for the components N(theta, 1), N(theta, 1/100)
        and N(theta - 5, 1); must sum to 1. The default reproduces the
        bimodal target; ``(0.5, 0.5, 0.0)`` removes the separated mode.
    observed : float
        The observed data point (0 by default).
    kernel_sd : float
        Base standard deviation of the Gaussian random-walk proposal;
        at temperature T the proposal variance is ``kernel_sd**2 * T``.
    """

    symmetric_proposal = True

    def __init__(self, weights=DEFAULT_WEIGHTS, observed: float = 0.0,
                 kernel_sd: float = 0.15):
        if len(weights) != 3 or abs(sum(weights) - 1.0) > 1e-12 or min(weights) < 0:
            raise ValueError(f"weights must be 3 nonnegative values summing to 1: {weights}")
        self.weights = tuple(float(w) for w in weights)
        self.observed = float(observed)
        self.kernel_sd = float(kernel_sd)
        self._w01 = self.weights[0] + self.weights[1]

    @property
    def dim(self) -> int:
        return 1

    @property
    def observed_summary(self) -> float:
        return self.observed

    def prior_sample(self, rng: RngStream) -> np.ndarray:
        return np.array([PRIOR_LO + (PRIOR_HI - PRIOR_LO) * rng.random()])

    def prior_log_density(self, theta) -> float:
        t = theta[0]
        return _LOG_PRIOR if PRIOR_LO <= t <= PRIOR_HI else -math.inf

    def simulate(self, theta, rng: RngStream) -> float:
        t = theta[0]
        u = rng.random()
        if u < self.weights[0]:
            return t + rng.standard_normal()
        if u < self._w01:
            return t + 0.1 * rng.standard_normal()
        return t - 5.0 + rng.standard_normal()

    def summarize(self, dataset: float) -> float:
        return dataset

    def distance(self, summary: float, observed: float) -> float:
        return abs(summary - observed)

    def propose(self, theta, temperature: float, rng: RngStream) -> np.ndarray:
        sd = self.kernel_sd * math.sqrt(temperature)
        return np.array([theta[0] + sd * rng.standard_normal()])

    def proposal_log_density(self, theta_to, theta_from, temperature: float) -> float:
        var = self.kernel_sd * self.kernel_sd * temperature
        d = theta_to[0] - theta_from[0]
        return -0.5 * (d * d / var + math.log(2.0 * math.pi * var))


def _phi_interval(lo, hi):
    """Phi(hi) - Phi(lo) without cancellation in the upper tail.

    When both endpoints are positive, the complement-tail form
    ``Phi(-lo) - Phi(-hi)`` keeps full relative precision where the
    direct difference of two values near 1 would round to zero.
    """
    direct = ndtr(hi) - ndtr(lo)
    tail = ndtr(-lo) - ndtr(-hi)
    return np.where(lo > 0.0, tail, direct)


def toy_hit_probability(theta, epsilon: float, weights=DEFAULT_WEIGHTS,
                        observed: float = 0.0):
    """``P(|z - x| < eps | theta)`` from the standard-normal CDF.

    For the default observation x=0 this is the unnormalized
    tolerance-smeared posterior (the flat prior only rescales it).
    Accepts scalars or arrays in ``theta``.
    """
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    theta = np.asarray(theta, dtype=float)
    total = np.zeros_like(theta)
    for w, off, sd in zip(weights, _OFFSETS, _SDS):
        if w == 0.0:
            continue
        hi = (observed + epsilon - theta - off) / sd
        lo = (observed - epsilon - theta - off) / sd
        total = total + w * _phi_interval(lo, hi)
    return total if total.ndim else float(total)


@lru_cache(maxsize=64)
def _eps_normalizer(epsilon: float, weights, observed: float) -> float:
    val, _ = quad(
        lambda t: toy_hit_probability(t, epsilon, weights, observed),
        PRIOR_LO, PRIOR_HI,
        epsabs=1e-13, epsrel=1e-12, limit=400,
        points=[observed - 1, observed, observed + 1,
                observed + 4, observed + 5, observed + 6],
    )
    return val


def toy_eps_posterior_density(theta, epsilon: float, normalized: bool = True,
                              weights=DEFAULT_WEIGHTS, observed: float = 0.0):
    """Tolerance-smeared posterior density on the prior support.

    The unnormalized variant equals the hit probability; the normalized
    one divides by an adaptive-quadrature normalizer (cached per
    tolerance), so it integrates to 1 over [-10, 10].
    """
    theta = np.asarray(theta, dtype=float)
    inside = (theta >= PRIOR_LO) & (theta <= PRIOR_HI)
    dens = np.where(inside, toy_hit_probability(theta, epsilon, weights, observed), 0.0)
    if normalized:
        dens = dens / _eps_normalizer(float(epsilon), tuple(weights), float(observed))
    return dens if dens.ndim else float(dens)


@lru_cache(maxsize=16)
def _exact_normalizer(weights, observed: float) -> float:
    val, _ = quad(
        lambda t: _exact_unnormalized(t, weights, observed),
        PRIOR_LO, PRIOR_HI,
        epsabs=1e-14, epsrel=1e-12, limit=400,
        points=[observed - 1, observed, observed + 1,
                observed + 4, observed + 5, observed + 6],
    )
    return val


def _exact_unnormalized(theta, weights, observed):
    theta = np.asarray(theta, dtype=float)
    total = np.zeros_like(theta)
    for w, off, sd in zip(weights, _OFFSETS, _SDS):
        if w == 0.0:
            continue
        u = (theta + off - observed) / sd
        total = total + w * np.exp(-0.5 * u * u) / (sd * math.sqrt(2 * math.pi))
    return total


def toy_exact_posterior_density(theta, weights=DEFAULT_WEIGHTS,
                                observed: float = 0.0):
    """Exact posterior density: the reflected mixture truncated to [-10, 10]."""
    theta = np.asarray(theta, dtype=float)
    inside = (theta >= PRIOR_LO) & (theta <= PRIOR_HI)
    dens = np.where(inside, _exact_unnormalized(theta, weights, observed), 0.0)
    dens = dens / _exact_normalizer(tuple(weights), float(observed))
    return dens if dens.ndim else float(dens)


def toy_exact_posterior_mass(lo: float, hi: float, weights=DEFAULT_WEIGHTS,
                             observed: float = 0.0) -> float:
    """Exact posterior probability of the interval [lo, hi] by quadrature."""
    lo = max(lo, PRIOR_LO)
    hi = min(hi, PRIOR_HI)
    if hi <= lo:
        return 0.0
    val, _ = quad(lambda t: _exact_unnormalized(t, weights, observed),
                  lo, hi, epsabs=1e-14, epsrel=1e-12, limit=400)
    return val / _exact_normalizer(tuple(weights), float(observed))
