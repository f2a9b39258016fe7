"""Tuberculosis transmission model: birth-death-mutation simulator and summaries.

An epidemic grows from a single case of one ancestral genotype. Cases
split (new infection), die/recover, or mutate into a brand-new genotype,
with per-case rates alpha, delta and theta. The observed dataset is the
multiset of genotype-cluster sizes among a fixed-size sample of cases;
summaries are the number of distinct genotypes g and the gene diversity
H = 1 - sum((n_i/n)^2).

Event times never enter the summaries, so the simulator realizes only
the embedded jump chain: event types occur with probabilities
proportional to (alpha, delta, theta) and affect a uniformly chosen
case. This has the same final-configuration law as the full
continuous-time process.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import ModelBinding
from .rng import RngStream

__all__ = [
    "EXTINCT",
    "ClusterConfiguration",
    "EpidemicPopulation",
    "SimulationBudgetError",
    "TbModel",
    "TB_OBSERVED",
    "TB_KERNEL_SIGMA",
    "simulate_epidemic",
    "subsample_cases",
    "stat_g",
    "stat_H",
    "tb_derived_params",
    "spd_power",
    "load_cluster_file",
]

ALPHA, DELTA, THETA_MUT = 0, 1, 2  # parameter vector layout

RATE_UPPER = 5.0  # uniform prior upper bound for birth/death rates
MUT_PRIOR_MEAN = 0.198
MUT_PRIOR_SD = 0.06735

TB_KERNEL_SIGMA = np.array([
    [0.5**2, 0.225, 0.0],
    [0.225, 0.5**2, 0.0],
    [0.0, 0.0, 0.015**2],
])

DEFAULT_STOP_SIZE = 10000
DEFAULT_MAX_EVENTS = 20_000_000


class SimulationBudgetError(RuntimeError):
    """Raised when an epidemic simulation exceeds its event budget."""


class _Extinct:
    """Sentinel dataset: the epidemic died out before reaching the stop size."""

    def __repr__(self):
        return "EXTINCT"


EXTINCT = _Extinct()


@dataclass(frozen=True)
class ClusterConfiguration:
    """Multiset of genotype cluster sizes in a sample of cases."""

    sizes: np.ndarray

    def __post_init__(self):
        sizes = np.asarray(self.sizes, dtype=np.int64)
        if sizes.size and sizes.min() < 1:
            raise ValueError("cluster sizes must be positive")
        object.__setattr__(self, "sizes", sizes)

    @property
    def n(self) -> int:
        """Total number of sampled cases."""
        return int(self.sizes.sum())

    def as_pairs(self) -> list[tuple[int, int]]:
        """(size, count) pairs, largest size first."""
        sizes, counts = np.unique(self.sizes, return_counts=True)
        return [(int(s), int(c)) for s, c in zip(sizes[::-1], counts[::-1])]


def _expand(pairs) -> ClusterConfiguration:
    sizes = []
    for size, count in pairs:
        sizes.extend([size] * count)
    return ClusterConfiguration(np.array(sizes, dtype=np.int64))


# San Francisco 1991-92 IS6110 fingerprint data: 473 isolates in 326 genotypes.
TB_OBSERVED = _expand([
    (30, 1), (23, 1), (15, 1), (10, 1), (8, 1),
    (5, 2), (4, 4), (3, 13), (2, 20), (1, 282),
])


def load_cluster_file(path) -> ClusterConfiguration:
    """Read "size count" pairs (one per line, '#' comments) into a configuration."""
    pairs = []
    with open(path) as fh:
        for ln, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{ln}: expected 'size count', got {line!r}")
            size, count = int(parts[0]), int(parts[1])
            if size < 1 or count < 1:
                raise ValueError(f"{path}:{ln}: size and count must be positive")
            pairs.append((size, count))
    if not pairs:
        raise ValueError(f"{path}: no cluster data found")
    return _expand(pairs)


class EpidemicPopulation:
    """Live epidemic state: one genotype id per case.

    ``case_genotypes[:total_cases]`` assigns each current case its
    genotype; ``genotypes_ever`` counts every genotype created since the
    ancestral one, including extinct ones. Event counters support
    invariant audits (births - deaths reconstruct the size; every
    mutation and only a mutation mints a genotype).
    """

    def __init__(self, case_genotypes: np.ndarray, total_cases: int,
                 genotypes_ever: int, births: int = 0, deaths: int = 0,
                 mutations: int = 0):
        self.case_genotypes = case_genotypes
        self.total_cases = int(total_cases)
        self.genotypes_ever = int(genotypes_ever)
        self.births = int(births)
        self.deaths = int(deaths)
        self.mutations = int(mutations)

    @property
    def genotype_counts(self) -> dict[int, int]:
        """Map genotype id -> live case count (extinct genotypes dropped)."""
        counts = np.bincount(self.case_genotypes[: self.total_cases],
                             minlength=self.genotypes_ever)
        return {int(g): int(c) for g, c in enumerate(counts) if c > 0}


def simulate_epidemic(alpha: float, delta: float, theta_mut: float,
                      stop_size: int, rng: RngStream,
                      max_events: int = DEFAULT_MAX_EVENTS):
    """Run the jump chain until the case count hits ``stop_size`` or zero.

    Returns the final ``EpidemicPopulation``, or ``EXTINCT`` if the
    epidemic died out. Raises ``SimulationBudgetError`` after
    ``max_events`` events (pathological parameter guard).
    """
    if min(alpha, delta, theta_mut) < 0:
        raise ValueError("rates must be nonnegative")
    if stop_size < 1:
        raise ValueError("stop_size must be >= 1")
    total_rate = alpha + delta + theta_mut
    if total_rate == 0.0 and stop_size > 1:
        raise SimulationBudgetError("all rates are zero; the epidemic cannot grow")
    p_birth = alpha / total_rate if total_rate else 0.0
    p_birth_or_death = (alpha + delta) / total_rate if total_rate else 0.0

    cases = np.empty(stop_size + 1, dtype=np.int64)
    cases[0] = 0
    total = 1
    genotypes_ever = 1
    births = deaths = mutations = 0
    uniform = rng.random
    events = 0
    while total != stop_size:
        if total == 0:
            return EXTINCT
        events += 1
        if events > max_events:
            raise SimulationBudgetError(
                f"epidemic simulation exceeded {max_events} events "
                f"(alpha={alpha}, delta={delta}, theta={theta_mut})"
            )
        u = uniform()
        k = int(uniform() * total)
        if u < p_birth:
            cases[total] = cases[k]
            total += 1
            births += 1
        elif u < p_birth_or_death:
            total -= 1
            cases[k] = cases[total]
            deaths += 1
        else:
            cases[k] = genotypes_ever
            genotypes_ever += 1
            mutations += 1
    return EpidemicPopulation(cases, total, genotypes_ever, births, deaths,
                              mutations)


def subsample_cases(population: EpidemicPopulation, n: int,
                    rng: RngStream) -> ClusterConfiguration:
    """Cluster sizes among ``n`` cases drawn uniformly without replacement."""
    total = population.total_cases
    if n > total:
        raise ValueError(f"cannot sample {n} cases from a population of {total}")
    pool = population.case_genotypes[:total].copy()
    uniform = rng.random
    for i in range(n):
        j = i + int(uniform() * (total - i))
        pool[i], pool[j] = pool[j], pool[i]
    counts = np.bincount(pool[:n])
    return ClusterConfiguration(counts[counts > 0])


def stat_g(config: ClusterConfiguration) -> int:
    """Number of distinct genotypes in the sample."""
    return int(config.sizes.size)


def stat_H(config: ClusterConfiguration) -> float:
    """Gene diversity 1 - sum((n_i/n)^2)."""
    n = config.n
    return 1.0 - float(np.sum(config.sizes.astype(float) ** 2)) / (n * n)


def spd_power(matrix: np.ndarray, exponent: float) -> np.ndarray:
    """Symmetric positive-definite matrix power via spectral decomposition."""
    sym = np.asarray(matrix, dtype=float)
    if not np.allclose(sym, sym.T):
        raise ValueError("matrix must be symmetric")
    w, v = np.linalg.eigh(sym)
    if w.min() <= 0:
        raise ValueError(f"matrix must be positive definite (eigenvalues {w})")
    return (v * w**exponent) @ v.T


def tb_derived_params(params) -> tuple[float, float, float]:
    """Transmission rate, doubling time, and reproductive value.

    ``alpha == delta`` yields an infinite doubling time and ``delta == 0``
    an infinite reproductive value.
    """
    alpha, delta = float(params[ALPHA]), float(params[DELTA])
    rate = alpha - delta
    doubling = math.log(2.0) / rate if rate != 0.0 else math.inf
    reproductive = alpha / delta if delta != 0.0 else math.inf
    return rate, doubling, reproductive


TB_PARAM_LABELS = ("alpha", "delta", "mutation_rate")
TB_DERIVED_LABELS = ("transmission_rate", "doubling_time",
                     "reproductive_value", "mutation_rate")


def tb_derived_samples(samples) -> np.ndarray:
    """Columnwise ``tb_derived_params`` plus the raw mutation rate.

    Maps an (n, 3) array of (alpha, delta, mutation) draws to the four
    reported quantities, with infinities where the transforms degenerate.
    """
    x = np.asarray(samples, dtype=float)
    rate = x[:, ALPHA] - x[:, DELTA]
    with np.errstate(divide="ignore"):
        doubling = np.where(rate != 0.0, math.log(2.0) / np.where(rate != 0.0, rate, 1.0), np.inf)
        reproductive = np.where(x[:, DELTA] != 0.0,
                                x[:, ALPHA] / np.where(x[:, DELTA] != 0.0, x[:, DELTA], 1.0),
                                np.inf)
    return np.column_stack([rate, doubling, reproductive, x[:, THETA_MUT]])


class TbModel(ModelBinding):
    """Model binding for the genotype-cluster epidemic data.

    Parameters
    ----------
    observed : ClusterConfiguration, optional
        Observed cluster sizes (the built-in 473-isolate dataset by default).
        The sample size and the 1/n distance weight follow from it.
    stop_size : int
        Population size at which a simulated epidemic is frozen before
        subsampling. The data source this follows fixes neither this nor
        the treatment of extinct epidemics, so both are explicit knobs;
        extinction is scored as an infinite distance (automatic rejection).
    max_events : int
        Per-simulation event budget; exceeding it is a hard error.
    kernel_sigma : (3, 3) array, optional
        Proposal covariance at temperature 1. At temperature T the kernel
        uses the SPD matrix power ``sigma**(1/T)``.
    """

    symmetric_proposal = True

    def __init__(self, observed: ClusterConfiguration | None = None,
                 stop_size: int = DEFAULT_STOP_SIZE,
                 max_events: int = DEFAULT_MAX_EVENTS,
                 kernel_sigma: np.ndarray | None = None):
        self.observed = TB_OBSERVED if observed is None else observed
        self.stop_size = int(stop_size)
        self.max_events = int(max_events)
        self.kernel_sigma = TB_KERNEL_SIGMA if kernel_sigma is None else np.asarray(kernel_sigma, dtype=float)
        spd_power(self.kernel_sigma, 1.0)  # fail fast on a non-SPD kernel
        self.sample_size = self.observed.n
        if self.stop_size < self.sample_size:
            raise ValueError(
                f"stop_size {self.stop_size} below the observed sample size "
                f"{self.sample_size}; simulated epidemics could not be subsampled"
            )
        self._inv_n = 1.0 / self.sample_size
        self._observed_summary = (stat_g(self.observed), stat_H(self.observed))
        self._kernels: dict[float, tuple[np.ndarray, np.ndarray, float]] = {}
        # left tail cut at 0: normalizing constant of the truncated normal
        z = MUT_PRIOR_MEAN / MUT_PRIOR_SD
        self._log_trunc = math.log(0.5 * math.erfc(-z / math.sqrt(2.0)))
        self._log_rate_prior = math.log(2.0 / RATE_UPPER**2)

    @property
    def dim(self) -> int:
        return 3

    @property
    def observed_summary(self):
        return self._observed_summary

    def prior_sample(self, rng: RngStream) -> np.ndarray:
        while True:
            a = RATE_UPPER * rng.random()
            b = RATE_UPPER * rng.random()
            if a != b:
                break
        while True:
            mut = MUT_PRIOR_MEAN + MUT_PRIOR_SD * rng.standard_normal()
            if mut >= 0.0:
                break
        return np.array([max(a, b), min(a, b), mut])

    def prior_log_density(self, theta) -> float:
        alpha, delta, mut = theta[ALPHA], theta[DELTA], theta[THETA_MUT]
        if not (0.0 <= delta < alpha <= RATE_UPPER) or mut < 0.0:
            return -math.inf
        z = (mut - MUT_PRIOR_MEAN) / MUT_PRIOR_SD
        log_mut = (-0.5 * z * z - math.log(MUT_PRIOR_SD)
                   - 0.5 * math.log(2.0 * math.pi) - self._log_trunc)
        return self._log_rate_prior + log_mut

    def simulate(self, theta, rng: RngStream):
        population = simulate_epidemic(theta[ALPHA], theta[DELTA], theta[THETA_MUT],
                                       self.stop_size, rng, self.max_events)
        if population is EXTINCT:
            return EXTINCT
        return subsample_cases(population, self.sample_size, rng)

    def summarize(self, dataset):
        if dataset is EXTINCT:
            return None
        return (stat_g(dataset), stat_H(dataset))

    def distance(self, summary, observed) -> float:
        if summary is None or observed is None:
            return math.inf
        return self._inv_n * abs(summary[0] - observed[0]) + abs(summary[1] - observed[1])

    def _kernel(self, temperature: float):
        # lazy per-temperature cache; concurrent first calls may both compute
        # but store identical values, so no locking is needed under the GIL
        cached = self._kernels.get(temperature)
        if cached is None:
            cov = spd_power(self.kernel_sigma, 1.0 / temperature)
            chol = np.linalg.cholesky(cov)
            inv = np.linalg.inv(cov)
            logdet = float(np.linalg.slogdet(cov)[1])
            cached = (chol, inv, -0.5 * (3 * math.log(2.0 * math.pi) + logdet))
            self._kernels[temperature] = cached
        return cached

    def tempered_covariance(self, temperature: float) -> np.ndarray:
        """The proposal covariance ``sigma**(1/T)`` actually used at T."""
        chol, _, _ = self._kernel(temperature)
        return chol @ chol.T

    def propose(self, theta, temperature: float, rng: RngStream) -> np.ndarray:
        chol = self._kernel(temperature)[0]
        noise = np.array([rng.standard_normal(), rng.standard_normal(),
                          rng.standard_normal()])
        return theta + chol @ noise

    def proposal_log_density(self, theta_to, theta_from, temperature: float) -> float:
        _, inv, log_norm = self._kernel(temperature)
        d = np.asarray(theta_to, dtype=float) - np.asarray(theta_from, dtype=float)
        return float(log_norm - 0.5 * (d @ inv @ d))
