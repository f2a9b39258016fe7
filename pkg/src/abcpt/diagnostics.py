"""Post-run analysis: acceptance tables, exchange matrices, ACF, summaries, densities."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .trace import EXCHANGE_ACCEPTED, EXCHANGE_SKIPPED, Trace

__all__ = [
    "autocorrelation",
    "thin",
    "AcceptanceTable",
    "acceptance_table",
    "ExchangeMatrix",
    "exchange_matrix",
    "PosteriorSummary",
    "posterior_summary",
    "DensityExport",
    "density_export",
    "silverman_bandwidth",
]


def autocorrelation(series, lag: int) -> float:
    """Sample autocorrelation at ``lag`` (divisor-n covariance convention)."""
    x = np.asarray(series, dtype=float).ravel()
    if lag < 0:
        raise ValueError("lag must be >= 0")
    if lag >= x.size:
        raise ValueError(f"lag {lag} needs a series longer than {x.size}")
    x = x - x.mean()
    var = float(x @ x)
    if var == 0.0:
        raise ValueError("autocorrelation undefined for a constant series")
    if lag == 0:
        return 1.0
    return float(x[:-lag] @ x[lag:]) / var


def thin(series, k: int):
    """Every k-th element, starting from the first."""
    if k < 1:
        raise ValueError("thinning factor must be >= 1")
    return np.asarray(series)[::k]


@dataclass(frozen=True)
class AcceptanceTable:
    """Per-chain local acceptance rates and accepted-exchange involvement."""

    local_rates: np.ndarray
    exchange_counts: np.ndarray
    iterations: int

    @property
    def mean_accepted_exchanges_per_iteration(self) -> float:
        """Accepted exchange events (not chain involvements) per iteration."""
        return float(self.exchange_counts.sum()) / (2.0 * self.iterations)


def acceptance_table(trace: Trace) -> AcceptanceTable:
    """Table-1-shaped rates: local accepts / iterations and exchange counts."""
    if trace.iterations == 0:
        raise ValueError("empty trace")
    rates = trace.local_accepts.mean(axis=0)
    counts = np.zeros(trace.n_chains, dtype=np.int64)
    accepted = trace.exchange_status == EXCHANGE_ACCEPTED
    np.add.at(counts, trace.exchange_i[accepted].astype(np.int64), 1)
    np.add.at(counts, trace.exchange_j[accepted].astype(np.int64), 1)
    return AcceptanceTable(local_rates=rates, exchange_counts=counts,
                           iterations=trace.iterations)


@dataclass(frozen=True)
class ExchangeMatrix:
    """Upper-triangular exchange rates with local rates on the diagonal.

    ``per-iteration`` mode divides accepted counts by the iteration count;
    ``per-proposal`` divides by how often each pair was proposed (0 for
    never-proposed pairs).
    """

    values: np.ndarray
    mode: str


def exchange_matrix(trace: Trace, mode: str = "per-iteration") -> ExchangeMatrix:
    if mode not in ("per-iteration", "per-proposal"):
        raise ValueError(f"unknown exchange-matrix mode {mode!r}")
    n = trace.n_chains
    accepted = np.zeros((n, n))
    proposed = np.zeros((n, n))
    live = trace.exchange_status != EXCHANGE_SKIPPED
    i_idx = trace.exchange_i[live].astype(np.int64)
    j_idx = trace.exchange_j[live].astype(np.int64)
    acc = (trace.exchange_status[live] == EXCHANGE_ACCEPTED).astype(float)
    np.add.at(proposed, (i_idx, j_idx), 1.0)
    np.add.at(accepted, (i_idx, j_idx), acc)
    if mode == "per-iteration":
        values = accepted / trace.iterations
    else:
        with np.errstate(invalid="ignore"):
            values = np.where(proposed > 0, accepted / np.maximum(proposed, 1), 0.0)
    values[np.diag_indices(n)] = acceptance_table(trace).local_rates
    return ExchangeMatrix(values=values, mode=mode)


@dataclass(frozen=True)
class PosteriorSummary:
    """Mean, median and central 95% interval per (possibly transformed) coordinate."""

    mean: np.ndarray
    median: np.ndarray
    ci_low: np.ndarray
    ci_high: np.ndarray


def posterior_summary(samples, transform=None) -> PosteriorSummary:
    """Columnwise summaries; quantiles interpolate linearly between order stats."""
    x = np.asarray(samples, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.shape[0] < 2:
        raise ValueError("need at least 2 samples to summarize")
    if transform is not None:
        x = np.asarray(transform(x), dtype=float)
        if x.ndim == 1:
            x = x[:, None]
    lo, med, hi = np.quantile(x, [0.025, 0.5, 0.975], axis=0)
    return PosteriorSummary(mean=x.mean(axis=0), median=med, ci_low=lo, ci_high=hi)


def silverman_bandwidth(samples) -> float:
    """Silverman's rule of thumb, 0.9 min(sd, IQR/1.34) n^(-1/5)."""
    x = np.asarray(samples, dtype=float).ravel()
    sd = x.std(ddof=1)
    q75, q25 = np.quantile(x, [0.75, 0.25])
    spread = min(sd, (q75 - q25) / 1.34) or sd
    if spread <= 0:
        raise ValueError("degenerate sample spread; supply a bandwidth explicitly")
    return 0.9 * spread * x.size ** (-0.2)


@dataclass(frozen=True)
class DensityExport:
    """Gaussian-kernel density estimate plus fixed-width histogram counts."""

    grid: np.ndarray
    density: np.ndarray
    bandwidth: float
    bin_edges: np.ndarray
    counts: np.ndarray


def density_export(samples, grid, bandwidth: float | None = None,
                   n_bins: int = 100) -> DensityExport:
    """KDE of scalar samples on ``grid`` (array or (lo, hi, points) spec)."""
    x = np.asarray(samples, dtype=float).ravel()
    if x.size < 2:
        raise ValueError("need at least 2 samples")
    if not isinstance(grid, np.ndarray):
        lo, hi, n_points = grid
        grid = np.linspace(lo, hi, int(n_points))
    if bandwidth is None:
        bandwidth = silverman_bandwidth(x)
    if bandwidth <= 0:
        raise ValueError(f"bandwidth must be positive, got {bandwidth}")
    norm = 1.0 / (x.size * bandwidth * np.sqrt(2.0 * np.pi))
    density = np.empty(grid.size)
    block = max(1, 2**22 // max(x.size, 1))
    for start in range(0, grid.size, block):
        pts = grid[start:start + block, None]
        z = (pts - x[None, :]) / bandwidth
        density[start:start + block] = norm * np.exp(-0.5 * z * z).sum(axis=1)
    counts, edges = np.histogram(x, bins=n_bins, range=(grid[0], grid[-1]))
    return DensityExport(grid=grid, density=density, bandwidth=float(bandwidth),
                         bin_edges=edges, counts=counts)
