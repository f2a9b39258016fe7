"""CSV and JSON writers for run artifacts (locale-free, '.' decimals)."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .diagnostics import (AcceptanceTable, DensityExport, ExchangeMatrix,
                          PosteriorSummary)
from .trace import Trace

__all__ = [
    "write_acceptance_csv",
    "write_exchange_matrix_csv",
    "write_acf_csv",
    "write_summary_csv",
    "write_density_csv",
    "write_trace_csv",
    "write_report_json",
]


def _open_csv(path):
    return open(path, "w", newline="")


def write_acceptance_csv(path, table: AcceptanceTable, tolerances=None,
                         temperatures=None) -> None:
    with _open_csv(path) as fh:
        writer = csv.writer(fh)
        header = ["chain", "local_acceptance_rate", "accepted_exchanges"]
        if tolerances is not None:
            header.insert(1, "epsilon")
        if temperatures is not None:
            header.insert(2 if tolerances is not None else 1, "temperature")
        writer.writerow(header)
        for i in range(table.local_rates.size):
            row = [i + 1]
            if tolerances is not None:
                row.append(repr(float(tolerances[i])))
            if temperatures is not None:
                row.append(repr(float(temperatures[i])))
            row += [repr(float(table.local_rates[i])), int(table.exchange_counts[i])]
            writer.writerow(row)


def write_exchange_matrix_csv(path, matrix: ExchangeMatrix) -> None:
    n = matrix.values.shape[0]
    with _open_csv(path) as fh:
        writer = csv.writer(fh)
        writer.writerow(["mode", matrix.mode])
        writer.writerow(["chain"] + [f"chain_{j + 1}" for j in range(n)])
        for i in range(n):
            row = [f"chain_{i + 1}"]
            for j in range(n):
                row.append(repr(float(matrix.values[i, j])) if j >= i else "")
            writer.writerow(row)


def write_acf_csv(path, rows) -> None:
    """Rows of (thinning, n_samples, {lag: value})."""
    lags = sorted({lag for _, _, acfs in rows for lag in acfs})
    with _open_csv(path) as fh:
        writer = csv.writer(fh)
        writer.writerow(["thinning", "n_samples"] + [f"lag_{lag}" for lag in lags])
        for thinning, n_samples, acfs in rows:
            writer.writerow([thinning, n_samples]
                            + [repr(float(acfs[lag])) for lag in lags])


def write_summary_csv(path, summary: PosteriorSummary, labels) -> None:
    with _open_csv(path) as fh:
        writer = csv.writer(fh)
        writer.writerow(["parameter", "mean", "median", "ci_2.5%", "ci_97.5%"])
        for k, label in enumerate(labels):
            writer.writerow([label, repr(float(summary.mean[k])),
                             repr(float(summary.median[k])),
                             repr(float(summary.ci_low[k])),
                             repr(float(summary.ci_high[k]))])


def write_density_csv(path, export: DensityExport) -> None:
    with _open_csv(path) as fh:
        writer = csv.writer(fh)
        writer.writerow(["grid", "density"])
        for g, d in zip(export.grid, export.density):
            writer.writerow([repr(float(g)), repr(float(d))])
    hist_path = Path(path).with_name(Path(path).stem + "_histogram.csv")
    with _open_csv(hist_path) as fh:
        writer = csv.writer(fh)
        writer.writerow(["bin_low", "bin_high", "count"])
        for lo, hi, c in zip(export.bin_edges[:-1], export.bin_edges[1:],
                             export.counts):
            writer.writerow([repr(float(lo)), repr(float(hi)), int(c)])


def write_trace_csv(samples_path, exchanges_path, trace: Trace) -> None:
    """Long-format dump: one row per (iteration, chain), plus the exchange log."""
    dim = trace.dim
    with _open_csv(samples_path) as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "chain"]
                        + [f"theta_{k}" for k in range(dim)] + ["local_accepted"])
        for t in range(trace.iterations):
            for i in range(trace.n_chains):
                writer.writerow([t, i + 1]
                                + [repr(float(v)) for v in trace.thetas[t, i]]
                                + [int(trace.local_accepts[t, i])])
    with _open_csv(exchanges_path) as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "i", "j", "status"])
        status_names = {0: "rejected", 1: "accepted", 2: "skipped"}
        iters = trace.exchange_iterations()
        for k in range(trace.exchange_status.size):
            writer.writerow([int(iters[k]), int(trace.exchange_i[k]) + 1,
                             int(trace.exchange_j[k]) + 1,
                             status_names[int(trace.exchange_status[k])]])


def _jsonable(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def write_report_json(path, report: dict) -> None:
    with open(path, "w") as fh:
        json.dump(_jsonable(report), fh, indent=2, sort_keys=True)
        fh.write("\n")
