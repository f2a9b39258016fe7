"""Command-line driver: configure, run, and export experiments.

Subcommands
-----------
``run``       execute a sampler and write a trace, a JSON run report, and
              diagnostic CSVs into the output directory.
``diagnose``  recompute tables (acceptance, exchange matrices, ACF,
              posterior summaries, densities) from a saved trace.
``validate``  run the fast analytic-oracle self-checks.

Config file schema (YAML; CLI flags override file fields, which override
preset fields)::

    model:
      preset: toy | tb         # required (via file or --preset)
      # toy options:
      weights: [0.45, 0.45, 0.1]
      observed: 0.0
      kernel_sd: 0.15
      # tb options:
      observed_file: clusters.txt   # "size count" per line
      stop_size: 10000
      max_events: 20000000
    algorithm: pt | mcmc | rejection
    seed: 0
    workers: 1
    out: runs/my-experiment
    pt:
      tolerances: [0.025, ..., 2.0]     # explicit ladder, or a generator:
      #tolerances: {lo: 0.025, hi: 2.0, n: 15, spacing: log}
      temperatures: {lo: 1.0, hi: 4.0, n: 15, spacing: log}
      iterations: 600000
      burn_in: 150000
      thinning: 1
      exchanges: 15            # default: one per chain; 0 = independent chains
      rings: 3                 # optional ring-partitioned pair selection
    mcmc:
      epsilon: 0.025
      iterations: 1000000
      burn_in: 250000
      thinning: 1
    rejection:
      epsilon: 0.025
      count: 5000
      max_attempts: 10000000
    export:
      trace_format: npz | csv | none    # default npz

The environment variable ``ABCPT_OUTPUT_DIR`` sets the base output
directory used when neither ``out`` nor ``--out`` is given.
"""

from __future__ import annotations

import argparse
import copy
import os
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .checks import run_all_checks
from .config import config_hash
from .diagnostics import (acceptance_table, autocorrelation, density_export,
                          exchange_matrix, posterior_summary, thin)
from .estimators import McmcSampler, PtSampler, RejectionSampler
from .presets import get_preset
from .report import (write_acceptance_csv, write_acf_csv, write_density_csv,
                     write_exchange_matrix_csv, write_report_json,
                     write_summary_csv, write_trace_csv)
from .samplers import RejectionCapError
from .schedules import log_spaced_schedule
from .tb import (SimulationBudgetError, TbModel, load_cluster_file,
                 tb_derived_samples, TB_DERIVED_LABELS, TB_PARAM_LABELS)
from .toy import ToyModel
from .trace import Trace

ENV_OUTPUT_DIR = "ABCPT_OUTPUT_DIR"


class ConfigError(ValueError):
    """A run specification failed validation; the message names the field."""


def _deep_merge(base: dict, override: dict) -> dict:
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def _resolve_schedule(spec, where: str):
    """Explicit array, [lo, hi, n, "log"] list, or {lo, hi, n, spacing} map."""
    if spec is None:
        raise ConfigError(f"{where}: missing schedule")
    if isinstance(spec, dict):
        try:
            lo, hi, n = spec["lo"], spec["hi"], spec["n"]
        except KeyError as err:
            raise ConfigError(f"{where}: generator spec needs lo/hi/n, missing {err}")
        spacing = spec.get("spacing", "log")
        if spacing != "log":
            raise ConfigError(f"{where}: unknown spacing {spacing!r}")
        return log_spaced_schedule(float(lo), float(hi), int(n))
    if (isinstance(spec, (list, tuple)) and len(spec) == 4
            and isinstance(spec[3], str)):
        if spec[3] != "log":
            raise ConfigError(f"{where}: unknown spacing {spec[3]!r}")
        return log_spaced_schedule(float(spec[0]), float(spec[1]), int(spec[2]))
    try:
        return np.asarray([float(v) for v in spec])
    except (TypeError, ValueError):
        raise ConfigError(f"{where}: expected numbers or a generator spec, got {spec!r}")


def _build_model(spec: dict):
    """Returns (model, name, parameter labels, summary transform or None)."""
    name = spec.get("preset")
    if name == "toy":
        model = ToyModel(
            weights=tuple(spec.get("weights", (0.45, 0.45, 0.1))),
            observed=float(spec.get("observed", 0.0)),
            kernel_sd=float(spec.get("kernel_sd", 0.15)),
        )
        return model, "toy", ["theta"], None
    if name == "tb":
        observed = None
        if spec.get("observed_file"):
            observed = load_cluster_file(spec["observed_file"])
        model = TbModel(
            observed=observed,
            stop_size=int(spec.get("stop_size", 10000)),
            max_events=int(spec.get("max_events", 20_000_000)),
        )
        return model, "tb", list(TB_PARAM_LABELS), tb_derived_samples
    raise ConfigError(f"model.preset: expected 'toy' or 'tb', got {name!r}")


def _load_config_file(path: str) -> dict:
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except yaml.YAMLError as err:
        raise ConfigError(f"{path}: {err}")
    except OSError as err:
        raise ConfigError(str(err))
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return data


_FLAG_OVERRIDES = (
    ("seed", ("seed",)),
    ("workers", ("workers",)),
    ("algorithm", ("algorithm",)),
    ("out", ("out",)),
    ("iterations", None),  # algorithm-dependent, handled below
    ("burn_in", None),
    ("thin", None),
    ("rings", ("pt", "rings")),
    ("exchanges", ("pt", "exchanges")),
    ("epsilon", None),
    ("count", ("rejection", "count")),
    ("trace_format", ("export", "trace_format")),
)


def _apply_flag(spec: dict, path: tuple[str, ...], value) -> None:
    node = spec
    for key in path[:-1]:
        node = node.setdefault(key, {})
    node[path[-1]] = value


def build_run_spec(args) -> dict:
    spec: dict = {}
    if args.preset:
        spec = get_preset(args.preset)
        spec["preset_name"] = args.preset
    if args.config:
        spec = _deep_merge(spec, _load_config_file(args.config))
    algorithm = args.algorithm or spec.get("algorithm")
    if algorithm not in ("pt", "mcmc", "rejection"):
        raise ConfigError(f"algorithm: expected pt/mcmc/rejection, got {algorithm!r}")
    spec["algorithm"] = algorithm
    for flag, path in _FLAG_OVERRIDES:
        value = getattr(args, flag, None)
        if value is None or path is None:
            continue
        _apply_flag(spec, path, value)
    section = {"pt": "pt", "mcmc": "mcmc", "rejection": "rejection"}[algorithm]
    if args.iterations is not None and algorithm != "rejection":
        _apply_flag(spec, (section, "iterations"), args.iterations)
    if args.burn_in is not None and algorithm != "rejection":
        _apply_flag(spec, (section, "burn_in"), args.burn_in)
    if args.thin is not None and algorithm != "rejection":
        _apply_flag(spec, (section, "thinning"), args.thin)
    if args.epsilon is not None and algorithm != "pt":
        _apply_flag(spec, (section, "epsilon"), args.epsilon)
    if "model" not in spec:
        raise ConfigError("model: missing section (use --preset or a config file)")
    spec.setdefault("seed", 0)
    spec.setdefault("workers", 1)
    return spec


def _semantic_spec(spec: dict) -> dict:
    """The fields that define results (drops output/worker plumbing)."""
    semantic = {k: v for k, v in spec.items()
                if k in ("model", "algorithm", "seed")}
    section = spec["algorithm"]
    semantic[section] = copy.deepcopy(spec.get(section, {}))
    return semantic


def _make_progress(iterations: int, quiet: bool):
    if quiet or iterations < 100000:
        return None
    step = max(1, iterations // 10)

    def progress(t):
        if (t + 1) % step == 0:
            print(f"  ... iteration {t + 1}/{iterations}", file=sys.stderr)

    return progress


def cmd_run(args) -> int:
    spec = build_run_spec(args)
    model, model_name, labels, transform = _build_model(spec["model"])
    algorithm = spec["algorithm"]
    seed = int(spec["seed"])
    semantic = _semantic_spec(spec)
    digest = config_hash(semantic)

    out_base = spec.get("out") or os.environ.get(ENV_OUTPUT_DIR) or "runs"
    out_dir = Path(out_base)
    if spec.get("out") is None and args.out is None:
        out_dir = out_dir / f"{model_name}-{algorithm}-{digest}"
    out_dir.mkdir(parents=True, exist_ok=True)

    print(f"seed: {seed}")
    print(f"config hash: {digest}")

    started = time.perf_counter()
    report: dict = {
        "package": f"abcpt {__version__}",
        "algorithm": algorithm,
        "model": model_name,
        "seed": seed,
        "config": semantic,
        "config_hash": digest,
        "observed_summary": model.observed_summary,
        "artifacts": {},
        "results": {},
    }
    artifacts = report["artifacts"]
    trace = None

    if algorithm == "rejection":
        section = spec.get("rejection", {})
        sampler = RejectionSampler(
            model=model,
            epsilon=float(section.get("epsilon", 1.0)),
            n_samples=int(section.get("count", 1000)),
            max_attempts=section.get("max_attempts", 10**7),
            random_state=seed,
        ).fit()
        samples = sampler.samples_
        report["results"] = {
            "n_samples": int(sampler.n_samples),
            "proposals_used": int(sampler.n_proposals_),
            "acceptance_rate": float(sampler.acceptance_rate_),
        }
        np.savetxt(out_dir / "samples.csv", samples, delimiter=",",
                   header=",".join(labels), comments="")
        artifacts["samples"] = "samples.csv"
    elif algorithm == "mcmc":
        section = spec.get("mcmc", {})
        sampler = McmcSampler(
            model=model,
            epsilon=float(section.get("epsilon", 1.0)),
            n_iterations=int(section.get("iterations", 10000)),
            burn_in=int(section.get("burn_in", 0)),
            thin=int(section.get("thinning", 1)),
            random_state=seed,
        ).fit()
        trace = sampler.trace_
        samples = sampler.samples_
        report["results"] = {
            "local_acceptance_rate": float(sampler.acceptance_rate_),
            "n_samples_kept": int(samples.shape[0]),
        }
    else:
        section = spec.get("pt", {})
        tolerances = _resolve_schedule(section.get("tolerances"), "pt.tolerances")
        temperatures = section.get("temperatures")
        if temperatures is not None:
            temperatures = _resolve_schedule(temperatures, "pt.temperatures")
        try:
            sampler = PtSampler(
                model=model,
                tolerances=tolerances,
                temperatures=temperatures,
                n_iterations=int(section.get("iterations", 1000)),
                burn_in=int(section.get("burn_in", 0)),
                thin=int(section.get("thinning", 1)),
                n_exchanges=section.get("exchanges"),
                n_rings=section.get("rings"),
                random_state=seed,
                n_workers=int(spec.get("workers", 1)),
            ).fit(progress=_make_progress(int(section.get("iterations", 1000)),
                                          args.quiet))
        except ValueError as err:
            raise ConfigError(f"pt: {err}")
        trace = sampler.trace_
        samples = sampler.samples_
        table = acceptance_table(trace)
        report["results"] = {
            "local_acceptance_rates": sampler.local_acceptance_rates_,
            "accepted_exchanges": sampler.accepted_exchanges_,
            "mean_accepted_exchanges_per_iteration":
                table.mean_accepted_exchanges_per_iteration,
            "independent_chains": trace.exchanges_per_iteration == 0,
            "ring_boundaries": sampler.ring_boundaries_,
            "n_samples_kept": int(samples.shape[0]),
        }
        write_acceptance_csv(out_dir / "acceptance.csv", table,
                             tolerances=trace.meta["tolerances"],
                             temperatures=trace.meta["temperatures"])
        artifacts["acceptance"] = "acceptance.csv"
        write_exchange_matrix_csv(out_dir / "exchange_matrix.csv",
                                  exchange_matrix(trace, "per-iteration"))
        artifacts["exchange_matrix"] = "exchange_matrix.csv"

    if samples.shape[0] >= 2:
        summary = posterior_summary(samples, transform=transform)
        summary_labels = TB_DERIVED_LABELS if transform is not None else labels
        write_summary_csv(out_dir / "summary.csv", summary, summary_labels)
        artifacts["summary"] = "summary.csv"
        report["results"]["posterior_summary"] = {
            label: {"mean": summary.mean[k], "median": summary.median[k],
                    "ci_low": summary.ci_low[k], "ci_high": summary.ci_high[k]}
            for k, label in enumerate(summary_labels)
        }

    trace_format = spec.get("export", {}).get("trace_format", "npz")
    if trace is not None and trace_format != "none":
        if trace_format == "npz":
            trace.meta.setdefault("model", model_name)
            trace.save(out_dir / "trace.npz")
            artifacts["trace"] = "trace.npz"
        elif trace_format == "csv":
            write_trace_csv(out_dir / "trace_samples.csv",
                            out_dir / "trace_exchanges.csv", trace)
            artifacts["trace"] = "trace_samples.csv"
        else:
            raise ConfigError(f"export.trace_format: unknown format {trace_format!r}")

    report["timing"] = {
        "created_at": datetime.now(timezone.utc).isoformat(),
        "runtime_seconds": time.perf_counter() - started,
    }
    write_report_json(out_dir / "report.json", report)
    print(f"artifacts written to {out_dir}")
    return 0


def _parse_int_list(text: str, where: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"{where}: expected comma-separated integers, got {text!r}")


def cmd_diagnose(args) -> int:
    trace = Trace.load(args.trace)
    out_dir = Path(args.out) if args.out else Path(args.trace).parent
    out_dir.mkdir(parents=True, exist_ok=True)
    burn_in = args.burn_in if args.burn_in is not None else None
    chain = args.chain - 1
    if not 0 <= chain < trace.n_chains:
        raise ConfigError(f"--chain: trace has chains 1..{trace.n_chains}")
    wrote = []

    if args.acceptance:
        table = acceptance_table(trace)
        tolerances = trace.meta.get("tolerances")
        temperatures = trace.meta.get("temperatures")
        write_acceptance_csv(out_dir / "acceptance.csv", table, tolerances,
                             temperatures)
        wrote.append("acceptance.csv")
    for mode in args.exchange_matrix or []:
        name = f"exchange_matrix_{mode.replace('-', '_')}.csv"
        write_exchange_matrix_csv(out_dir / name, exchange_matrix(trace, mode))
        wrote.append(name)
    if args.acf_lags:
        lags = _parse_int_list(args.acf_lags, "--acf-lags")
        thins = _parse_int_list(args.acf_thins or "1", "--acf-thins")
        series = trace.samples(chain, burn_in=burn_in, thin=1)[:, 0]
        rows = []
        for k in thins:
            thinned = thin(series, k)
            try:
                acfs = {lag: autocorrelation(thinned, lag) for lag in lags}
            except ValueError as err:
                raise ConfigError(f"--acf-lags: thinning {k}: {err}")
            rows.append((k, thinned.size, acfs))
        write_acf_csv(out_dir / "acf.csv", rows)
        wrote.append("acf.csv")
    if args.summary:
        samples = trace.samples(chain, burn_in=burn_in)
        transform = tb_derived_samples if args.transform == "tb" else None
        if transform is not None:
            labels = list(TB_DERIVED_LABELS)
        elif trace.meta.get("model") == "tb":
            labels = list(TB_PARAM_LABELS)
        else:
            labels = [f"theta_{k}" for k in range(trace.dim)]
        write_summary_csv(out_dir / "summary.csv",
                          posterior_summary(samples, transform=transform), labels)
        wrote.append("summary.csv")
    if args.density:
        samples = trace.samples(chain, burn_in=burn_in)[:, args.dim]
        if args.density_grid:
            try:
                lo, hi, n = args.density_grid.split(":")
                grid = (float(lo), float(hi), int(n))
            except ValueError:
                raise ConfigError("--density-grid: expected lo:hi:points")
        else:
            pad = 0.05 * (samples.max() - samples.min() or 1.0)
            grid = (samples.min() - pad, samples.max() + pad, 512)
        export = density_export(samples, grid, bandwidth=args.bandwidth,
                                n_bins=args.bins)
        write_density_csv(out_dir / "density.csv", export)
        wrote.append("density.csv")
    if args.trace_csv:
        write_trace_csv(out_dir / "trace_samples.csv",
                        out_dir / "trace_exchanges.csv", trace)
        wrote.append("trace_samples.csv")
    if not wrote:
        raise ConfigError("diagnose: no outputs requested")
    print(f"wrote {', '.join(wrote)} to {out_dir}")
    return 0


def cmd_validate(args) -> int:
    results = run_all_checks()
    failed = 0
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        failed += not res.passed
        print(f"{status}  {res.name}: {res.detail}")
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 1 if failed else 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="abcpt",
        description="Likelihood-free samplers with tempered chain populations",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a configured experiment")
    run.add_argument("--config", help="YAML run specification")
    run.add_argument("--preset", help="named preset (toy, toy-quick, tb, tb-smoke)")
    run.add_argument("--algorithm", choices=("pt", "mcmc", "rejection"))
    run.add_argument("--seed", type=int, help="master seed")
    run.add_argument("--workers", type=int, help="local-move worker threads")
    run.add_argument("--rings", type=int, help="ring count for exchange selection")
    run.add_argument("--exchanges", type=int,
                     help="exchange proposals per iteration (0 = independent chains)")
    run.add_argument("--iterations", type=int)
    run.add_argument("--burn-in", dest="burn_in", type=int)
    run.add_argument("--thin", type=int)
    run.add_argument("--epsilon", type=float, help="tolerance (mcmc/rejection)")
    run.add_argument("--count", type=int, help="accepted samples (rejection)")
    run.add_argument("--trace-format", dest="trace_format",
                     choices=("npz", "csv", "none"))
    run.add_argument("--out", help="output directory")
    run.add_argument("--quiet", action="store_true")
    run.set_defaults(func=cmd_run)

    diag = sub.add_parser("diagnose", help="tables and densities from a trace")
    diag.add_argument("trace", help="path to a trace.npz")
    diag.add_argument("--out", help="output directory (default: trace directory)")
    diag.add_argument("--chain", type=int, default=1, help="1-based chain")
    diag.add_argument("--dim", type=int, default=0, help="parameter coordinate")
    diag.add_argument("--burn-in", dest="burn_in", type=int)
    diag.add_argument("--acceptance", action="store_true")
    diag.add_argument("--exchange-matrix", dest="exchange_matrix",
                      action="append", choices=("per-iteration", "per-proposal"))
    diag.add_argument("--acf-lags", dest="acf_lags", help="e.g. 1,10,20")
    diag.add_argument("--acf-thins", dest="acf_thins", help="e.g. 1,10,50")
    diag.add_argument("--summary", action="store_true")
    diag.add_argument("--transform", choices=("none", "tb"), default="none")
    diag.add_argument("--density", action="store_true")
    diag.add_argument("--density-grid", dest="density_grid", help="lo:hi:points")
    diag.add_argument("--bandwidth", type=float)
    diag.add_argument("--bins", type=int, default=100)
    diag.add_argument("--trace-csv", dest="trace_csv", action="store_true")
    diag.set_defaults(func=cmd_diagnose)

    val = sub.add_parser("validate", help="fast analytic-oracle self-checks")
    val.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return 2
    except KeyError as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return 2
    except RejectionCapError as err:
        print(f"runtime failure in rejection sampler: {err}", file=sys.stderr)
        return 1
    except SimulationBudgetError as err:
        print(f"runtime failure in epidemic simulator: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
