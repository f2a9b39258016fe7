import json

import pytest

from abcpt.cli import main
from abcpt.trace import Trace


def _run(*argv):
    return main(list(argv))


def _report(path):
    with open(path / "report.json") as fh:
        return json.load(fh)


def test_run_is_deterministic_modulo_timing(tmp_path):
    for name in ("a", "b"):
        code = _run("run", "--preset", "toy-quick", "--seed", "42",
                    "--iterations", "800", "--burn-in", "100",
                    "--out", str(tmp_path / name), "--quiet")
        assert code == 0
    rep_a, rep_b = _report(tmp_path / "a"), _report(tmp_path / "b")
    rep_a.pop("timing")
    rep_b.pop("timing")
    assert rep_a == rep_b
    t_a = Trace.load(tmp_path / "a" / "trace.npz")
    t_b = Trace.load(tmp_path / "b" / "trace.npz")
    assert t_a.equals(t_b)


def test_hash_ignores_plumbing_fields(tmp_path):
    _run("run", "--preset", "toy-quick", "--seed", "5", "--iterations", "200",
         "--burn-in", "50", "--out", str(tmp_path / "w1"), "--quiet")
    _run("run", "--preset", "toy-quick", "--seed", "5", "--iterations", "200",
         "--burn-in", "50", "--workers", "4", "--out", str(tmp_path / "w4"),
         "--quiet")
    assert (_report(tmp_path / "w1")["config_hash"]
            == _report(tmp_path / "w4")["config_hash"])


def test_tb_run_and_derived_summary(tmp_path):
    config = tmp_path / "tb.yaml"
    config.write_text(
        "model: {preset: tb, stop_size: 600, max_events: 1000000}\n"
        "algorithm: pt\n"
        "seed: 4\n"
        "pt:\n"
        "  tolerances: [0.3, 0.6, 1.2]\n"
        "  temperatures: {lo: 1.0, hi: 2.0, n: 3, spacing: log}\n"
        "  iterations: 40\n"
        "  burn_in: 10\n"
    )
    assert _run("run", "--config", str(config), "--out", str(tmp_path / "tb"),
                "--quiet") == 0
    summary = (tmp_path / "tb" / "summary.csv").read_text().splitlines()
    assert summary[0] == "parameter,mean,median,ci_2.5%,ci_97.5%"
    assert [row.split(",")[0] for row in summary[1:]] == [
        "transmission_rate", "doubling_time", "reproductive_value",
        "mutation_rate"]
    out = tmp_path / "tbdiag"
    assert _run("diagnose", str(tmp_path / "tb" / "trace.npz"), "--summary",
                "--transform", "tb", "--out", str(out)) == 0
    assert (out / "summary.csv").read_text().splitlines()[1].startswith(
        "transmission_rate,")


def test_seed_changes_the_hash_and_results(tmp_path):
    _run("run", "--preset", "toy-quick", "--seed", "1", "--iterations", "300",
         "--burn-in", "50", "--out", str(tmp_path / "s1"), "--quiet")
    _run("run", "--preset", "toy-quick", "--seed", "2", "--iterations", "300",
         "--burn-in", "50", "--out", str(tmp_path / "s2"), "--quiet")
    rep1, rep2 = _report(tmp_path / "s1"), _report(tmp_path / "s2")
    assert rep1["config_hash"] != rep2["config_hash"]
    assert rep1["seed"] == 1 and rep2["seed"] == 2


def test_ring_run_reports_boundaries(tmp_path):
    code = _run("run", "--preset", "toy", "--rings", "3", "--iterations", "500",
                "--burn-in", "100", "--seed", "0",
                "--out", str(tmp_path / "rings"), "--quiet")
    assert code == 0
    report = _report(tmp_path / "rings")
    bounds = report["results"]["ring_boundaries"]
    assert bounds[0] == 0.0 and bounds[-1] == 2.0
    assert abs(bounds[1] - 0.103) < 1e-3
    assert abs(bounds[2] - 0.495) < 1e-3


def test_disabled_exchanges_marked_as_independent(tmp_path):
    _run("run", "--preset", "toy-quick", "--exchanges", "0", "--iterations",
         "300", "--burn-in", "50", "--out", str(tmp_path / "ind"), "--quiet")
    report = _report(tmp_path / "ind")
    assert report["results"]["independent_chains"] is True
    assert report["results"]["accepted_exchanges"] == 0


def test_mcmc_and_rejection_algorithms(tmp_path):
    code = _run("run", "--preset", "toy-quick", "--algorithm", "mcmc",
                "--epsilon", "0.5", "--iterations", "2000", "--burn-in", "200",
                "--out", str(tmp_path / "mcmc"), "--quiet")
    assert code == 0
    report = _report(tmp_path / "mcmc")
    assert 0 < report["results"]["local_acceptance_rate"] < 1
    assert (tmp_path / "mcmc" / "trace.npz").exists()

    code = _run("run", "--preset", "toy-quick", "--algorithm", "rejection",
                "--epsilon", "0.5", "--count", "200",
                "--out", str(tmp_path / "rej"), "--quiet")
    assert code == 0
    report = _report(tmp_path / "rej")
    assert report["results"]["n_samples"] == 200
    assert (tmp_path / "rej" / "samples.csv").exists()


def test_config_file_with_flag_overrides(tmp_path):
    config = tmp_path / "run.yaml"
    config.write_text(
        "model:\n  preset: toy\n"
        "algorithm: pt\n"
        "seed: 7\n"
        "pt:\n"
        "  tolerances: {lo: 0.1, hi: 2.0, n: 4, spacing: log}\n"
        "  temperatures: [1.0, 1.5, 2.0, 4.0]\n"
        "  iterations: 400\n"
        "  burn_in: 100\n"
    )
    code = _run("run", "--config", str(config), "--iterations", "300",
                "--out", str(tmp_path / "cfg"), "--quiet")
    assert code == 0
    report = _report(tmp_path / "cfg")
    assert report["config"]["pt"]["iterations"] == 300  # flag wins
    assert report["seed"] == 7
    trace = Trace.load(tmp_path / "cfg" / "trace.npz")
    assert trace.n_chains == 4 and trace.iterations == 300


def test_invalid_configs_exit_2(tmp_path):
    bad_yaml = tmp_path / "broken.yaml"
    bad_yaml.write_text("model: [unclosed\n")
    assert _run("run", "--config", str(bad_yaml), "--quiet") == 2
    assert _run("run", "--preset", "toy-quick", "--algorithm", "pt",
                "--rings", "99", "--iterations", "100", "--quiet",
                "--out", str(tmp_path / "x")) == 2
    assert _run("run", "--preset", "nope", "--quiet") == 2
    assert _run("run", "--quiet") == 2  # no model at all


def test_runtime_failure_exits_1(tmp_path, capsys):
    config = tmp_path / "rej.yaml"
    config.write_text(
        "model: {preset: toy}\n"
        "algorithm: rejection\n"
        "rejection: {epsilon: 1.0e-9, count: 5, max_attempts: 100}\n"
    )
    code = _run("run", "--config", str(config), "--out", str(tmp_path / "o"),
                "--quiet")
    assert code == 1
    assert "rejection" in capsys.readouterr().err


def test_diagnose_outputs(tmp_path):
    _run("run", "--preset", "toy-quick", "--iterations", "3000", "--burn-in",
         "500", "--seed", "3", "--out", str(tmp_path / "base"), "--quiet")
    out = tmp_path / "diag"
    code = _run("diagnose", str(tmp_path / "base" / "trace.npz"),
                "--out", str(out), "--acceptance",
                "--exchange-matrix", "per-iteration",
                "--exchange-matrix", "per-proposal",
                "--acf-lags", "1,10,20", "--acf-thins", "1,10,50",
                "--summary", "--density", "--density-grid=-10:10:101")
    assert code == 0
    for name in ("acceptance.csv", "exchange_matrix_per_iteration.csv",
                 "exchange_matrix_per_proposal.csv", "acf.csv", "summary.csv",
                 "density.csv", "density_histogram.csv"):
        assert (out / name).exists(), name
    header = (out / "acf.csv").read_text().splitlines()[0]
    assert header == "thinning,n_samples,lag_1,lag_10,lag_20"


def test_diagnose_rejects_unknown_requests(tmp_path, capsys):
    _run("run", "--preset", "toy-quick", "--iterations", "200", "--burn-in",
         "50", "--out", str(tmp_path / "base"), "--quiet")
    trace = str(tmp_path / "base" / "trace.npz")
    with pytest.raises(SystemExit) as err:
        _run("diagnose", trace, "--exchange-matrix", "per-banana")
    assert err.value.code == 2
    assert _run("diagnose", trace) == 2  # nothing requested


def test_trace_csv_export(tmp_path):
    _run("run", "--preset", "toy-quick", "--iterations", "100", "--burn-in",
         "10", "--trace-format", "csv", "--out", str(tmp_path / "csv"),
         "--quiet")
    samples = (tmp_path / "csv" / "trace_samples.csv").read_text().splitlines()
    assert samples[0] == "iteration,chain,theta_0,local_accepted"
    assert len(samples) == 1 + 100 * 15
    exchanges = (tmp_path / "csv" / "trace_exchanges.csv").read_text().splitlines()
    assert len(exchanges) == 1 + 100 * 15


def test_output_dir_env_var(tmp_path, monkeypatch):
    monkeypatch.setenv("ABCPT_OUTPUT_DIR", str(tmp_path / "envbase"))
    code = _run("run", "--preset", "toy-quick", "--iterations", "100",
                "--burn-in", "10", "--quiet")
    assert code == 0
    children = list((tmp_path / "envbase").iterdir())
    assert len(children) == 1 and (children[0] / "report.json").exists()


def test_validate_command():
    assert _run("validate") == 0
