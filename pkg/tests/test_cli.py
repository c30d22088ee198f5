"""Command-line workflows driven through click's test runner."""
import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from riskbandit.cli import main


def invoke(*args):
    return CliRunner().invoke(main, list(args))


def all_text(result):
    text = result.output
    try:
        text += result.stderr
    except (ValueError, AttributeError):
        pass
    return text


def write_json(path: Path, payload) -> Path:
    path.write_text(json.dumps(payload))
    return path


def csv_body(path: Path) -> list[str]:
    """File content minus the volatile timestamp comment."""
    return [line for line in path.read_text().splitlines()
            if not line.startswith("# generated=")]


@pytest.fixture(scope="module")
def corpus_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli-corpus")
    spec = write_json(root / "spec.json", {"version": 1, "corpus": {"situations": 60}})
    out = root / "corpus"
    result = invoke("gen-corpus", "--spec", str(spec), "--out", str(out),
                    "--seed", "3")
    assert result.exit_code == 0, all_text(result)
    return out


# -- plumbing ---------------------------------------------------------------

def test_version_flag():
    result = invoke("--version")
    assert result.exit_code == 0
    assert "riskbandit" in result.output


def test_unknown_flag_exits_2():
    assert invoke("run", "--nope").exit_code == 2


def test_unknown_command_exits_2():
    assert invoke("transmogrify").exit_code == 2


def test_missing_config_exits_1(tmp_path):
    result = invoke("run", "--config", str(tmp_path / "none.json"),
                    "--out", str(tmp_path / "out.csv"))
    assert result.exit_code == 1
    assert "error:" in all_text(result)


def test_config_error_names_the_field(tmp_path, corpus_dir):
    cfg = write_json(tmp_path / "run.json", {
        "version": 1, "corpus": str(corpus_dir),
        "policy": {"id": "exploit"}, "iteratons": 100,
    })
    result = invoke("run", "--config", str(cfg), "--out", str(tmp_path / "o.csv"))
    assert result.exit_code == 1
    assert "iteratons" in all_text(result)


# -- corpus generation ------------------------------------------------------

def test_gen_corpus_writes_expected_files(corpus_dir):
    names = {p.name for p in corpus_dir.iterdir()}
    assert {"case_base.json", "ground_truth.json", "risk_seed.json",
            "corpus_meta.json"} <= names
    assert {f"taxonomy_{d}.json" for d in ("location", "time", "social")} <= names


def test_gen_corpus_is_deterministic(tmp_path, corpus_dir):
    spec = write_json(tmp_path / "spec.json",
                      {"version": 1, "corpus": {"situations": 60}})
    again = tmp_path / "corpus2"
    result = invoke("gen-corpus", "--spec", str(spec), "--out", str(again),
                    "--seed", "3")
    assert result.exit_code == 0, all_text(result)
    for name in ("case_base.json", "ground_truth.json", "risk_seed.json",
                 "corpus_meta.json"):
        assert (again / name).read_bytes() == (corpus_dir / name).read_bytes()


# -- runs -------------------------------------------------------------------

def run_config(tmp_path, corpus_dir, **overrides):
    payload = {
        "version": 1, "corpus": str(corpus_dir),
        "policy": {"id": "eps-ucb", "eps": 0.1},
        "iterations": 300, "sample_period": 100,
    }
    payload.update(overrides)
    return write_json(tmp_path / "run.json", payload)


def test_run_writes_provenance_and_rows(tmp_path, corpus_dir):
    cfg = run_config(tmp_path, corpus_dir)
    out = tmp_path / "run.csv"
    result = invoke("run", "--config", str(cfg), "--out", str(out), "--seed", "7")
    assert result.exit_code == 0, all_text(result)
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# config_hash=")
    assert "# seed=7" in lines
    assert any(line.startswith("# generated=") for line in lines)
    header_at = next(i for i, line in enumerate(lines)
                     if not line.startswith("#"))
    assert lines[header_at] == "iteration,avg_ctr,mean_eps"
    assert len(lines) - header_at - 1 == 3


def test_run_repeats_byte_identically(tmp_path, corpus_dir):
    cfg = run_config(tmp_path, corpus_dir)
    first = tmp_path / "a.csv"
    second = tmp_path / "b.csv"
    assert invoke("run", "--config", str(cfg), "--out", str(first),
                  "--seed", "7").exit_code == 0
    assert invoke("run", "--config", str(cfg), "--out", str(second),
                  "--seed", "7").exit_code == 0
    assert csv_body(first) == csv_body(second)


def test_run_seed_changes_the_body(tmp_path, corpus_dir):
    cfg = run_config(tmp_path, corpus_dir)
    first = tmp_path / "a.csv"
    second = tmp_path / "b.csv"
    invoke("run", "--config", str(cfg), "--out", str(first), "--seed", "7")
    invoke("run", "--config", str(cfg), "--out", str(second), "--seed", "8")
    assert csv_body(first) != csv_body(second)


# -- comparisons and risk reports -------------------------------------------

def compare_config(tmp_path, corpus_dir, policies):
    return write_json(tmp_path / "compare.json", {
        "version": 1, "corpus": str(corpus_dir), "policies": policies,
        "iterations": 200, "sample_period": 100, "replications": 2,
    })


def test_compare_writes_both_tables(tmp_path, corpus_dir):
    cfg = compare_config(tmp_path, corpus_dir,
                         [{"id": "exploit"}, {"id": "eps-ucb", "eps": 0.2}])
    out = tmp_path / "cmp"
    result = invoke("compare", "--config", str(cfg), "--out", str(out),
                    "--seed", "5")
    assert result.exit_code == 0, all_text(result)
    assert (out / "compare_curves.csv").exists()
    assert (out / "compare_summary.csv").exists()
    summary = (out / "compare_summary.csv").read_text().splitlines()
    assert sum(1 for line in summary if not line.startswith("#")) == 1 + 2


def test_risk_report_with_adaptive_policy(tmp_path, corpus_dir):
    cfg = compare_config(tmp_path, corpus_dir,
                         [{"id": "exploit"}, {"id": "risk-ucb"}])
    out = tmp_path / "report"
    result = invoke("risk-report", "--config", str(cfg), "--out", str(out),
                    "--seed", "5")
    assert result.exit_code == 0, all_text(result)
    assert (out / "risk_buckets.csv").exists()
    assert (out / "risk_gaps.csv").exists()


def test_risk_report_skips_gaps_without_adaptive_policy(tmp_path, corpus_dir):
    cfg = compare_config(tmp_path, corpus_dir,
                         [{"id": "exploit"}, {"id": "eps-ucb", "eps": 0.2}])
    out = tmp_path / "report"
    result = invoke("risk-report", "--config", str(cfg), "--out", str(out),
                    "--seed", "5")
    assert result.exit_code == 0, all_text(result)
    assert (out / "risk_buckets.csv").exists()
    assert not (out / "risk_gaps.csv").exists()
    assert "gaps skipped" in result.output


# -- sweeps -----------------------------------------------------------------

def test_sweep_b_cli(tmp_path):
    cfg = write_json(tmp_path / "b.json",
                     {"version": 1, "clusters": 4, "members": 6})
    out = tmp_path / "b.csv"
    result = invoke("sweep-b", "--config", str(cfg), "--out", str(out),
                    "--seed", "2")
    assert result.exit_code == 0, all_text(result)
    assert "# best_b=" in out.read_text()


def test_sweep_b_cli_deterministic(tmp_path):
    cfg = write_json(tmp_path / "b.json", {"version": 1, "clusters": 3, "members": 5})
    first = tmp_path / "a.csv"
    second = tmp_path / "b.csv"
    invoke("sweep-b", "--config", str(cfg), "--out", str(first), "--seed", "2")
    invoke("sweep-b", "--config", str(cfg), "--out", str(second), "--seed", "2")
    assert csv_body(first) == csv_body(second)


def test_sweep_eps_cli(tmp_path, corpus_dir):
    cfg = write_json(tmp_path / "eps.json", {
        "version": 1, "corpus": str(corpus_dir), "grid": [0.0, 0.5],
        "iterations": 200, "sample_period": 100, "replications": 1,
        "entry_fraction": 1.0,
    })
    out = tmp_path / "eps.csv"
    result = invoke("sweep-eps", "--config", str(cfg), "--out", str(out),
                    "--seed", "2")
    assert result.exit_code == 0, all_text(result)
    assert "recommended" in result.output
    assert out.exists()


def test_sparsity_cli(tmp_path, corpus_dir):
    cfg = write_json(tmp_path / "sparse.json", {
        "version": 1, "corpus": str(corpus_dir), "fractions": [1.0, 0.5],
        "policies": [{"id": "exploit"}],
        "iterations": 200, "sample_period": 100, "replications": 1,
    })
    out = tmp_path / "sparse.csv"
    result = invoke("sparsity", "--config", str(cfg), "--out", str(out),
                    "--seed", "2")
    assert result.exit_code == 0, all_text(result)
    body = [line for line in out.read_text().splitlines()
            if not line.startswith("#")]
    assert len(body) == 1 + 2
