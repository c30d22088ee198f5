"""Command-line front end.

Subcommands cover corpus generation, single-policy runs, multi-policy
comparisons, the similarity-threshold and exploration-rate sweeps, the
per-bucket risk report, and the history-sparsity study. Every analysis
writes CSV output with ``# key=value`` provenance comments (config hash,
seed, generation timestamp) above the header row.

Configuration problems exit with status 1 and a message naming the
offending field; bad command-line flags exit with status 2. Paths inside
config files are resolved relative to the working directory unless they
are absolute. Set ``RISKBANDIT_LOG`` (debug/info/warning/error) to control
log verbosity.
"""
from __future__ import annotations

import functools
import logging
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

import click
import numpy as np

from . import __version__
from .configs import (
    config_hash,
    load_compare_config,
    load_gen_corpus_config,
    load_run_config,
    load_sparsity_config,
    load_sweep_b_config,
    load_sweep_eps_config,
    resolve_risk_config,
)
from .errors import ConfigError
from .harness import (
    RunSettings,
    UnusableCorpusError,
    compare_policies,
    make_cluster_sample,
    risk_bucket_report,
    run_experiment,
    sparsity_sweep,
    sweep_b,
    sweep_epsilon,
    write_bucket_csv,
    write_compare_curves_csv,
    write_compare_summary_csv,
    write_gaps_csv,
    write_run_csv,
    write_sparsity_csv,
    write_sweep_b_csv,
    write_sweep_eps_csv,
)
from .ontology import TaxonomyError
from .policies import build_policy
from .simenv import Corpus, GenerationError, generate_corpus

log = logging.getLogger("riskbandit")


def _setup_logging() -> None:
    name = os.environ.get("RISKBANDIT_LOG", "warning").upper()
    level = getattr(logging, name, None)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def _handled(fn):
    """Turn domain errors into exit status 1 with a clean message."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (ConfigError, GenerationError, TaxonomyError,
                UnusableCorpusError, FileNotFoundError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)

    return wrapper


def _comments(raw_config: dict, seed: int) -> list[tuple[str, str]]:
    return [
        ("config_hash", config_hash(raw_config)),
        ("seed", str(seed)),
        ("generated", datetime.now(timezone.utc).isoformat(timespec="seconds")),
    ]


def _check_jobs(jobs: int) -> None:
    if jobs < 1:
        raise ConfigError(f"jobs must be >= 1, got {jobs}")


@click.group()
@click.version_option(__version__, prog_name="riskbandit")
def main():
    """Risk-aware bandit simulator for context-aware recommendation."""
    _setup_logging()


@main.command("gen-corpus")
@click.option("--spec", "spec_path", required=True,
              help="Corpus settings JSON.")
@click.option("--out", "out_dir", required=True,
              help="Directory to write the corpus into.")
@click.option("--seed", type=int, default=0, show_default=True)
@_handled
def gen_corpus_cmd(spec_path: str, out_dir: str, seed: int):
    """Generate a synthetic corpus with known click probabilities."""
    cfg = load_gen_corpus_config(spec_path)
    corpus = generate_corpus(cfg.spec, seed)
    corpus.save(out_dir)
    meta = corpus.meta
    click.echo(f"corpus: {len(corpus.case_base)} cases -> {out_dir}")
    click.echo(f"stratum counts: {meta['stratum_counts']}")
    click.echo(f"risky share: {meta['risky_share']:.3f}")


@main.command("run")
@click.option("--config", "config_path", required=True, help="Run config JSON.")
@click.option("--out", "out_path", required=True, help="Output CSV file.")
@click.option("--seed", type=int, default=0, show_default=True)
@_handled
def run_cmd(config_path: str, out_path: str, seed: int):
    """Run one policy and emit its cumulative CTR time series."""
    cfg = load_run_config(config_path)
    corpus = Corpus.load(cfg.corpus_dir)
    log.info("loaded corpus with %d cases from %s", len(corpus.case_base),
             cfg.corpus_dir)
    risk = resolve_risk_config(cfg.risk, corpus.risk_config)
    settings = RunSettings(cfg.iterations, cfg.slate_size, cfg.sample_period,
                           cfg.log_events)
    policy = build_policy(cfg.policy)
    result = run_experiment(corpus, policy, settings,
                            np.random.default_rng(seed), risk_config=risk)
    write_run_csv(result, out_path, _comments(cfg.raw, seed))
    click.echo(
        f"{result.label}: final avg CTR {result.final_ctr:.4f} "
        f"({result.total_clicks}/{result.total_slots} clicks)"
    )


@main.command("compare")
@click.option("--config", "config_path", required=True, help="Comparison config JSON.")
@click.option("--out", "out_dir", required=True,
              help="Directory for compare_curves.csv and compare_summary.csv.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--jobs", type=int, default=1, show_default=True,
              help="Worker processes for replications.")
@_handled
def compare_cmd(config_path: str, out_dir: str, seed: int, jobs: int):
    """Compare policies over replications with a shared seed schedule."""
    _check_jobs(jobs)
    cfg = load_compare_config(config_path)
    corpus = Corpus.load(cfg.corpus_dir)
    risk = resolve_risk_config(cfg.risk, corpus.risk_config)
    settings = RunSettings(cfg.iterations, cfg.slate_size, cfg.sample_period)
    comparison = compare_policies(corpus, cfg.policies, settings, seed,
                                  replications=cfg.replications, jobs=jobs,
                                  risk_config=risk)
    comments = _comments(cfg.raw, seed)
    out = Path(out_dir)
    write_compare_curves_csv(comparison, out / "compare_curves.csv", comments)
    write_compare_summary_csv(comparison, out / "compare_summary.csv", comments)
    for s in comparison.summaries:
        click.echo(f"{s.label}: {s.final_mean:.4f} +/- {s.final_std:.4f}")
    click.echo(f"wrote {out / 'compare_curves.csv'} and {out / 'compare_summary.csv'}")


@main.command("risk-report")
@click.option("--config", "config_path", required=True, help="Comparison config JSON.")
@click.option("--out", "out_dir", required=True,
              help="Directory for risk_buckets.csv and risk_gaps.csv.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--jobs", type=int, default=1, show_default=True)
@_handled
def risk_report_cmd(config_path: str, out_dir: str, seed: int, jobs: int):
    """Per-bucket CTR for every policy, with risk-adaptive gaps."""
    _check_jobs(jobs)
    cfg = load_compare_config(config_path)
    corpus = Corpus.load(cfg.corpus_dir)
    risk = resolve_risk_config(cfg.risk, corpus.risk_config)
    settings = RunSettings(cfg.iterations, cfg.slate_size, cfg.sample_period)
    comparison = compare_policies(corpus, cfg.policies, settings, seed,
                                  replications=cfg.replications, jobs=jobs,
                                  risk_config=risk)
    risk_label = None
    for spec in cfg.policies:
        if spec.get("id") == "risk-ucb":
            risk_label = build_policy(spec).label
            break
    report = risk_bucket_report(comparison, risk_label)
    comments = _comments(cfg.raw, seed)
    out = Path(out_dir)
    write_bucket_csv(report, out / "risk_buckets.csv", comments)
    click.echo("bucket avg CTR (" + ", ".join(report.buckets) + "):")
    for label in report.labels:
        cells = ["-" if v is None else f"{v:.4f}" for v in report.table[label]]
        click.echo(f"  {label}: " + "  ".join(cells))
    if report.gaps is not None:
        write_gaps_csv(report, out / "risk_gaps.csv", comments)
        cells = ["-" if g is None else f"{g:+.4f}" for g in report.gaps]
        click.echo(f"gap of {report.risk_label} over {report.best_other}: "
                   + "  ".join(cells))
    else:
        click.echo("no risk-adaptive policy in the comparison; gaps skipped")


@main.command("sweep-b")
@click.option("--config", "config_path", required=True, help="Sweep config JSON.")
@click.option("--out", "out_path", required=True, help="Output CSV file.")
@click.option("--seed", type=int, default=0, show_default=True)
@_handled
def sweep_b_cmd(config_path: str, out_path: str, seed: int):
    """Sweep the similarity threshold on a labeled cluster sample."""
    cfg = load_sweep_b_config(config_path)
    sample = make_cluster_sample(cfg.clusters, cfg.members,
                                 np.random.default_rng(seed))
    result = sweep_b(sample, cfg.grid_step)
    write_sweep_b_csv(result, out_path, _comments(cfg.raw, seed))
    click.echo(
        f"best threshold {result.best_b:g} "
        f"(constructed separation at {result.constructed_threshold:g})"
    )


@main.command("sweep-eps")
@click.option("--config", "config_path", required=True, help="Sweep config JSON.")
@click.option("--out", "out_path", required=True, help="Output CSV file.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--jobs", type=int, default=1, show_default=True)
@_handled
def sweep_eps_cmd(config_path: str, out_path: str, seed: int, jobs: int):
    """Sweep constant exploration rates on the critical-situation subsample."""
    _check_jobs(jobs)
    cfg = load_sweep_eps_config(config_path)
    corpus = Corpus.load(cfg.corpus_dir)
    settings = RunSettings(cfg.iterations, cfg.slate_size, cfg.sample_period)
    result = sweep_epsilon(corpus, cfg.grid, settings, seed,
                           replications=cfg.replications, jobs=jobs,
                           entry_fraction=cfg.entry_fraction)
    write_sweep_eps_csv(result, out_path, _comments(cfg.raw, seed))
    lo, hi = result.recommended
    click.echo(f"recommended exploration range [{lo:g}, {hi:g}]")


@main.command("sparsity")
@click.option("--config", "config_path", required=True, help="Sparsity config JSON.")
@click.option("--out", "out_path", required=True, help="Output CSV file.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--jobs", type=int, default=1, show_default=True)
@_handled
def sparsity_cmd(config_path: str, out_path: str, seed: int, jobs: int):
    """Re-run the policy comparison on progressively sparser corpora."""
    _check_jobs(jobs)
    cfg = load_sparsity_config(config_path)
    corpus = Corpus.load(cfg.corpus_dir)
    settings = RunSettings(cfg.iterations, cfg.slate_size, cfg.sample_period)
    result = sparsity_sweep(corpus, cfg.fractions, cfg.policies, settings, seed,
                            replications=cfg.replications, jobs=jobs)
    write_sparsity_csv(result, out_path, _comments(cfg.raw, seed))
    for i, fraction in enumerate(result.fractions):
        best = max(result.labels, key=lambda lb: result.final_mean[lb][i])
        click.echo(
            f"fraction {fraction:g} ({result.cases_kept[i]} cases): "
            f"best {best} at {result.final_mean[best][i]:.4f}"
        )


if __name__ == "__main__":
    main()
