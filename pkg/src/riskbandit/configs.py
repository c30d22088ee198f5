"""Strict JSON configuration schemas for the command-line tools.

Every config file carries a ``version`` field and is validated in strict
mode: unknown fields are rejected with a diagnostic naming the field, so a
typo in a sweep definition fails loudly instead of silently using defaults.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .risk import RiskConfig
from .simenv import CorpusSpec, spec_from_obj

SCHEMA_VERSION = 1

DEFAULT_ITERATIONS = 10000
DEFAULT_SLATE = 10
DEFAULT_SAMPLE_PERIOD = 1000
DEFAULT_REPLICATIONS = 10
DEFAULT_SWEEP_FRACTIONS = (0.5, 0.3, 0.2, 0.1, 0.05, 0.01)
DEFAULT_EPS_GRID = tuple(round(0.1 * i, 1) for i in range(11))


def config_hash(obj: dict) -> str:
    """Stable digest of a config mapping, for output provenance headers."""
    canon = json.dumps(obj, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()[:16]


def _load_json(path: str | Path) -> dict:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {p}")
    try:
        data = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {p} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"config file {p} must hold a JSON object")
    return data


def _check_version(data: dict, where: str) -> None:
    if "version" not in data:
        raise ConfigError(f"{where}: missing field 'version'")
    if data["version"] != SCHEMA_VERSION:
        raise ConfigError(
            f"{where}: unsupported version {data['version']!r}, expected {SCHEMA_VERSION}"
        )


def _reject_unknown(data: dict, known: set[str], where: str) -> None:
    unknown = sorted(set(data) - known - {"version"})
    if unknown:
        raise ConfigError(f"{where}: unknown field {unknown[0]!r}")


def _positive_int(data: dict, name: str, default: int, where: str) -> int:
    value = data.get(name, default)
    if not isinstance(value, int) or isinstance(value, bool) or value < 1:
        raise ConfigError(f"{where}: field {name!r} must be a positive integer")
    return value


def _policy_list(data: dict, name: str, where: str) -> list[dict]:
    from .policies import build_policy

    raw = data.get(name)
    if not isinstance(raw, list) or not raw:
        raise ConfigError(f"{where}: field {name!r} must be a non-empty list")
    labels = set()
    for entry in raw:
        if not isinstance(entry, dict):
            raise ConfigError(f"{where}: entries of {name!r} must be objects")
        policy = build_policy(entry)  # validates id and params
        if policy.label in labels:
            raise ConfigError(f"{where}: duplicate policy label {policy.label!r}")
        labels.add(policy.label)
    return [dict(entry) for entry in raw]


def _risk_overrides(data: dict, base: RiskConfig, where: str) -> RiskConfig:
    raw = data.get("risk")
    if raw is None:
        return base
    if not isinstance(raw, dict):
        raise ConfigError(f"{where}: field 'risk' must be an object")
    _reject_unknown(raw, {"B", "alpha", "lambda"}, f"{where}.risk")
    kwargs = {
        "sim_threshold": raw.get("B", base.sim_threshold),
        "alpha": raw.get("alpha", base.alpha),
    }
    weights = raw.get("lambda")
    if weights is not None:
        if not isinstance(weights, list) or len(weights) != 3:
            raise ConfigError(f"{where}: field 'risk.lambda' must be a list of 3 weights")
        kwargs["weights"] = tuple(float(w) for w in weights)
    else:
        kwargs["weights"] = base.weights
    return RiskConfig(**kwargs)


def resolve_risk_config(overrides: dict | None, base: RiskConfig) -> RiskConfig:
    """Apply a config file's risk overrides on top of a corpus's stored settings."""
    return _risk_overrides({"risk": overrides}, base, "risk overrides")


@dataclass(frozen=True)
class GenCorpusConfig:
    spec: CorpusSpec
    raw: dict = field(default_factory=dict, compare=False)


def load_gen_corpus_config(path: str | Path) -> GenCorpusConfig:
    data = _load_json(path)
    where = f"corpus spec {path}"
    _check_version(data, where)
    _reject_unknown(data, {"corpus"}, where)
    corpus_obj = data.get("corpus", {})
    if not isinstance(corpus_obj, dict):
        raise ConfigError(f"{where}: field 'corpus' must be an object")
    return GenCorpusConfig(spec=spec_from_obj(corpus_obj), raw=data)


@dataclass(frozen=True)
class RunCommandConfig:
    corpus_dir: str
    policy: dict
    iterations: int
    slate_size: int
    sample_period: int
    risk: dict | None
    log_events: bool
    raw: dict = field(default_factory=dict, compare=False)


def load_run_config(path: str | Path) -> RunCommandConfig:
    data = _load_json(path)
    where = f"run config {path}"
    _check_version(data, where)
    _reject_unknown(
        data,
        {"corpus", "policy", "iterations", "slate_size", "sample_period", "risk",
         "log_events"},
        where,
    )
    if "corpus" not in data or not isinstance(data["corpus"], str):
        raise ConfigError(f"{where}: field 'corpus' must name the corpus directory")
    if "policy" not in data or not isinstance(data["policy"], dict):
        raise ConfigError(f"{where}: field 'policy' must be a policy object")
    from .policies import build_policy

    build_policy(data["policy"])
    iterations = _positive_int(data, "iterations", DEFAULT_ITERATIONS, where)
    slate = _positive_int(data, "slate_size", DEFAULT_SLATE, where)
    period = _positive_int(data, "sample_period", DEFAULT_SAMPLE_PERIOD, where)
    if iterations % period != 0:
        raise ConfigError(
            f"{where}: field 'sample_period' must divide 'iterations' "
            f"({period} does not divide {iterations})"
        )
    log_events = data.get("log_events", False)
    if not isinstance(log_events, bool):
        raise ConfigError(f"{where}: field 'log_events' must be a boolean")
    risk = data.get("risk")
    if risk is not None and not isinstance(risk, dict):
        raise ConfigError(f"{where}: field 'risk' must be an object")
    return RunCommandConfig(
        corpus_dir=data["corpus"], policy=dict(data["policy"]), iterations=iterations,
        slate_size=slate, sample_period=period, risk=risk, log_events=log_events,
        raw=data,
    )


@dataclass(frozen=True)
class CompareConfig:
    corpus_dir: str
    policies: list[dict]
    iterations: int
    slate_size: int
    sample_period: int
    replications: int
    risk: dict | None
    raw: dict = field(default_factory=dict, compare=False)


def load_compare_config(path: str | Path) -> CompareConfig:
    data = _load_json(path)
    where = f"compare config {path}"
    _check_version(data, where)
    _reject_unknown(
        data,
        {"corpus", "policies", "iterations", "slate_size", "sample_period",
         "replications", "risk"},
        where,
    )
    if "corpus" not in data or not isinstance(data["corpus"], str):
        raise ConfigError(f"{where}: field 'corpus' must name the corpus directory")
    policies = _policy_list(data, "policies", where)
    iterations = _positive_int(data, "iterations", DEFAULT_ITERATIONS, where)
    slate = _positive_int(data, "slate_size", DEFAULT_SLATE, where)
    period = _positive_int(data, "sample_period", DEFAULT_SAMPLE_PERIOD, where)
    reps = _positive_int(data, "replications", DEFAULT_REPLICATIONS, where)
    if iterations % period != 0:
        raise ConfigError(
            f"{where}: field 'sample_period' must divide 'iterations' "
            f"({period} does not divide {iterations})"
        )
    risk = data.get("risk")
    if risk is not None and not isinstance(risk, dict):
        raise ConfigError(f"{where}: field 'risk' must be an object")
    return CompareConfig(
        corpus_dir=data["corpus"], policies=policies, iterations=iterations,
        slate_size=slate, sample_period=period, replications=reps, risk=risk,
        raw=data,
    )


@dataclass(frozen=True)
class SweepBConfig:
    clusters: int
    members: int
    grid_step: float
    raw: dict = field(default_factory=dict, compare=False)


def load_sweep_b_config(path: str | Path) -> SweepBConfig:
    data = _load_json(path)
    where = f"threshold sweep config {path}"
    _check_version(data, where)
    _reject_unknown(data, {"clusters", "members", "grid_step"}, where)
    clusters = _positive_int(data, "clusters", 5, where)
    if clusters < 2:
        raise ConfigError(f"{where}: field 'clusters' must be at least 2")
    members = _positive_int(data, "members", 12, where)
    step = data.get("grid_step", 0.05)
    if not isinstance(step, (int, float)) or not 0.0 < step <= 1.0:
        raise ConfigError(f"{where}: field 'grid_step' must lie in (0, 1]")
    return SweepBConfig(clusters=clusters, members=members, grid_step=float(step), raw=data)


@dataclass(frozen=True)
class SweepEpsConfig:
    corpus_dir: str
    grid: tuple[float, ...]
    iterations: int
    slate_size: int
    sample_period: int
    replications: int
    entry_fraction: float
    raw: dict = field(default_factory=dict, compare=False)


def load_sweep_eps_config(path: str | Path) -> SweepEpsConfig:
    data = _load_json(path)
    where = f"exploration sweep config {path}"
    _check_version(data, where)
    _reject_unknown(
        data,
        {"corpus", "grid", "iterations", "slate_size", "sample_period",
         "replications", "entry_fraction"},
        where,
    )
    if "corpus" not in data or not isinstance(data["corpus"], str):
        raise ConfigError(f"{where}: field 'corpus' must name the corpus directory")
    grid_raw = data.get("grid", list(DEFAULT_EPS_GRID))
    if not isinstance(grid_raw, list) or not grid_raw:
        raise ConfigError(f"{where}: field 'grid' must be a non-empty list")
    grid = []
    for g in grid_raw:
        if not isinstance(g, (int, float)) or not 0.0 <= g <= 1.0:
            raise ConfigError(f"{where}: field 'grid' entries must lie in [0, 1]")
        grid.append(float(g))
    iterations = _positive_int(data, "iterations", DEFAULT_ITERATIONS, where)
    slate = _positive_int(data, "slate_size", DEFAULT_SLATE, where)
    period = _positive_int(data, "sample_period", DEFAULT_SAMPLE_PERIOD, where)
    reps = _positive_int(data, "replications", 3, where)
    if iterations % period != 0:
        raise ConfigError(
            f"{where}: field 'sample_period' must divide 'iterations' "
            f"({period} does not divide {iterations})"
        )
    frac = data.get("entry_fraction", 0.5)
    if not isinstance(frac, (int, float)) or not 0.0 < frac <= 1.0:
        raise ConfigError(f"{where}: field 'entry_fraction' must lie in (0, 1]")
    return SweepEpsConfig(
        corpus_dir=data["corpus"], grid=tuple(grid), iterations=iterations,
        slate_size=slate, sample_period=period, replications=reps,
        entry_fraction=float(frac), raw=data,
    )


@dataclass(frozen=True)
class SparsityConfig:
    corpus_dir: str
    fractions: tuple[float, ...]
    policies: list[dict]
    iterations: int
    slate_size: int
    sample_period: int
    replications: int
    raw: dict = field(default_factory=dict, compare=False)


def load_sparsity_config(path: str | Path) -> SparsityConfig:
    data = _load_json(path)
    where = f"sparsity config {path}"
    _check_version(data, where)
    _reject_unknown(
        data,
        {"corpus", "fractions", "policies", "iterations", "slate_size",
         "sample_period", "replications"},
        where,
    )
    if "corpus" not in data or not isinstance(data["corpus"], str):
        raise ConfigError(f"{where}: field 'corpus' must name the corpus directory")
    fractions_raw = data.get("fractions", list(DEFAULT_SWEEP_FRACTIONS))
    if not isinstance(fractions_raw, list) or not fractions_raw:
        raise ConfigError(f"{where}: field 'fractions' must be a non-empty list")
    fractions = []
    for f in fractions_raw:
        if not isinstance(f, (int, float)) or not 0.0 < f <= 1.0:
            raise ConfigError(f"{where}: field 'fractions' entries must lie in (0, 1]")
        fractions.append(float(f))
    policies = _policy_list(data, "policies", where)
    iterations = _positive_int(data, "iterations", DEFAULT_ITERATIONS, where)
    slate = _positive_int(data, "slate_size", DEFAULT_SLATE, where)
    period = _positive_int(data, "sample_period", DEFAULT_SAMPLE_PERIOD, where)
    reps = _positive_int(data, "replications", 3, where)
    if iterations % period != 0:
        raise ConfigError(
            f"{where}: field 'sample_period' must divide 'iterations' "
            f"({period} does not divide {iterations})"
        )
    return SparsityConfig(
        corpus_dir=data["corpus"], fractions=tuple(fractions), policies=policies,
        iterations=iterations, slate_size=slate, sample_period=period,
        replications=reps, raw=data,
    )
