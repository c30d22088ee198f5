"""Experiment loop and offline analyses.

The protocol: at each trial a stored case is drawn uniformly (only cases
with more than 20 documents take part), the active policy turns the
situation into an exploration rate, a slate of 10 documents is assembled
from the case's pool, Bernoulli clicks are drawn from the ground truth,
preference counts and policy state are updated, and the cumulative
click-through rate is sampled on a fixed period.

Comparisons run each policy over the same per-replication seed schedule
(common random numbers), so two entries with identical parameters produce
identical rows and policy differences are paired across replications.
"""
from __future__ import annotations

import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .ontology import Taxonomy, TaxonomySet, DIMENSIONS
from .policies import Policy, RunBinding, build_policy, recommend_slate
from .risk import RiskConfig, RiskModel, SituationStats, seeded_concept_risk
from .simenv import Corpus, GroundTruth, halve_entries, sparsify
from .situations import (
    Case, CaseBase, DocPrefs, Situation, UserPreferences, situation_sim,
)

MIN_POOL = 21  # a case takes part only with more than 20 documents

BUCKET_LABELS = ("[1,20]", "(20,40]", "(40,60]", "(60,80]", "(80,100]")


class UnusableCorpusError(ValueError):
    """No case in the corpus satisfies the minimum pool size."""


@dataclass(frozen=True)
class RunSettings:
    """Shared knobs of a single experiment run."""

    iterations: int = 10000
    slate_size: int = 10
    sample_period: int = 1000
    log_events: bool = False

    def __post_init__(self):
        if self.iterations < 1:
            raise ConfigError(f"iterations must be >= 1, got {self.iterations}")
        if self.slate_size < 1:
            raise ConfigError(f"slate_size must be >= 1, got {self.slate_size}")
        if self.sample_period < 1:
            raise ConfigError(f"sample_period must be >= 1, got {self.sample_period}")
        if self.iterations % self.sample_period != 0:
            raise ConfigError(
                f"sample_period must divide iterations "
                f"({self.sample_period} does not divide {self.iterations})"
            )


@dataclass
class RunResult:
    label: str
    iterations: int
    slate_size: int
    sample_period: int
    sample_points: list[int]
    samples: list[float]          # cumulative CTR at each sampling point
    final_ctr: float
    total_clicks: int
    total_slots: int
    stratum_clicks: np.ndarray    # indexed by stratum 1..5 (slot 0 unused)
    stratum_slots: np.ndarray
    stratum_eps_sum: np.ndarray   # summed exploration rate per stratum
    stratum_visits: np.ndarray    # trials per stratum
    eps_trace: list[float]        # mean exploration rate per sampling window
    explored_slots: int
    case_base: CaseBase | None    # final state of the preference store
    events: list[tuple] | None    # (t, case_index, eps, explored, clicks, slots)


def _copy_case_base(case_base: CaseBase) -> CaseBase:
    fresh = CaseBase()
    for case in case_base:
        prefs = UserPreferences()
        for doc, p in case.prefs.entries.items():
            prefs.add(doc, DocPrefs(p.clicks, p.recoms, p.read_time))
        fresh.add(Case(
            situation=case.situation,
            prefs=prefs,
            is_critical=case.is_critical,
            risk_history=list(case.risk_history),
        ))
    return fresh


def build_risk_model(corpus: Corpus, case_base: CaseBase,
                     risk_config: RiskConfig | None = None) -> RiskModel:
    """Risk model over a run's private case base, seeded with the corpus's
    per-concept risk priors and the recorded per-situation history."""
    config = risk_config if risk_config is not None else corpus.risk_config
    concept_risk = seeded_concept_risk(
        corpus.taxonomies, corpus.concept_seeds, corpus.concept_prior_weight
    )
    stats = SituationStats.from_case_base(case_base)
    return RiskModel(config, corpus.taxonomies, case_base,
                     concept_risk=concept_risk, stats=stats)


def run_experiment(corpus: Corpus, policy: Policy, settings: RunSettings,
                   rng: np.random.Generator,
                   risk_config: RiskConfig | None = None,
                   keep_snapshot: bool = True) -> RunResult:
    """Run one policy for the configured number of trials."""
    cases = corpus.case_base.cases
    n_cases = len(cases)
    if n_cases == 0:
        raise UnusableCorpusError("corpus has no cases")
    gt = corpus.ground_truth
    if len(gt) != n_cases:
        raise ConfigError("ground truth does not cover the case base")

    usable = [i for i in range(n_cases) if len(cases[i].prefs) >= MIN_POOL]
    if not usable:
        raise UnusableCorpusError(
            f"no case has more than {MIN_POOL - 1} documents"
        )

    pool_sizes = np.array([len(gt.doc_ids[i]) for i in range(n_cases)], dtype=np.int64)
    width = int(pool_sizes.max())
    clicks = np.zeros((n_cases, width))
    recoms = np.zeros((n_cases, width))
    probs = np.zeros((n_cases, width))
    for i, case in enumerate(cases):
        docs = gt.doc_ids[i]
        if set(case.prefs.entries) != set(docs):
            raise ConfigError(
                f"case {i} documents disagree with the ground truth"
            )
        for j, doc in enumerate(docs):
            p = case.prefs.get(doc)
            clicks[i, j] = p.clicks
            recoms[i, j] = p.recoms
            probs[i, j] = gt.click_probs[i][j]

    run_base = _copy_case_base(corpus.case_base)
    risk_model = build_risk_model(corpus, run_base, risk_config)
    stats = risk_model.stats
    situations = [c.situation for c in cases]
    strata = gt.strata

    policy.bind(RunBinding(
        horizon=settings.iterations,
        n_cases=n_cases,
        pool_size=width,
        situations=situations,
        risk_model=risk_model,
    ))

    slate_size = settings.slate_size
    period = settings.sample_period
    total_clicks = 0
    total_slots = 0
    explored_total = 0
    eps_sum = 0.0
    stratum_clicks = np.zeros(6, dtype=np.int64)
    stratum_slots = np.zeros(6, dtype=np.int64)
    stratum_eps_sum = np.zeros(6)
    stratum_visits = np.zeros(6, dtype=np.int64)
    sample_points: list[int] = []
    samples: list[float] = []
    eps_trace: list[float] = []
    events: list[tuple] | None = [] if settings.log_events else None

    n_usable = len(usable)
    for t in range(1, settings.iterations + 1):
        ci = usable[int(rng.integers(n_usable))]
        eps = policy.exploration_rate(t, ci, rng)
        pool = int(pool_sizes[ci])
        slate, explored = recommend_slate(
            clicks[ci, :pool], recoms[ci, :pool], t,
            policy.uses_bonus, eps, slate_size, rng,
        )
        clicked = rng.random(slate_size) < probs[ci, slate]
        n_clicks = int(clicked.sum())

        c_before = clicks[ci, slate]
        r_before = recoms[ci, slate]
        m_before = np.where(r_before > 0.0, c_before / np.maximum(r_before, 1.0), 0.0)
        m_after = (c_before + clicked) / (r_before + 1.0)
        value_delta = float(np.abs(m_after - m_before).mean())

        clicks[ci, slate] += clicked
        recoms[ci, slate] += 1.0
        stats.record(situations[ci], n_clicks, slate_size)
        policy.observe(t, ci, slate, clicked, value_delta, rng)

        total_clicks += n_clicks
        total_slots += slate_size
        explored_total += explored
        eps_sum += eps
        s = int(strata[ci])
        stratum_clicks[s] += n_clicks
        stratum_slots[s] += slate_size
        stratum_eps_sum[s] += eps
        stratum_visits[s] += 1
        if events is not None:
            events.append((t, ci, eps, explored, n_clicks, slate_size))
        if t % period == 0:
            sample_points.append(t)
            samples.append(total_clicks / total_slots)
            eps_trace.append(eps_sum / period)
            eps_sum = 0.0

    snapshot: CaseBase | None = None
    if keep_snapshot:
        for i, case in enumerate(run_base):
            for j, doc in enumerate(gt.doc_ids[i]):
                p = case.prefs.get(doc)
                p.clicks = int(round(clicks[i, j]))
                p.recoms = int(round(recoms[i, j]))
        snapshot = run_base

    return RunResult(
        label=policy.label,
        iterations=settings.iterations,
        slate_size=slate_size,
        sample_period=period,
        sample_points=sample_points,
        samples=samples,
        final_ctr=total_clicks / total_slots,
        total_clicks=total_clicks,
        total_slots=total_slots,
        stratum_clicks=stratum_clicks,
        stratum_slots=stratum_slots,
        stratum_eps_sum=stratum_eps_sum,
        stratum_visits=stratum_visits,
        eps_trace=eps_trace,
        explored_slots=explored_total,
        case_base=snapshot,
        events=events,
    )


# ---------------------------------------------------------------------------
# policy comparison


@dataclass
class PolicySummary:
    label: str
    final_mean: float
    final_std: float
    curve_mean: list[float]
    curve_std: list[float]
    stratum_ctr: list[float | None]   # pooled over replications, strata 1..5
    stratum_eps: list[float | None]   # pooled mean exploration rate, strata 1..5
    mean_explored: float


@dataclass
class ComparisonResult:
    labels: list[str]
    replications: int
    seed: int
    sample_points: list[int]
    runs: dict[str, list[RunResult]]
    summaries: list[PolicySummary] = field(default_factory=list)

    def summary_for(self, label: str) -> PolicySummary:
        for s in self.summaries:
            if s.label == label:
                return s
        raise KeyError(f"no policy labeled {label!r} in this comparison")


_POOL_STATE: dict = {}


def _pool_init(corpus, settings, risk_config):
    _POOL_STATE["corpus"] = corpus
    _POOL_STATE["settings"] = settings
    _POOL_STATE["risk_config"] = risk_config


def _pool_task(args):
    spec, seed_seq = args
    policy = build_policy(spec)
    rng = np.random.default_rng(seed_seq)
    return run_experiment(
        _POOL_STATE["corpus"], policy, _POOL_STATE["settings"], rng,
        risk_config=_POOL_STATE["risk_config"], keep_snapshot=False,
    )


def compare_policies(corpus: Corpus, policy_specs: list[dict],
                     settings: RunSettings, seed: int,
                     replications: int = 10, jobs: int = 1,
                     risk_config: RiskConfig | None = None) -> ComparisonResult:
    """Run every policy across the shared replication seed schedule.

    Replication r uses the same random stream for every policy, so identical
    policy entries produce identical results and cross-policy differences are
    paired. Results are deterministic in (corpus, specs, settings, seed) and
    independent of the job count.
    """
    if replications < 1:
        raise ConfigError(f"replications must be >= 1, got {replications}")
    labels = []
    for spec in policy_specs:
        label = build_policy(spec).label
        if label in labels:
            raise ConfigError(f"duplicate policy label {label!r}")
        labels.append(label)

    rep_seeds = np.random.SeedSequence(seed).spawn(replications)
    tasks = [
        (dict(spec), rep_seeds[r])
        for spec in policy_specs
        for r in range(replications)
    ]

    if jobs > 1:
        with ProcessPoolExecutor(
            max_workers=jobs, initializer=_pool_init,
            initargs=(corpus, settings, risk_config),
        ) as pool:
            results = list(pool.map(_pool_task, tasks, chunksize=1))
    else:
        _pool_init(corpus, settings, risk_config)
        results = [_pool_task(t) for t in tasks]

    runs: dict[str, list[RunResult]] = {}
    for idx, result in enumerate(results):
        runs.setdefault(labels[idx // replications], []).append(result)

    comparison = ComparisonResult(
        labels=labels,
        replications=replications,
        seed=seed,
        sample_points=results[0].sample_points,
        runs=runs,
    )
    for label in labels:
        rs = runs[label]
        finals = np.array([r.final_ctr for r in rs])
        curves = np.array([r.samples for r in rs])
        s_clicks = np.sum([r.stratum_clicks for r in rs], axis=0)
        s_slots = np.sum([r.stratum_slots for r in rs], axis=0)
        s_eps = np.sum([r.stratum_eps_sum for r in rs], axis=0)
        s_visits = np.sum([r.stratum_visits for r in rs], axis=0)
        stratum_ctr: list[float | None] = [
            (float(s_clicks[s] / s_slots[s]) if s_slots[s] > 0 else None)
            for s in range(1, 6)
        ]
        stratum_eps: list[float | None] = [
            (float(s_eps[s] / s_visits[s]) if s_visits[s] > 0 else None)
            for s in range(1, 6)
        ]
        ddof = 1 if len(rs) > 1 else 0
        comparison.summaries.append(PolicySummary(
            label=label,
            final_mean=float(finals.mean()),
            final_std=float(finals.std(ddof=ddof)),
            curve_mean=[float(x) for x in curves.mean(axis=0)],
            curve_std=[float(x) for x in curves.std(axis=0, ddof=ddof)],
            stratum_ctr=stratum_ctr,
            stratum_eps=stratum_eps,
            mean_explored=float(np.mean([r.explored_slots for r in rs])),
        ))
    return comparison


# ---------------------------------------------------------------------------
# risk bucket analysis


@dataclass
class BucketReport:
    buckets: tuple[str, ...]
    labels: list[str]
    table: dict[str, list[float | None]]  # label -> CTR per bucket (None = empty)
    risk_label: str | None
    best_other: str | None
    gaps: list[float | None] | None


def risk_bucket_report(comparison: ComparisonResult,
                       risk_label: str | None = None) -> BucketReport:
    """Per-policy CTR within each risk bucket, and the gap between the
    risk-adaptive policy and the best other policy (by overall final CTR)."""
    table = {s.label: list(s.stratum_ctr) for s in comparison.summaries}

    if risk_label is None:
        from .policies import RiskUcbPolicy

        risk_labels = [
            s.label for s in comparison.summaries
            if s.label == RiskUcbPolicy.id or s.label.startswith(RiskUcbPolicy.id)
        ]
        risk_label = risk_labels[0] if risk_labels else None
    elif risk_label not in table:
        raise KeyError(f"no policy labeled {risk_label!r} in this comparison")

    best_other = None
    gaps: list[float | None] | None = None
    if risk_label is not None:
        others = [s for s in comparison.summaries if s.label != risk_label]
        if others:
            best_other = max(others, key=lambda s: s.final_mean).label
            gaps = []
            for b in range(5):
                a = table[risk_label][b]
                c = table[best_other][b]
                gaps.append(None if a is None or c is None else a - c)
    return BucketReport(
        buckets=BUCKET_LABELS,
        labels=list(comparison.labels),
        table=table,
        risk_label=risk_label,
        best_other=best_other,
        gaps=gaps,
    )


# ---------------------------------------------------------------------------
# similarity-threshold sweep


@dataclass
class ClusterSample:
    taxonomies: TaxonomySet
    situations: list[Situation]
    labels: list[int]
    min_intra: float
    max_inter: float

    @property
    def separating_threshold(self) -> float:
        return (self.min_intra + self.max_inter) / 2.0


def make_cluster_sample(clusters: int, members: int,
                        rng: np.random.Generator) -> ClusterSample:
    """Labeled situations with separated within/between-cluster similarity.

    Per dimension, each cluster owns a leaf family at depth 5 under its own
    depth-4 parent; clusters are paired under shared depth-2 regions. Distinct
    leaves under one parent meet at similarity 0.8, clusters sharing a region
    at 0.4, everything else at 0.2, giving a wide separating band.
    """
    if clusters < 2:
        raise ConfigError(f"need at least 2 clusters, got {clusters}")
    if members < 2:
        raise ConfigError(f"need at least 2 members per cluster, got {members}")
    n_leaves = members + 2
    taxonomies = []
    for dim in DIMENSIONS:
        prefix = dim[:3]
        root = f"{prefix}-root"
        nodes: list[tuple[str, str | None]] = [(root, None)]
        for c in range(clusters):
            region = f"{prefix}-r{c // 2}"
            if c % 2 == 0:
                nodes.append((region, root))
            mid = f"{prefix}-m{c}"
            parent = f"{prefix}-p{c}"
            nodes.append((mid, region))
            nodes.append((parent, mid))
            for i in range(n_leaves):
                nodes.append((f"{prefix}-c{c}x{i:02d}", parent))
        taxonomies.append(Taxonomy(dim, root, nodes))
    taxonomy_set = TaxonomySet(*taxonomies)

    situations: list[Situation] = []
    labels: list[int] = []
    for c in range(clusters):
        used: set[tuple[int, ...]] = set()
        while len(used) < members:
            triple = tuple(int(rng.integers(n_leaves)) for _ in DIMENSIONS)
            if triple not in used:
                used.add(triple)
        for triple in sorted(used):
            situations.append(Situation(*(
                f"{dim[:3]}-c{c}x{leaf:02d}"
                for dim, leaf in zip(DIMENSIONS, triple)
            )))
            labels.append(c)

    min_intra = 1.0
    max_inter = 0.0
    n = len(situations)
    for i in range(n):
        for j in range(i + 1, n):
            sim = situation_sim(taxonomy_set, situations[i], situations[j])
            if labels[i] == labels[j]:
                min_intra = min(min_intra, sim)
            else:
                max_inter = max(max_inter, sim)
    return ClusterSample(taxonomy_set, situations, labels, min_intra, max_inter)


@dataclass
class SweepBResult:
    grid: list[float]
    accuracy: list[float]
    best_b: float
    constructed_threshold: float
    min_intra: float
    max_inter: float
    metric: str = "pairwise co-group accuracy"


def sweep_b(sample: ClusterSample, grid_step: float = 0.05) -> SweepBResult:
    """Accuracy of thresholded grouping over a similarity grid.

    A pair of situations is correct when it shares a label and its similarity
    reaches the threshold, or differs in label and falls below. The reported
    optimum is the midpoint of the best-scoring plateau.
    """
    if not 0.0 < grid_step <= 1.0:
        raise ConfigError(f"grid_step must lie in (0, 1], got {grid_step}")
    if len(set(sample.labels)) < 2:
        raise ConfigError("need at least 2 labeled clusters")
    n = len(sample.situations)
    sims = []
    same = []
    for i in range(n):
        for j in range(i + 1, n):
            sims.append(situation_sim(sample.taxonomies,
                                      sample.situations[i], sample.situations[j]))
            same.append(sample.labels[i] == sample.labels[j])
    sims_arr = np.array(sims)
    same_arr = np.array(same)

    grid = []
    b = 0.0
    while b < 1.0 - 1e-9:
        grid.append(round(b, 10))
        b += grid_step
    grid.append(1.0)

    accuracy = []
    for b in grid:
        grouped = sims_arr >= b
        correct = np.count_nonzero(grouped == same_arr)
        accuracy.append(correct / len(sims))

    best = max(accuracy)
    best_indices = [i for i, a in enumerate(accuracy) if a == best]
    best_b = grid[best_indices[(len(best_indices) - 1) // 2]]
    return SweepBResult(
        grid=grid,
        accuracy=accuracy,
        best_b=best_b,
        constructed_threshold=sample.separating_threshold,
        min_intra=sample.min_intra,
        max_inter=sample.max_inter,
    )


# ---------------------------------------------------------------------------
# exploration-rate sweep


@dataclass
class SweepEpsResult:
    grid: list[float]
    converged_ctr: list[float]
    final_ctr: list[float]
    recommended: tuple[float, float]


def critical_subsample(corpus: Corpus, entry_fraction: float, seed: int) -> Corpus:
    """The critical cases only, with a sampled share of their history entries."""
    critical = [i for i, c in enumerate(corpus.case_base.cases) if c.is_critical]
    if not critical:
        raise ConfigError("corpus has no critical cases to subsample")
    cases = corpus.case_base.cases
    new_base = CaseBase()
    situations, doc_ids, probs, strata = [], [], [], []
    for i in critical:
        case = cases[i]
        prefs = UserPreferences()
        for doc, p in case.prefs.entries.items():
            prefs.add(doc, DocPrefs(p.clicks, p.recoms, p.read_time))
        new_base.add(Case(case.situation, prefs, case.is_critical,
                          list(case.risk_history)))
        situations.append(case.situation)
        doc_ids.append(list(corpus.ground_truth.doc_ids[i]))
        probs.append(corpus.ground_truth.click_probs[i].copy())
        strata.append(int(corpus.ground_truth.strata[i]))
    sub = Corpus(
        corpus.taxonomies, new_base,
        GroundTruth(np.array(strata, dtype=np.int64), situations, doc_ids, probs),
        list(corpus.concept_seeds), corpus.risk_config,
        corpus.concept_prior_weight,
        dict(corpus.meta, critical_only=True),
    )
    if entry_fraction < 1.0:
        sub = halve_entries(sub, entry_fraction, seed)
    return sub


def sweep_epsilon(corpus: Corpus, grid: tuple[float, ...], settings: RunSettings,
                  seed: int, replications: int = 3, jobs: int = 1,
                  entry_fraction: float = 0.5,
                  plateau_tolerance: float = 0.05) -> SweepEpsResult:
    """Constant-rate policy over the confidence-bonus index, swept across the
    exploration grid on the critical-situation subsample."""
    if not grid:
        raise ConfigError("exploration grid is empty")
    sub = critical_subsample(corpus, entry_fraction, seed)
    specs = [
        {"id": "eps-ucb", "eps": float(e), "label": f"eps-{e:g}"} for e in grid
    ]
    comparison = compare_policies(sub, specs, settings, seed,
                                  replications=replications, jobs=jobs)
    converged = []
    finals = []
    for spec in specs:
        s = comparison.summary_for(spec["label"])
        tail = s.curve_mean[-3:] if len(s.curve_mean) >= 3 else s.curve_mean
        converged.append(float(np.mean(tail)))
        finals.append(s.final_mean)
    top = max(converged)
    cutoff = top * (1.0 - plateau_tolerance)
    plateau = [g for g, c in zip(grid, converged) if c >= cutoff]
    return SweepEpsResult(
        grid=[float(g) for g in grid],
        converged_ctr=converged,
        final_ctr=finals,
        recommended=(min(plateau), max(plateau)),
    )


# ---------------------------------------------------------------------------
# sparsity sweep


@dataclass
class SparsityResult:
    fractions: list[float]
    labels: list[str]
    final_mean: dict[str, list[float]]   # label -> per-fraction mean final CTR
    final_std: dict[str, list[float]]
    cases_kept: list[int]


def sparsity_sweep(corpus: Corpus, fractions: tuple[float, ...],
                   policy_specs: list[dict], settings: RunSettings, seed: int,
                   replications: int = 3, jobs: int = 1,
                   risk_config: RiskConfig | None = None) -> SparsityResult:
    """Re-run the comparison on progressively sparser corpora."""
    if not fractions:
        raise ConfigError("no sparsity fractions given")
    labels = [build_policy(s).label for s in policy_specs]
    final_mean: dict[str, list[float]] = {label: [] for label in labels}
    final_std: dict[str, list[float]] = {label: [] for label in labels}
    kept = []
    for k, fraction in enumerate(fractions):
        sub = corpus if fraction >= 1.0 else sparsify(
            corpus, fraction, int(np.random.SeedSequence([seed, k]).generate_state(1)[0])
        )
        kept.append(len(sub.case_base))
        comparison = compare_policies(
            sub, policy_specs, settings,
            seed=int(np.random.SeedSequence([seed, k, 1]).generate_state(1)[0]),
            replications=replications, jobs=jobs, risk_config=risk_config,
        )
        for label in labels:
            s = comparison.summary_for(label)
            final_mean[label].append(s.final_mean)
            final_std[label].append(s.final_std)
    return SparsityResult(
        fractions=[float(f) for f in fractions],
        labels=labels,
        final_mean=final_mean,
        final_std=final_std,
        cases_kept=kept,
    )


# ---------------------------------------------------------------------------
# CSV output


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path: str | Path, comments: list[tuple[str, str]],
              header: list[str], rows) -> None:
    """CSV with ``# key=value`` provenance comments above the header row.

    Bodies are deterministic: floats use shortest round-trip formatting and
    rows are emitted in the order given.
    """
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    with open(p, "w", newline="") as fh:
        for key, value in comments:
            fh.write(f"# {key}={value}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def write_run_csv(result: RunResult, path: str | Path,
                  comments: list[tuple[str, str]]) -> None:
    rows = [
        (t, ctr, eps)
        for t, ctr, eps in zip(result.sample_points, result.samples, result.eps_trace)
    ]
    write_csv(path, comments, ["iteration", "avg_ctr", "mean_eps"], rows)


def write_compare_curves_csv(comparison: ComparisonResult, path: str | Path,
                             comments: list[tuple[str, str]]) -> None:
    rows = []
    for s in comparison.summaries:
        for t, m, sd in zip(comparison.sample_points, s.curve_mean, s.curve_std):
            rows.append((s.label, t, m, sd))
    write_csv(path, comments, ["policy", "iteration", "avg_ctr", "stddev"], rows)


def write_compare_summary_csv(comparison: ComparisonResult, path: str | Path,
                              comments: list[tuple[str, str]]) -> None:
    rows = [
        (s.label, s.final_mean, s.final_std, s.mean_explored)
        for s in comparison.summaries
    ]
    write_csv(path, comments,
              ["policy", "final_avg_ctr", "stddev", "mean_explored_slots"], rows)


def write_bucket_csv(report: BucketReport, path: str | Path,
                     comments: list[tuple[str, str]]) -> None:
    rows = []
    for label in report.labels:
        for b, bucket in enumerate(report.buckets):
            ctr = report.table[label][b]
            if ctr is None:
                continue
            rows.append((label, bucket, ctr))
    write_csv(path, comments, ["policy", "bucket", "avg_ctr"], rows)


def write_gaps_csv(report: BucketReport, path: str | Path,
                   comments: list[tuple[str, str]]) -> None:
    if report.gaps is None:
        raise ConfigError("comparison has no risk-adaptive policy to report gaps for")
    rows = [
        (bucket, report.risk_label, report.best_other, gap)
        for bucket, gap in zip(report.buckets, report.gaps)
        if gap is not None
    ]
    write_csv(path, comments, ["bucket", "risk_policy", "best_other", "ctr_gap"], rows)


def write_sweep_b_csv(result: SweepBResult, path: str | Path,
                      comments: list[tuple[str, str]]) -> None:
    extra = comments + [
        ("metric", result.metric),
        ("best_b", _fmt(result.best_b)),
        ("constructed_threshold", _fmt(result.constructed_threshold)),
    ]
    rows = list(zip(result.grid, result.accuracy))
    write_csv(path, extra, ["threshold", "accuracy"], rows)


def write_sweep_eps_csv(result: SweepEpsResult, path: str | Path,
                        comments: list[tuple[str, str]]) -> None:
    extra = comments + [
        ("recommended_eps_min", _fmt(result.recommended[0])),
        ("recommended_eps_max", _fmt(result.recommended[1])),
    ]
    rows = list(zip(result.grid, result.converged_ctr, result.final_ctr))
    write_csv(path, extra, ["epsilon", "converged_ctr", "final_ctr"], rows)


def write_sparsity_csv(result: SparsityResult, path: str | Path,
                       comments: list[tuple[str, str]]) -> None:
    rows = []
    for i, fraction in enumerate(result.fractions):
        for label in result.labels:
            rows.append((
                fraction, result.cases_kept[i], label,
                result.final_mean[label][i], result.final_std[label][i],
            ))
    write_csv(path, comments,
              ["fraction", "cases", "policy", "final_avg_ctr", "stddev"], rows)
