"""Risk-aware contextual bandit simulator for context-aware recommendation.

The package couples a case-based preference store (one case per situation,
situations described by concepts from three small taxonomies) with a family
of slate bandit policies, a composite situation-risk model that adapts the
exploration rate, and a synthetic click environment with known ground truth
for offline evaluation.
"""
from .configs import (
    CompareConfig,
    GenCorpusConfig,
    RunCommandConfig,
    SparsityConfig,
    SweepBConfig,
    SweepEpsConfig,
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
    BUCKET_LABELS,
    BucketReport,
    ComparisonResult,
    PolicySummary,
    RunResult,
    RunSettings,
    SparsityResult,
    SweepBResult,
    SweepEpsResult,
    UnusableCorpusError,
    compare_policies,
    critical_subsample,
    make_cluster_sample,
    risk_bucket_report,
    run_experiment,
    sparsity_sweep,
    sweep_b,
    sweep_epsilon,
    write_bucket_csv,
    write_compare_curves_csv,
    write_compare_summary_csv,
    write_csv,
    write_gaps_csv,
    write_run_csv,
    write_sparsity_csv,
    write_sweep_b_csv,
    write_sweep_eps_csv,
)
from .ontology import (
    DIMENSIONS,
    Taxonomy,
    TaxonomyError,
    TaxonomySet,
    UnknownConceptError,
)
from .policies import (
    POLICY_TYPES,
    InsufficientCandidatesError,
    Policy,
    RunBinding,
    beginning_schedule,
    build_policy,
    decreasing_schedule,
    eg_candidates,
    eg_update,
    recommend_slate,
    risk_to_epsilon,
    stepwise_schedule,
    ucb_index,
    vdbe_activation,
    vdbe_update,
)
from .risk import (
    ConceptRisk,
    EmptyCriticalSetError,
    InsufficientDataError,
    RiskBreakdown,
    RiskConfig,
    RiskModel,
    SituationStats,
    ValidationError,
    aggregate_risk,
    critical_centroid,
    critical_dimension_means,
    load_risk_seed,
    normalize_dimension_weights,
    propagate_risk,
    risk_concepts,
    risk_similarity,
    risk_variance,
    save_risk_seed,
    seeded_concept_risk,
    situation_ctr,
    var_threshold,
)
from .simenv import (
    Corpus,
    CorpusSpec,
    GenerationError,
    GroundTruth,
    StratumShape,
    generate_corpus,
    halve_entries,
    simulate_feedback,
    sparsify,
    spec_from_obj,
)
from .situations import (
    Case,
    CaseBase,
    DocPrefs,
    EmptyCaseBaseError,
    Situation,
    UserPreferences,
    doc_reward,
    situation_sim,
)

__version__ = "0.1.0"

__all__ = [
    "BUCKET_LABELS",
    "BucketReport",
    "Case",
    "CaseBase",
    "CompareConfig",
    "ComparisonResult",
    "ConceptRisk",
    "ConfigError",
    "Corpus",
    "CorpusSpec",
    "DIMENSIONS",
    "DocPrefs",
    "EmptyCaseBaseError",
    "EmptyCriticalSetError",
    "GenCorpusConfig",
    "GenerationError",
    "GroundTruth",
    "InsufficientCandidatesError",
    "InsufficientDataError",
    "POLICY_TYPES",
    "Policy",
    "PolicySummary",
    "RiskBreakdown",
    "RiskConfig",
    "RiskModel",
    "RunBinding",
    "RunCommandConfig",
    "RunResult",
    "RunSettings",
    "Situation",
    "SituationStats",
    "SparsityConfig",
    "SparsityResult",
    "StratumShape",
    "SweepBConfig",
    "SweepBResult",
    "SweepEpsConfig",
    "SweepEpsResult",
    "Taxonomy",
    "TaxonomyError",
    "TaxonomySet",
    "UnknownConceptError",
    "UnusableCorpusError",
    "UserPreferences",
    "ValidationError",
    "__version__",
    "aggregate_risk",
    "beginning_schedule",
    "compare_policies",
    "config_hash",
    "critical_centroid",
    "critical_dimension_means",
    "critical_subsample",
    "decreasing_schedule",
    "doc_reward",
    "eg_candidates",
    "eg_update",
    "generate_corpus",
    "halve_entries",
    "load_risk_seed",
    "load_compare_config",
    "load_gen_corpus_config",
    "load_run_config",
    "load_sparsity_config",
    "load_sweep_b_config",
    "load_sweep_eps_config",
    "make_cluster_sample",
    "normalize_dimension_weights",
    "propagate_risk",
    "recommend_slate",
    "resolve_risk_config",
    "risk_bucket_report",
    "risk_concepts",
    "risk_similarity",
    "risk_to_epsilon",
    "risk_variance",
    "run_experiment",
    "save_risk_seed",
    "seeded_concept_risk",
    "simulate_feedback",
    "situation_ctr",
    "situation_sim",
    "spec_from_obj",
    "sparsify",
    "sparsity_sweep",
    "stepwise_schedule",
    "sweep_b",
    "sweep_epsilon",
    "ucb_index",
    "var_threshold",
    "vdbe_activation",
    "vdbe_update",
    "write_bucket_csv",
    "write_compare_curves_csv",
    "write_compare_summary_csv",
    "write_csv",
    "write_gaps_csv",
    "write_run_csv",
    "write_sparsity_csv",
    "write_sweep_b_csv",
    "write_sweep_eps_csv",
]
