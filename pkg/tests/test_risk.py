"""The three risk estimators, their aggregation, and propagation."""
import numpy as np
import pytest
from hypothesis import given, strategies as st

from riskbandit import (
    Case,
    CaseBase,
    ConceptRisk,
    ConfigError,
    EmptyCriticalSetError,
    InsufficientDataError,
    RiskConfig,
    RiskModel,
    Situation,
    SituationStats,
    UserPreferences,
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
    situation_sim,
    var_threshold,
)


def sit(loc="a1x", tim="a1x", soc="a1x"):
    return Situation(f"loc-{loc}", f"tim-{tim}", f"soc-{soc}")


# -- configuration ----------------------------------------------------------

def test_risk_config_defaults_valid():
    cfg = RiskConfig()
    assert sum(cfg.weights) == pytest.approx(1.0, abs=1e-12)


def test_risk_config_validation():
    with pytest.raises(ConfigError):
        RiskConfig(sim_threshold=1.2)
    with pytest.raises(ConfigError):
        RiskConfig(alpha=-0.5)
    with pytest.raises(ConfigError):
        RiskConfig(weights=(0.5, 0.5, 0.5))
    with pytest.raises(ConfigError):
        RiskConfig(weights=(1.2, -0.2, 0.0))


# -- per-situation statistics ----------------------------------------------

def test_stats_track_and_record():
    stats = SituationStats()
    s = sit()
    stats.track(s)
    assert s in stats
    assert stats.recs_of(s) == 0.0
    assert situation_ctr(stats, s) == 0.0
    stats.record(s, 3, 10)
    stats.record(s, 1, 10)
    assert stats.clicks_of(s) == 4.0
    assert stats.recs_of(s) == 20.0
    assert situation_ctr(stats, s) == pytest.approx(0.2, rel=1e-12)


def test_tracked_ctrs_skips_unplayed():
    stats = SituationStats()
    stats.track(sit(loc="a1x"))
    stats.record(sit(loc="a1y"), 5, 10)
    ctrs = stats.tracked_ctrs()
    assert ctrs.shape == (1,)
    assert ctrs[0] == pytest.approx(0.5, rel=1e-12)


def test_var_threshold_needs_two_situations():
    stats = SituationStats()
    stats.record(sit(), 1, 10)
    with pytest.raises(InsufficientDataError):
        var_threshold(stats, 2.0)


def test_var_threshold_mean_minus_scaled_std():
    stats = SituationStats()
    stats.record(sit(loc="a1x"), 4, 10)   # ctr 0.4
    stats.record(sit(loc="a1y"), 6, 10)   # ctr 0.6
    # mean 0.5, std 0.1
    assert var_threshold(stats, 2.0) == pytest.approx(0.3, rel=1e-12)
    assert var_threshold(stats, 0.0) == pytest.approx(0.5, rel=1e-12)


def test_var_threshold_clamped():
    stats = SituationStats()
    stats.record(sit(loc="a1x"), 1, 10)
    stats.record(sit(loc="a1y"), 9, 10)
    assert var_threshold(stats, 10.0) == 0.0
    high = SituationStats()
    high.record(sit(loc="a1x"), 10, 10)
    high.record(sit(loc="a1y"), 10, 10)
    assert var_threshold(high, 0.0) < 1.0


# -- variance estimator -----------------------------------------------------

def test_risk_variance_oracle_values():
    assert risk_variance(0.6, 0.2) == pytest.approx(0.5, rel=1e-12)
    assert risk_variance(1.0, 0.2) == pytest.approx(0.0, abs=1e-12)
    assert risk_variance(0.2, 0.2) == 1.0
    assert risk_variance(0.05, 0.2) == 1.0


def test_risk_variance_threshold_validation():
    with pytest.raises(ConfigError):
        risk_variance(0.5, 1.0)


@given(st.floats(0.0, 1.0), st.floats(0.0, 0.99))
def test_risk_variance_bounded(ctr, threshold):
    assert 0.0 <= risk_variance(ctr, threshold) <= 1.0


# -- concept estimator ------------------------------------------------------

def test_concept_seed_validation(toy_taxonomies):
    cr = ConceptRisk(toy_taxonomies)
    with pytest.raises(ValidationError):
        cr.seed("location", "loc-a", 1.5)
    with pytest.raises(ConfigError):
        cr.seed("location", "loc-a", 0.5, weight=0)


def test_concept_value_is_mean_of_records(toy_taxonomies):
    cr = ConceptRisk(toy_taxonomies)
    s = sit()
    for v in (0.9, 0.9, 0.3):
        cr.record("location", "loc-a1x", s, v)
    assert cr.value_for("location", "loc-a1x") == pytest.approx(0.7, rel=1e-12)
    assert cr.history_for("location", "loc-a1x") == [0.9, 0.9, 0.3]
    assert cr.provenance_for("location", "loc-a1x") == [s, s, s]


def test_concept_value_falls_back_to_ancestors(toy_taxonomies):
    cr = ConceptRisk(toy_taxonomies)
    cr.seed("location", "loc-a", 0.8)
    # descendant without data inherits the nearest recorded ancestor
    assert cr.value_for("location", "loc-a1x") == pytest.approx(0.8, rel=1e-12)
    assert cr.value_for("location", "loc-b1") == 0.0
    cr.record("location", "loc-a1x", sit(), 0.2)
    assert cr.value_for("location", "loc-a1x") == pytest.approx(0.2, rel=1e-12)


def test_seed_weight_acts_as_prior_mass(toy_taxonomies):
    cr = ConceptRisk(toy_taxonomies)
    cr.seed("location", "loc-a", 0.8, weight=400)
    cr.record("location", "loc-a", sit(), 0.0)
    assert cr.value_for("location", "loc-a") == pytest.approx(320.0 / 401.0, rel=1e-12)


def test_critical_dimension_means_and_normalization(toy_taxonomies):
    base = CaseBase()
    base.add(Case(situation=sit(loc="a1x"), prefs=UserPreferences(), is_critical=True))
    base.add(Case(situation=sit(loc="a1y"), prefs=UserPreferences(), is_critical=True))
    cr = ConceptRisk(toy_taxonomies)
    cr.seed("location", "loc-a1x", 0.9)
    cr.seed("location", "loc-a1y", 0.5)
    cr.seed("time", "tim-a1x", 0.2)
    means = critical_dimension_means(cr, base)
    assert means["location"] == pytest.approx(0.7, rel=1e-12)
    assert means["time"] == pytest.approx(0.2, rel=1e-12)
    assert means["social"] == 0.0
    weights = normalize_dimension_weights(means)
    assert sum(weights.values()) == pytest.approx(1.0, abs=1e-12)
    assert weights["location"] == pytest.approx(0.7 / 0.9, rel=1e-12)


def test_critical_means_require_critical_cases(toy_taxonomies):
    base = CaseBase()
    base.add(Case(situation=sit(), prefs=UserPreferences()))
    with pytest.raises(EmptyCriticalSetError):
        critical_dimension_means(ConceptRisk(toy_taxonomies), base)


def test_normalize_zero_means_gives_equal_thirds():
    weights = normalize_dimension_weights({"location": 0.0, "time": 0.0, "social": 0.0})
    assert weights == {d: pytest.approx(1.0 / 3.0) for d in ("location", "time", "social")}


def test_risk_concepts_weighted_mean(toy_taxonomies):
    cr = ConceptRisk(toy_taxonomies)
    s = sit()
    cr.seed("location", s.location, 1.0)
    cr.seed("time", s.time, 0.0)
    cr.seed("social", s.social, 0.5)
    weights = {"location": 0.5, "time": 0.3, "social": 0.2}
    assert risk_concepts(cr, weights, s) == pytest.approx(0.6, rel=1e-12)


# -- centroid and similarity estimator --------------------------------------

def test_critical_centroid_matches_brute_force(toy_taxonomies):
    rng = np.random.default_rng(17)
    names = {
        "location": toy_taxonomies.location.nodes,
        "time": toy_taxonomies.time.nodes,
        "social": toy_taxonomies.social.nodes,
    }
    for _ in range(10):
        base = CaseBase()
        seen = set()
        while len(base) < 12:
            s = Situation(*(names[d][rng.integers(len(names[d]))]
                            for d in ("location", "time", "social")))
            if s in seen:
                continue
            seen.add(s)
            base.add(Case(situation=s, prefs=UserPreferences(),
                          is_critical=bool(rng.random() < 0.5) or len(base) == 0))
        got = critical_centroid(toy_taxonomies, base)
        critical = base.critical_cases()
        best_score, best = -1.0, None
        for cand in critical:
            total = 0.0
            for other in critical:
                total += situation_sim(toy_taxonomies, cand.situation, other.situation)
            score = total / len(critical)
            if score > best_score:
                best_score, best = score, cand.situation
        assert got == best


def test_critical_centroid_tie_first(toy_taxonomies):
    # the two criticals score identically by symmetry; the first one wins
    base = CaseBase()
    base.add(Case(situation=sit(loc="a1x"), prefs=UserPreferences(), is_critical=True))
    base.add(Case(situation=sit(loc="a1y"), prefs=UserPreferences(), is_critical=True))
    assert critical_centroid(toy_taxonomies, base) == sit(loc="a1x")


def test_critical_centroid_requires_criticals(toy_taxonomies):
    base = CaseBase()
    base.add(Case(situation=sit(), prefs=UserPreferences()))
    with pytest.raises(EmptyCriticalSetError):
        critical_centroid(toy_taxonomies, base)


def test_risk_similarity_oracle_values():
    assert risk_similarity(0.5, 0.7) == pytest.approx(0.8, rel=1e-12)
    assert risk_similarity(0.0, 0.7) == pytest.approx(0.3, rel=1e-12)
    assert risk_similarity(0.7, 0.7) == 1.0
    assert risk_similarity(0.95, 0.7) == 1.0
    with pytest.raises(ConfigError):
        risk_similarity(0.5, 1.3)


@given(st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_risk_similarity_bounded(sim, threshold):
    assert 0.0 <= risk_similarity(sim, threshold) <= 1.0


# -- aggregation ------------------------------------------------------------

def test_aggregate_risk_oracle():
    third = 1.0 / 3.0
    got = aggregate_risk(0.3, 0.6, 0.9, (third, third, third))
    assert got == pytest.approx(0.6, rel=1e-12)


def test_aggregate_risk_weight_validation():
    with pytest.raises(ConfigError):
        aggregate_risk(0.5, 0.5, 0.5, (0.6, 0.6, 0.6))
    with pytest.raises(ConfigError):
        aggregate_risk(0.5, 0.5, 0.5, (1.5, -0.5, 0.0))


@given(
    st.floats(0.0, 1.0), st.floats(0.0, 1.0), st.floats(0.0, 1.0),
    st.floats(0.0, 1.0), st.floats(0.0, 1.0),
)
def test_aggregate_risk_convex(r1, r2, r3, u, v):
    w1 = u * v
    w2 = u * (1.0 - v)
    w3 = 1.0 - w1 - w2
    got = aggregate_risk(r1, r2, r3, (w1, w2, w3))
    assert min(r1, r2, r3) - 1e-9 <= got <= max(r1, r2, r3) + 1e-9


# -- propagation ------------------------------------------------------------

def _single_case_base():
    base = CaseBase()
    base.add(Case(situation=sit(), prefs=UserPreferences(), risk_history=[0.4]))
    return base


def test_propagate_updates_running_mean(toy_taxonomies):
    base = _single_case_base()
    cr = ConceptRisk(toy_taxonomies)
    got = propagate_risk(base, cr, sit(), 0.8)
    assert got == pytest.approx(0.6, rel=1e-12)
    assert base.case_at(0).risk_history == [0.4, 0.8]
    for dim, concept in (("location", "loc-a1x"), ("time", "tim-a1x"),
                         ("social", "soc-a1x")):
        assert cr.history_for(dim, concept) == [0.8]


def test_propagate_rejects_bad_inputs(toy_taxonomies):
    base = _single_case_base()
    cr = ConceptRisk(toy_taxonomies)
    with pytest.raises(KeyError):
        propagate_risk(base, cr, sit(loc="b1"), 0.5)
    with pytest.raises(ValidationError):
        propagate_risk(base, cr, sit(), 1.2)


def test_propagate_running_mean_matches_plain_loop(toy_taxonomies):
    base = CaseBase()
    base.add(Case(situation=sit(), prefs=UserPreferences()))
    cr = ConceptRisk(toy_taxonomies)
    rng = np.random.default_rng(8)
    history = []
    for _ in range(40):
        value = float(rng.random())
        history.append(value)
        got = propagate_risk(base, cr, sit(), value)
        total = 0.0
        for v in history:
            total += v
        assert got == total / len(history)


# -- orchestration ----------------------------------------------------------

def test_model_without_criticals_leans_on_variance(toy_taxonomies):
    base = CaseBase()
    base.add(Case(situation=sit(), prefs=UserPreferences()))
    model = RiskModel(RiskConfig(), toy_taxonomies, base)
    breakdown = model.evaluate(sit())
    assert breakdown.similarity == 0.0
    assert breakdown.concepts == 0.0
    assert breakdown.effective_weights == (0.0, 0.0, 1.0)
    assert breakdown.total == breakdown.variance


def test_model_threshold_fallback_is_zero(toy_taxonomies):
    base = CaseBase()
    base.add(Case(situation=sit(), prefs=UserPreferences()))
    model = RiskModel(RiskConfig(), toy_taxonomies, base)
    assert model.threshold() == 0.0


def test_model_components_stay_bounded(toy_taxonomies):
    rng = np.random.default_rng(3)
    names = {
        "location": toy_taxonomies.location.nodes,
        "time": toy_taxonomies.time.nodes,
        "social": toy_taxonomies.social.nodes,
    }
    base = CaseBase()
    seen = set()
    while len(base) < 10:
        s = Situation(*(names[d][rng.integers(len(names[d]))]
                        for d in ("location", "time", "social")))
        if s in seen:
            continue
        seen.add(s)
        base.add(Case(situation=s, prefs=UserPreferences(),
                      is_critical=len(base) % 3 == 0))
    model = RiskModel(RiskConfig(sim_threshold=0.9), toy_taxonomies, base)
    stats = model.stats
    for case in base:
        stats.record(case.situation, int(rng.integers(0, 5)), 10)
    for case in base:
        breakdown = model.evaluate(case.situation)
        assert 0.0 <= breakdown.total <= 1.0
    for lo, hi in model.observed_bounds.values():
        assert 0.0 <= lo <= hi <= 1.0


def test_model_observe_propagates(toy_taxonomies):
    base = _single_case_base()
    model = RiskModel(RiskConfig(), toy_taxonomies, base)
    got = model.observe(sit(), 0.8)
    assert got == pytest.approx(0.6, rel=1e-12)
    assert base.case_at(0).risk_history == [0.4, 0.8]


# -- seed files -------------------------------------------------------------

def test_risk_seed_roundtrip(tmp_path, toy_taxonomies):
    path = tmp_path / "seed.json"
    config = RiskConfig(sim_threshold=0.9, alpha=1.5, weights=(0.2, 0.5, 0.3))
    criticals = [sit(loc="a1x"), sit(loc="b1")]
    seeds = [("location", "loc-a1x", 0.9), ("time", "tim-a", 0.4)]
    save_risk_seed(path, criticals, seeds, config, prior_weight=25)
    loaded_crit, loaded_seeds, loaded_cfg, weight = load_risk_seed(path)
    assert loaded_crit == criticals
    assert loaded_seeds == seeds
    assert loaded_cfg == config
    assert weight == 25


def test_risk_seed_missing_field(tmp_path):
    path = tmp_path / "seed.json"
    path.write_text('{"critical_situations": []}')
    with pytest.raises(ConfigError):
        load_risk_seed(path)


def test_risk_seed_bad_lambda(tmp_path):
    import json

    path = tmp_path / "seed.json"
    save_risk_seed(path, [], [], RiskConfig())
    data = json.loads(path.read_text())
    data["lambda"] = [0.5, 0.5]
    path.write_text(json.dumps(data))
    with pytest.raises(ConfigError):
        load_risk_seed(path)


def test_seeded_concept_risk_applies_weights(toy_taxonomies):
    cr = seeded_concept_risk(toy_taxonomies, [("location", "loc-a", 0.6)], prior_weight=10)
    assert cr.value_for("location", "loc-a") == pytest.approx(0.6, rel=1e-12)
    cr.record("location", "loc-a", sit(), 0.0)
    assert cr.value_for("location", "loc-a") == pytest.approx(6.0 / 11.0, rel=1e-12)
