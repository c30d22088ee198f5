"""Situation risk estimation.

Risk is a number in [0, 1] meaning "how costly would an irrelevant
recommendation be right now". It blends three estimators:

- variance-based: situations whose click-through rate falls below a
  dispersion-adjusted threshold over all tracked situations are risky;
- concept-based: per-concept risk values, averaged over the concepts of the
  situation with weights learned from the critical situations;
- similarity-based: proximity to the centroid of the critical situations.

Each estimator is exposed as a plain function; ``RiskModel`` wires them
together with caching and the fallback rules for degenerate inputs, and owns
risk propagation back into the case base and the concept table.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .ontology import DIMENSIONS, TaxonomySet
from .situations import Case, CaseBase, Situation


class InsufficientDataError(ValueError):
    """Too few tracked situations to compute a dispersion threshold."""


class EmptyCriticalSetError(ValueError):
    """An operation requiring critical situations found none."""


class ValidationError(ValueError):
    """A propagated risk value was outside [0, 1]."""


@dataclass(frozen=True)
class RiskConfig:
    """Estimator parameters: centroid similarity threshold, CTR dispersion
    penalty, and the aggregation weights (similarity, concepts, variance)."""

    sim_threshold: float = 0.7
    alpha: float = 2.0
    weights: tuple[float, float, float] = (1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0)

    def __post_init__(self):
        if not 0.0 <= self.sim_threshold <= 1.0:
            raise ConfigError(f"sim_threshold must lie in [0, 1], got {self.sim_threshold}")
        if self.alpha < 0.0:
            raise ConfigError(f"alpha must be non-negative, got {self.alpha}")
        if len(self.weights) != 3:
            raise ConfigError("weights must have exactly three components")
        if any(w < 0.0 for w in self.weights):
            raise ConfigError(f"weights must be non-negative, got {self.weights}")
        if abs(sum(self.weights) - 1.0) > 1e-9:
            raise ConfigError(f"weights must sum to 1, got {self.weights}")


# ---------------------------------------------------------------------------
# per-situation interaction statistics


class SituationStats:
    """Click and recommendation-slot counts per situation."""

    def __init__(self):
        self._index: dict[Situation, int] = {}
        self._clicks = np.zeros(16)
        self._recs = np.zeros(16)

    @classmethod
    def from_case_base(cls, case_base: CaseBase) -> "SituationStats":
        """Seed counts from the stored preference histories."""
        stats = cls()
        for case in case_base:
            clicks = case.prefs.total_clicks()
            recs = case.prefs.total_recoms()
            if recs or clicks:
                stats.record(case.situation, clicks, recs)
            else:
                stats.track(case.situation)
        return stats

    def _slot(self, situation: Situation) -> int:
        i = self._index.get(situation)
        if i is None:
            i = len(self._index)
            if i >= self._clicks.shape[0]:
                grown = np.zeros(2 * self._clicks.shape[0])
                grown[: self._clicks.shape[0]] = self._clicks
                self._clicks = grown
                grown = np.zeros(2 * self._recs.shape[0])
                grown[: self._recs.shape[0]] = self._recs
                self._recs = grown
            self._index[situation] = i
        return i

    def track(self, situation: Situation) -> None:
        """Register a situation with zero counts."""
        self._slot(situation)

    def record(self, situation: Situation, clicks: int, recs: int) -> None:
        if clicks < 0 or recs < 0:
            raise ValueError("negative count")
        i = self._slot(situation)
        self._clicks[i] += clicks
        self._recs[i] += recs

    def __len__(self) -> int:
        return len(self._index)

    def __contains__(self, situation: Situation) -> bool:
        return situation in self._index

    def clicks_of(self, situation: Situation) -> float:
        i = self._index.get(situation)
        return 0.0 if i is None else float(self._clicks[i])

    def recs_of(self, situation: Situation) -> float:
        i = self._index.get(situation)
        return 0.0 if i is None else float(self._recs[i])

    def tracked_ctrs(self) -> np.ndarray:
        """CTR of every situation with at least one recommendation slot."""
        n = len(self._index)
        clicks = self._clicks[:n]
        recs = self._recs[:n]
        mask = recs > 0.0
        return clicks[mask] / recs[mask]


def situation_ctr(stats: SituationStats, situation: Situation) -> float:
    """Clicks per recommendation slot for one situation; 0 while untracked."""
    recs = stats.recs_of(situation)
    if recs == 0.0:
        return 0.0
    return stats.clicks_of(situation) / recs


def var_threshold(stats: SituationStats, alpha: float) -> float:
    """Dispersion-adjusted CTR floor: mean minus alpha standard deviations
    over all tracked situations, clamped into [0, 1)."""
    ctrs = stats.tracked_ctrs()
    if ctrs.shape[0] < 2:
        raise InsufficientDataError(
            f"need at least 2 tracked situations, have {ctrs.shape[0]}"
        )
    mean = float(np.mean(ctrs))
    std = float(np.std(ctrs))
    raw = mean - alpha * std
    if raw < 0.0:
        return 0.0
    return min(raw, 1.0 - 1e-12)


def risk_variance(ctr: float, threshold: float) -> float:
    """Variance-based risk: 1 when CTR is at or below the threshold, decaying
    linearly to 0 as CTR approaches 1."""
    if threshold >= 1.0:
        raise ConfigError(f"threshold must be below 1, got {threshold}")
    if ctr > threshold:
        return 1.0 - (ctr - threshold) / (1.0 - threshold)
    return 1.0


# ---------------------------------------------------------------------------
# concept-level risk


@dataclass
class _ConceptEntry:
    total: float = 0.0
    count: int = 0
    situations: list[Situation] = field(default_factory=list)
    values: list[float] = field(default_factory=list)


class ConceptRisk:
    """Risk values attached to taxonomy concepts, one table per dimension.

    A concept's value is the running mean of everything recorded for it
    (an optional seed counts as the first observation). Concepts without any
    value inherit the nearest ancestor's value, defaulting to 0 at the root.
    """

    def __init__(self, taxonomies: TaxonomySet):
        self.taxonomies = taxonomies
        self._tables: dict[str, dict[str, _ConceptEntry]] = {d: {} for d in DIMENSIONS}

    def seed(self, dimension: str, concept: str, value: float,
             weight: int = 1) -> None:
        """Fold a prior value into the concept's mean with the strength of
        ``weight`` observations."""
        if not 0.0 <= value <= 1.0:
            raise ValidationError(f"concept risk seed outside [0, 1]: {value}")
        if weight < 1:
            raise ConfigError(f"seed weight must be >= 1, got {weight}")
        self.taxonomies.by_dimension(dimension).require(concept)
        entry = self._tables[dimension].setdefault(concept, _ConceptEntry())
        entry.total += value * weight
        entry.count += weight
        entry.values.extend([value] * weight)

    def record(self, dimension: str, concept: str, situation: Situation, value: float) -> None:
        if not 0.0 <= value <= 1.0:
            raise ValidationError(f"propagated risk outside [0, 1]: {value}")
        self.taxonomies.by_dimension(dimension).require(concept)
        entry = self._tables[dimension].setdefault(concept, _ConceptEntry())
        entry.total += value
        entry.count += 1
        entry.situations.append(situation)
        entry.values.append(value)

    def known(self, dimension: str, concept: str) -> bool:
        return concept in self._tables[dimension]

    def history_for(self, dimension: str, concept: str) -> list[float]:
        """Every value folded into the concept's mean, in recording order."""
        entry = self._tables[dimension].get(concept)
        return list(entry.values) if entry else []

    def provenance_for(self, dimension: str, concept: str) -> list[Situation]:
        entry = self._tables[dimension].get(concept)
        return list(entry.situations) if entry else []

    def value_for(self, dimension: str, concept: str) -> float:
        """Mean recorded value; missing concepts inherit the nearest ancestor,
        and 0 stands in when no ancestor has a value either."""
        tax = self.taxonomies.by_dimension(dimension)
        tax.require(concept)
        table = self._tables[dimension]
        cur: str | None = concept
        while cur is not None:
            entry = table.get(cur)
            if entry is not None and entry.count > 0:
                return entry.total / entry.count
            cur = tax.parent_of(cur)
        return 0.0


def critical_dimension_means(concept_risk: ConceptRisk, case_base: CaseBase) -> dict[str, float]:
    """Raw per-dimension mean concept risk over the critical situations."""
    critical = case_base.critical_cases()
    if not critical:
        raise EmptyCriticalSetError("case base has no critical situations")
    means = {}
    for dim in DIMENSIONS:
        total = 0.0
        for case in critical:
            total += concept_risk.value_for(dim, getattr(case.situation, dim))
        means[dim] = total / len(critical)
    return means


def normalize_dimension_weights(raw: dict[str, float]) -> dict[str, float]:
    """Scale the raw means to sum to 1; equal thirds when all are zero."""
    total = sum(raw[d] for d in DIMENSIONS)
    if total <= 0.0:
        return {d: 1.0 / 3.0 for d in DIMENSIONS}
    return {d: raw[d] / total for d in DIMENSIONS}


def risk_concepts(concept_risk: ConceptRisk, weights: dict[str, float],
                  situation: Situation) -> float:
    """Concept-based risk: weighted mean of the situation's per-concept values."""
    total = 0.0
    for dim in DIMENSIONS:
        total += weights[dim] * concept_risk.value_for(dim, getattr(situation, dim))
    return total


# ---------------------------------------------------------------------------
# similarity to the critical centroid


def critical_centroid(taxonomies: TaxonomySet, case_base: CaseBase) -> Situation:
    """The critical situation with the highest mean similarity to all critical
    situations; ties go to insertion order."""
    critical = case_base.critical_cases()
    if not critical:
        raise EmptyCriticalSetError("case base has no critical situations")
    tax_loc, tax_time, tax_soc = (
        taxonomies.location,
        taxonomies.time,
        taxonomies.social,
    )
    loc = np.array([tax_loc.index_of(c.situation.location) for c in critical], dtype=np.int64)
    tim = np.array([tax_time.index_of(c.situation.time) for c in critical], dtype=np.int64)
    soc = np.array([tax_soc.index_of(c.situation.social) for c in critical], dtype=np.int64)
    mat_loc = tax_loc.sim_matrix()
    mat_time = tax_time.sim_matrix()
    mat_soc = tax_soc.sim_matrix()
    best_score = -1.0
    best: Situation | None = None
    for f in range(len(critical)):
        sims = (mat_loc[loc[f]][loc] + mat_time[tim[f]][tim] + mat_soc[soc[f]][soc]) / 3.0
        # sequential accumulation keeps the mean reproducible by a plain loop
        total = 0.0
        for value in sims:
            total += float(value)
        score = total / len(critical)
        if score > best_score:
            best_score = score
            best = critical[f].situation
    assert best is not None
    return best


def risk_similarity(sim_to_centroid: float, threshold: float) -> float:
    """Similarity-based risk: 1 at or above the threshold, shifted similarity below."""
    if not 0.0 <= threshold <= 1.0:
        raise ConfigError(f"threshold must lie in [0, 1], got {threshold}")
    if sim_to_centroid < threshold:
        return 1.0 - threshold + sim_to_centroid
    return 1.0


# ---------------------------------------------------------------------------
# aggregation and propagation


def aggregate_risk(r_similarity: float, r_concepts: float, r_variance: float,
                   weights: tuple[float, float, float]) -> float:
    """Convex combination of the three estimators."""
    if abs(sum(weights) - 1.0) > 1e-9:
        raise ConfigError(f"aggregation weights must sum to 1, got {weights}")
    if any(w < 0.0 for w in weights):
        raise ConfigError(f"aggregation weights must be non-negative, got {weights}")
    return (
        weights[0] * r_similarity + weights[1] * r_concepts + weights[2] * r_variance
    )


def propagate_risk(case_base: CaseBase, concept_risk: ConceptRisk,
                   situation: Situation, value: float) -> float:
    """Fold an observed risk value into the situation's case history and into
    each of its concepts. Returns the case's updated running-mean risk."""
    if not 0.0 <= value <= 1.0:
        raise ValidationError(f"risk value outside [0, 1]: {value}")
    index = case_base.index_of(situation)
    if index is None:
        raise KeyError(f"situation {situation} not present in the case base")
    case = case_base.case_at(index)
    case.risk_history.append(value)
    for dim in DIMENSIONS:
        concept_risk.record(dim, getattr(situation, dim), situation, value)
    stored = case.stored_risk
    assert stored is not None
    return stored


# ---------------------------------------------------------------------------
# orchestration


@dataclass(frozen=True)
class RiskBreakdown:
    similarity: float
    concepts: float
    variance: float
    total: float
    effective_weights: tuple[float, float, float]


class RiskModel:
    """Wires the three estimators together over one case base.

    Degenerate inputs degrade gracefully: with no critical situations the
    similarity and concept estimators are dropped and their weight moves to
    the variance term; with fewer than two tracked situations the dispersion
    threshold falls back to 0.
    """

    def __init__(self, config: RiskConfig, taxonomies: TaxonomySet,
                 case_base: CaseBase, concept_risk: ConceptRisk | None = None,
                 stats: SituationStats | None = None):
        self.config = config
        self.taxonomies = taxonomies
        self.case_base = case_base
        self.concept_risk = concept_risk if concept_risk is not None else ConceptRisk(taxonomies)
        self.stats = stats if stats is not None else SituationStats.from_case_base(case_base)
        self._centroid: Situation | None = None
        self._have_critical = len(case_base.critical_cases()) > 0
        self.observed_bounds: dict[str, tuple[float, float]] = {}

    def _note(self, name: str, value: float) -> None:
        lo, hi = self.observed_bounds.get(name, (math.inf, -math.inf))
        self.observed_bounds[name] = (min(lo, value), max(hi, value))

    def centroid(self) -> Situation:
        if self._centroid is None:
            self._centroid = critical_centroid(self.taxonomies, self.case_base)
        return self._centroid

    def threshold(self) -> float:
        try:
            return var_threshold(self.stats, self.config.alpha)
        except InsufficientDataError:
            return 0.0

    def evaluate(self, situation: Situation) -> RiskBreakdown:
        from .situations import situation_sim

        r_var = risk_variance(situation_ctr(self.stats, situation), self.threshold())
        if self._have_critical:
            sim = situation_sim(self.taxonomies, situation, self.centroid())
            r_sim = risk_similarity(sim, self.config.sim_threshold)
            raw = critical_dimension_means(self.concept_risk, self.case_base)
            r_con = risk_concepts(self.concept_risk, normalize_dimension_weights(raw), situation)
            weights = self.config.weights
        else:
            r_sim = 0.0
            r_con = 0.0
            weights = (0.0, 0.0, 1.0)
        total = aggregate_risk(r_sim, r_con, r_var, weights)
        self._note("similarity", r_sim)
        self._note("concepts", r_con)
        self._note("variance", r_var)
        self._note("total", total)
        return RiskBreakdown(r_sim, r_con, r_var, total, weights)

    def observe(self, situation: Situation, value: float) -> float:
        """Propagate an evaluated risk value after the user's feedback."""
        return propagate_risk(self.case_base, self.concept_risk, situation, value)


# ---------------------------------------------------------------------------
# risk seed files


def save_risk_seed(path: str | Path, critical_situations: list[Situation],
                   concept_seeds: list[tuple[str, str, float]],
                   config: RiskConfig, prior_weight: int = 1) -> None:
    payload = {
        "critical_situations": [
            {"location": s.location, "time": s.time, "social": s.social}
            for s in critical_situations
        ],
        "concept_risks": [
            {"dimension": d, "concept": c, "cv": v} for d, c, v in concept_seeds
        ],
        "prior_weight": prior_weight,
        "lambda": list(config.weights),
        "B": config.sim_threshold,
        "alpha": config.alpha,
    }
    Path(path).write_text(json.dumps(payload, indent=1))


def load_risk_seed(path: str | Path) -> tuple[
    list[Situation], list[tuple[str, str, float]], RiskConfig, int
]:
    data = json.loads(Path(path).read_text())
    for key in ("critical_situations", "concept_risks", "lambda", "B", "alpha"):
        if key not in data:
            raise ConfigError(f"risk seed file missing field {key!r}")
    weights = data["lambda"]
    if len(weights) != 3:
        raise ConfigError("risk seed field 'lambda' must have three components")
    config = RiskConfig(
        sim_threshold=data["B"], alpha=data["alpha"], weights=tuple(weights)
    )
    critical = [Situation(**entry) for entry in data["critical_situations"]]
    seeds = [(e["dimension"], e["concept"], e["cv"]) for e in data["concept_risks"]]
    prior_weight = int(data.get("prior_weight", 1))
    return critical, seeds, config, prior_weight


def seeded_concept_risk(taxonomies: TaxonomySet,
                        seeds: list[tuple[str, str, float]],
                        prior_weight: int = 1) -> ConceptRisk:
    table = ConceptRisk(taxonomies)
    for dimension, concept, value in seeds:
        table.seed(dimension, concept, value, prior_weight)
    return table
