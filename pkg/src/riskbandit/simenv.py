"""Synthetic recommendation environment.

Builds a corpus that stands in for a usage diary: per-dimension concept
taxonomies, one case per situation with per-document interaction history, a
ground-truth click model for simulating feedback, and risk annotations
(stratum labels, critical flags, per-concept risk seeds).

The click model encodes two regimes. In low-risk strata the recorded history
is stale: the documents it rates highest have decayed while a share of
low-rated "sleepers" now carry most of the clicks, and the untried documents
are decent on average, so random exploration pays off. In high-risk strata
the history is honest but the established documents are worn out; the value
sits in a set of lightly displayed documents whose short history understates
them, and optimistic selection already cycles through that set, so extra
random exploration only dilutes it with the worn-out rest. Mean click
probability decreases strictly from the safest stratum to the riskiest, and
situations are sampled from per-stratum regions of the taxonomies so that
risk aligns with semantic neighborhoods.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, asdict, field, replace
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .ontology import DIMENSIONS, Taxonomy, TaxonomySet
from .risk import RiskConfig
from .situations import Case, CaseBase, DocPrefs, Situation, UserPreferences

N_STRATA = 5
# midpoint risk of each stratum's nominal interval (1-20], ..., (80-100]
STRATUM_MIDPOINTS = (0.105, 0.305, 0.505, 0.705, 0.905)


class GenerationError(ValueError):
    """The corpus settings cannot be realized."""


@dataclass(frozen=True)
class StratumShape:
    """Click-probability structure of one risk stratum, before rescaling.

    Documents with recorded history ("established") split into two classes:
    a ``sleeper_fraction`` share whose true click probability is
    ``established_mean * sleeper_boost`` and the rest at
    ``established_mean * decayed_factor``. With ``history_inverted`` the
    recorded history reflects the opposite class (tastes drifted since the
    history was written), so ranking by history is misleading; otherwise
    history tracks the truth. ``history_inflation`` scales all historical
    rates up, modeling interest that has cooled since.

    Documents outside the recorded entries click at ``novel_mean``. With
    ``novel_seed_max`` > 0 these carry a short display history of their own
    (``novel_seed_min`` to ``novel_seed_max`` displays) whose recorded rate
    understates the truth by ``novel_hist_factor``; the user has glanced at
    them without warming up yet. With the default 0 they are untried.

    ``concept_risk`` seeds the per-concept risk prior for situations in the
    stratum; None falls back to the stratum's nominal risk midpoint.
    """

    established_mean: float
    novel_mean: float
    sleeper_fraction: float = 0.0
    sleeper_boost: float = 1.0
    decayed_factor: float = 1.0
    history_inverted: bool = False
    history_inflation: float = 1.0
    novel_seed_min: int = 0
    novel_seed_max: int = 0
    novel_hist_factor: float = 0.25
    concept_risk: float | None = None

    def __post_init__(self):
        if not 0 <= self.novel_seed_min <= self.novel_seed_max:
            raise ConfigError(
                "need 0 <= novel_seed_min <= novel_seed_max, got "
                f"({self.novel_seed_min}, {self.novel_seed_max})"
            )
        if not 0.0 < self.novel_hist_factor <= 1.0:
            raise ConfigError(
                f"novel_hist_factor must lie in (0, 1], got {self.novel_hist_factor}"
            )
        if self.concept_risk is not None and not 0.0 <= self.concept_risk <= 1.0:
            raise ConfigError(
                f"concept_risk must lie in [0, 1], got {self.concept_risk}"
            )

    def class_mix(self) -> float:
        """Expected true-rate multiplier over established documents."""
        return (
            self.sleeper_fraction * self.sleeper_boost
            + (1.0 - self.sleeper_fraction) * self.decayed_factor
        )


DEFAULT_SHAPES: tuple[StratumShape, ...] = (
    StratumShape(0.388, 0.272, 1.0 / 3.0, 2.1, 0.30, True, 1.10,
                 concept_risk=0.02),
    StratumShape(0.283, 0.216, 1.0 / 3.0, 2.1, 0.30, True, 1.10,
                 concept_risk=0.02),
    StratumShape(0.201, 0.152, 1.0 / 3.0, 1.95, 0.375, True, 1.06,
                 concept_risk=0.02),
    StratumShape(0.070, 0.175, 0.0, 1.0, 1.0, False, 1.00,
                 novel_seed_min=8, novel_seed_max=12, novel_hist_factor=0.12,
                 concept_risk=0.95),
    StratumShape(0.004, 0.180, 0.0, 1.0, 1.0, False, 1.00,
                 novel_seed_min=8, novel_seed_max=12, novel_hist_factor=0.12,
                 concept_risk=1.00),
)


@dataclass(frozen=True)
class CorpusSpec:
    """Knobs of the synthetic corpus generator."""

    situations: int = 1000
    docs_per_case: int = 25
    entries_per_situation: float = 15.47
    stratum_proportions: tuple[float, ...] = (0.20, 0.17, 0.20, 0.25, 0.18)
    stratum_click_means: tuple[float, ...] = (0.32, 0.24, 0.17, 0.11, 0.07)
    jitter: float = 0.2
    region_affinity: float = 0.97
    seed_recoms_min: int = 10
    seed_recoms_max: int = 16
    concept_prior_weight: int = 400
    shapes: tuple[StratumShape, ...] = DEFAULT_SHAPES

    def __post_init__(self):
        if self.situations < 1:
            raise ConfigError(f"situations must be >= 1, got {self.situations}")
        if self.docs_per_case < 21:
            raise ConfigError(
                f"docs_per_case must be at least 21, got {self.docs_per_case}"
            )
        if not 0.0 < self.entries_per_situation <= self.docs_per_case:
            raise ConfigError(
                f"entries_per_situation must lie in (0, docs_per_case], "
                f"got {self.entries_per_situation}"
            )
        if len(self.stratum_proportions) != N_STRATA:
            raise ConfigError(f"expected {N_STRATA} stratum proportions")
        if any(p < 0 for p in self.stratum_proportions):
            raise ConfigError("stratum proportions must be non-negative")
        if abs(sum(self.stratum_proportions) - 1.0) > 1e-9:
            raise ConfigError(
                f"stratum proportions must sum to 1, got {self.stratum_proportions}"
            )
        if len(self.stratum_click_means) != N_STRATA:
            raise ConfigError(f"expected {N_STRATA} stratum click means")
        if any(not 0.0 < m < 1.0 for m in self.stratum_click_means):
            raise ConfigError("stratum click means must lie in (0, 1)")
        if any(
            a <= b
            for a, b in zip(self.stratum_click_means, self.stratum_click_means[1:])
        ):
            raise ConfigError("stratum click means must strictly decrease")
        if not 0.0 <= self.jitter < 1.0:
            raise ConfigError(f"jitter must lie in [0, 1), got {self.jitter}")
        if not 0.0 <= self.region_affinity <= 1.0:
            raise ConfigError(f"region_affinity must lie in [0, 1], got {self.region_affinity}")
        if not 1 <= self.seed_recoms_min <= self.seed_recoms_max:
            raise ConfigError("need 1 <= seed_recoms_min <= seed_recoms_max")
        if self.concept_prior_weight < 1:
            raise ConfigError(
                f"concept_prior_weight must be >= 1, got {self.concept_prior_weight}"
            )
        if len(self.shapes) != N_STRATA:
            raise ConfigError(f"expected {N_STRATA} stratum shapes")


class GroundTruth:
    """True click probabilities and stratum labels behind a generated corpus."""

    def __init__(self, strata: np.ndarray, situations: list[Situation],
                 doc_ids: list[list[str]], click_probs: list[np.ndarray]):
        self.strata = strata
        self.situations = situations
        self.doc_ids = doc_ids
        self.click_probs = click_probs
        self._sit_index = {s: i for i, s in enumerate(situations)}
        self._doc_index = [
            {doc: j for j, doc in enumerate(docs)} for docs in doc_ids
        ]

    def __len__(self) -> int:
        return len(self.situations)

    def case_index(self, situation: Situation) -> int:
        if situation not in self._sit_index:
            raise KeyError(f"situation {situation} has no ground truth")
        return self._sit_index[situation]

    def prob(self, situation: Situation, doc: str) -> float:
        i = self.case_index(situation)
        j = self._doc_index[i].get(doc)
        if j is None:
            raise KeyError(f"document {doc!r} unknown for situation {situation}")
        return float(self.click_probs[i][j])

    def stratum_of(self, situation: Situation) -> int:
        return int(self.strata[self.case_index(situation)])

    def stratum_means(self) -> list[float]:
        """Realized mean click probability per stratum."""
        means = []
        for s in range(1, N_STRATA + 1):
            chunks = [
                self.click_probs[i]
                for i in range(len(self.situations))
                if self.strata[i] == s
            ]
            means.append(float(np.concatenate(chunks).mean()) if chunks else float("nan"))
        return means

    def to_obj(self) -> dict:
        return {
            "version": 1,
            "cases": [
                {
                    "stratum": int(self.strata[i]),
                    "docs": list(self.doc_ids[i]),
                    "click_prob": [float(p) for p in self.click_probs[i]],
                }
                for i in range(len(self.situations))
            ],
        }

    @classmethod
    def from_obj(cls, data: dict, situations: list[Situation]) -> "GroundTruth":
        cases = data["cases"]
        if len(cases) != len(situations):
            raise ConfigError(
                f"ground truth covers {len(cases)} cases, case base has {len(situations)}"
            )
        strata = np.array([c["stratum"] for c in cases], dtype=np.int64)
        doc_ids = [list(c["docs"]) for c in cases]
        probs = [np.array(c["click_prob"], dtype=np.float64) for c in cases]
        return cls(strata, situations, doc_ids, probs)


@dataclass
class Corpus:
    """Everything a run needs: semantics, history, ground truth, risk priors."""

    taxonomies: TaxonomySet
    case_base: CaseBase
    ground_truth: GroundTruth
    concept_seeds: list[tuple[str, str, float]]
    risk_config: RiskConfig
    concept_prior_weight: int = 1
    meta: dict = field(default_factory=dict)

    def save(self, out_dir: str | Path) -> None:
        from .risk import save_risk_seed

        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        self.taxonomies.save_dir(out)
        self.case_base.save(out / "case_base.json")
        (out / "ground_truth.json").write_text(json.dumps(self.ground_truth.to_obj(), indent=1))
        critical = [c.situation for c in self.case_base.critical_cases()]
        save_risk_seed(
            out / "risk_seed.json", critical, self.concept_seeds,
            self.risk_config, self.concept_prior_weight,
        )
        (out / "corpus_meta.json").write_text(json.dumps(self.meta, indent=1))

    @classmethod
    def load(cls, in_dir: str | Path) -> "Corpus":
        from .risk import load_risk_seed

        base = Path(in_dir)
        for name in ("case_base.json", "ground_truth.json", "risk_seed.json"):
            if not (base / name).exists():
                raise FileNotFoundError(f"corpus directory {base} is missing {name}")
        taxonomies = TaxonomySet.load_dir(base)
        case_base = CaseBase.load(base / "case_base.json")
        situations = [c.situation for c in case_base]
        gt = GroundTruth.from_obj(
            json.loads((base / "ground_truth.json").read_text()), situations
        )
        critical, seeds, risk_config, prior_weight = load_risk_seed(base / "risk_seed.json")
        meta_path = base / "corpus_meta.json"
        meta = json.loads(meta_path.read_text()) if meta_path.exists() else {}
        flagged = {c.situation for c in case_base.critical_cases()}
        if flagged != set(critical):
            raise ConfigError("risk seed critical situations disagree with case flags")
        return cls(taxonomies, case_base, gt, seeds, risk_config, prior_weight, meta)


# ---------------------------------------------------------------------------
# generation


def _apportion(n: int, proportions: tuple[float, ...]) -> list[int]:
    """Largest-remainder rounding of n * proportions to integers summing to n."""
    raw = [n * p for p in proportions]
    counts = [int(x) for x in raw]
    short = n - sum(counts)
    remainders = sorted(
        range(len(raw)), key=lambda i: (raw[i] - counts[i], -i), reverse=True
    )
    for i in remainders[:short]:
        counts[i] += 1
    return counts


def _build_taxonomy(dimension: str, rng: np.random.Generator) -> tuple[Taxonomy, list[list[str]]]:
    """Random tree with one subtree ("sector") per risk stratum.

    Returns the taxonomy and the per-sector leaf lists. Leaves sit at depth
    4 to 6; per-node branching stays within 2 to 5.
    """
    prefix = dimension[:3]
    root = f"{prefix}-root"
    nodes: list[tuple[str, str | None]] = [(root, None)]
    counter = 0
    sector_leaves: list[list[str]] = []
    for _ in range(N_STRATA):
        sector = f"{prefix}-{counter:03d}"
        counter += 1
        nodes.append((sector, root))
        depth_extra = int(rng.integers(2, 4))  # levels below the sector node
        branching = int(rng.integers(2, 5))
        if branching ** depth_extra < 8:
            branching += 1
        frontier = [sector]
        for _ in range(depth_extra):
            next_frontier = []
            for parent in frontier:
                for _ in range(branching):
                    child = f"{prefix}-{counter:03d}"
                    counter += 1
                    nodes.append((child, parent))
                    next_frontier.append(child)
            frontier = next_frontier
        sector_leaves.append(frontier)
    return Taxonomy(dimension, root, nodes), sector_leaves


def _pick_concept(rng: np.random.Generator, sector_leaves: list[list[str]],
                  stratum: int, affinity: float) -> str:
    if rng.random() < affinity:
        leaves = sector_leaves[stratum]
    else:
        leaves = sector_leaves[int(rng.integers(N_STRATA))]
    return leaves[int(rng.integers(len(leaves)))]


def generate_corpus(spec: CorpusSpec, seed: int) -> Corpus:
    """Deterministically build a corpus from settings and a seed."""
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    taxonomies_and_leaves = [_build_taxonomy(dim, rng) for dim in DIMENSIONS]
    taxonomies = TaxonomySet(*(t for t, _ in taxonomies_and_leaves))
    leaves_by_dim = {
        dim: leaves for dim, (_, leaves) in zip(DIMENSIONS, taxonomies_and_leaves)
    }

    counts = _apportion(spec.situations, spec.stratum_proportions)
    used: set[tuple[str, str, str]] = set()
    situations: list[Situation] = []
    strata: list[int] = []
    for stratum_index, count in enumerate(counts):
        for _ in range(count):
            for _attempt in range(1000):
                triple = tuple(
                    _pick_concept(rng, leaves_by_dim[dim], stratum_index, spec.region_affinity)
                    for dim in DIMENSIONS
                )
                if triple not in used:
                    used.add(triple)
                    break
            else:
                raise GenerationError(
                    "could not draw enough distinct situations; "
                    "lower the situation count or enlarge the taxonomies"
                )
            situations.append(Situation(*triple))
            strata.append(stratum_index + 1)

    # expected case mean of each stratum's shape, used to rescale onto the target
    est_share = spec.entries_per_situation / spec.docs_per_case
    scales = []
    for shape, target in zip(spec.shapes, spec.stratum_click_means):
        raw = (
            est_share * shape.established_mean * shape.class_mix()
            + (1.0 - est_share) * shape.novel_mean
        )
        scales.append(target / raw)

    case_base = CaseBase()
    doc_ids_all: list[list[str]] = []
    click_probs_all: list[np.ndarray] = []
    recorded_total = 0
    for case_index, (situation, stratum) in enumerate(zip(situations, strata)):
        shape = spec.shapes[stratum - 1]
        scale = scales[stratum - 1]
        n_docs = spec.docs_per_case
        # fractional entry targets alternate between the two nearest counts
        whole = int(np.floor(spec.entries_per_situation))
        n_est = min(
            n_docs,
            max(1, whole + int(rng.random() < spec.entries_per_situation - whole)),
        )
        order = rng.permutation(n_docs)
        established = [int(i) for i in order[:n_est]]
        established_set = set(established)
        n_sleepers = int(round(shape.sleeper_fraction * n_est))
        sleeper_picks = rng.permutation(n_est)[:n_sleepers]
        sleepers = {established[int(i)] for i in sleeper_picks}
        docs = [f"c{case_index:04d}-d{j:02d}" for j in range(n_docs)]
        probs = np.empty(n_docs)
        prefs = UserPreferences()
        for j in range(n_docs):
            if j in established_set:
                sleeper = j in sleepers
                true_factor = shape.sleeper_boost if sleeper else shape.decayed_factor
                if shape.history_inverted:
                    hist_factor = shape.decayed_factor if sleeper else shape.sleeper_boost
                else:
                    hist_factor = true_factor
                u = 1.0 + spec.jitter * (2.0 * rng.random() - 1.0)
                p_run = float(np.clip(
                    shape.established_mean * true_factor * u * scale, 0.0005, 0.9
                ))
                uh = 1.0 + spec.jitter * (2.0 * rng.random() - 1.0)
                p_hist = float(np.clip(
                    shape.history_inflation * shape.established_mean * hist_factor
                    * uh * scale,
                    0.0005, 0.95,
                ))
                recoms = int(rng.integers(spec.seed_recoms_min, spec.seed_recoms_max + 1))
                clicks = int(rng.binomial(recoms, p_hist))
                read_time = round(clicks * float(rng.uniform(30.0, 240.0)), 1)
                prefs.add(docs[j], DocPrefs(clicks, recoms, read_time))
            else:
                u = 1.0 + spec.jitter * (2.0 * rng.random() - 1.0)
                p_run = float(np.clip(shape.novel_mean * u * scale, 0.0005, 0.9))
                if shape.novel_seed_max > 0:
                    recoms = int(rng.integers(
                        shape.novel_seed_min, shape.novel_seed_max + 1
                    ))
                    p_hist = float(np.clip(p_run * shape.novel_hist_factor, 0.0005, 0.95))
                    clicks = int(rng.binomial(recoms, p_hist))
                    read_time = round(clicks * float(rng.uniform(30.0, 240.0)), 1)
                    prefs.add(docs[j], DocPrefs(clicks, recoms, read_time))
                else:
                    prefs.add(docs[j], DocPrefs(0, 0, 0.0))
            probs[j] = p_run
        recorded_total += sum(1 for p in prefs.entries.values() if p.recoms > 0)
        case_base.add(
            Case(situation=situation, prefs=prefs, is_critical=(stratum == N_STRATA))
        )
        doc_ids_all.append(docs)
        click_probs_all.append(probs)

    strata_arr = np.array(strata, dtype=np.int64)
    ground_truth = GroundTruth(strata_arr, situations, doc_ids_all, click_probs_all)

    realized = ground_truth.stratum_means()
    if any(a <= b for a, b in zip(realized, realized[1:])):
        raise GenerationError(
            f"realized stratum click means are not strictly decreasing: {realized}"
        )

    concept_seeds = _concept_seeds(situations, strata, spec.shapes)
    risky_share = sum(
        1 for s in strata if STRATUM_MIDPOINTS[s - 1] > 0.6
    ) / len(strata)
    meta = {
        "version": 1,
        "seed": seed,
        "spec": _spec_to_obj(spec),
        "stratum_counts": counts,
        "risky_share": risky_share,
        "stratum_means": realized,
        "recorded_docs_per_situation": recorded_total / len(situations),
    }
    return Corpus(
        taxonomies, case_base, ground_truth, concept_seeds, RiskConfig(),
        spec.concept_prior_weight, meta,
    )


def _concept_seeds(situations: list[Situation], strata: list[int],
                   shapes: tuple[StratumShape, ...]) -> list[tuple[str, str, float]]:
    """Per-concept risk priors: mean stratum seed risk over the situations
    using the concept, per dimension. A stratum seeds its shape's
    ``concept_risk`` when set, its nominal risk midpoint otherwise."""
    stratum_risk = [
        shape.concept_risk if shape.concept_risk is not None else STRATUM_MIDPOINTS[i]
        for i, shape in enumerate(shapes)
    ]
    sums: dict[tuple[str, str], list[float]] = {}
    for situation, stratum in zip(situations, strata):
        for dim in DIMENSIONS:
            key = (dim, getattr(situation, dim))
            sums.setdefault(key, []).append(stratum_risk[stratum - 1])
    return [
        (dim, concept, sum(values) / len(values))
        for (dim, concept), values in sums.items()
    ]


def _spec_to_obj(spec: CorpusSpec) -> dict:
    obj = asdict(spec)
    obj["stratum_proportions"] = list(spec.stratum_proportions)
    obj["stratum_click_means"] = list(spec.stratum_click_means)
    obj["shapes"] = [asdict(s) for s in spec.shapes]
    return obj


def spec_from_obj(data: dict) -> CorpusSpec:
    """Rebuild a CorpusSpec from its JSON form; unknown fields are rejected."""
    known = {
        "situations", "docs_per_case", "entries_per_situation",
        "stratum_proportions", "stratum_click_means", "jitter",
        "region_affinity", "seed_recoms_min", "seed_recoms_max",
        "concept_prior_weight", "shapes",
    }
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown corpus spec field {sorted(unknown)[0]!r}")
    kwargs = dict(data)
    if "stratum_proportions" in kwargs:
        kwargs["stratum_proportions"] = tuple(kwargs["stratum_proportions"])
    if "stratum_click_means" in kwargs:
        kwargs["stratum_click_means"] = tuple(kwargs["stratum_click_means"])
    if "shapes" in kwargs:
        shape_known = {
            "established_mean", "novel_mean", "sleeper_fraction", "sleeper_boost",
            "decayed_factor", "history_inverted", "history_inflation",
            "novel_seed_min", "novel_seed_max", "novel_hist_factor", "concept_risk",
        }
        shapes = []
        for entry in kwargs["shapes"]:
            bad = set(entry) - shape_known
            if bad:
                raise ConfigError(f"unknown stratum shape field {sorted(bad)[0]!r}")
            shapes.append(StratumShape(**entry))
        kwargs["shapes"] = tuple(shapes)
    try:
        return CorpusSpec(**kwargs)
    except TypeError as exc:
        raise ConfigError(f"bad corpus spec: {exc}") from None


# ---------------------------------------------------------------------------
# feedback and sparsification


def simulate_feedback(ground_truth: GroundTruth, situation: Situation,
                      docs: list[str], rng: np.random.Generator) -> np.ndarray:
    """One Bernoulli click draw per presented document."""
    probs = np.array([ground_truth.prob(situation, d) for d in docs])
    return rng.random(len(docs)) < probs


def sparsify(corpus: Corpus, fraction: float, seed: int) -> Corpus:
    """Uniformly subsample cases to a fraction (rounded half up) of the corpus.

    Preserves case order, criticality flags, and the matching ground-truth
    rows; per-concept seeds are kept as corpus-level knowledge.
    """
    if not 0.0 < fraction <= 1.0:
        raise ConfigError(f"fraction must lie in (0, 1], got {fraction}")
    n = len(corpus.case_base)
    keep = int(np.floor(n * fraction + 0.5))
    if keep < 1:
        raise GenerationError(
            f"sparsifying {n} cases to fraction {fraction} leaves no cases"
        )
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    kept = np.sort(rng.choice(n, size=keep, replace=False))
    cases = corpus.case_base.cases
    new_base = CaseBase()
    situations = []
    doc_ids = []
    probs = []
    strata = []
    for i in kept:
        case = cases[int(i)]
        new_base.add(
            Case(
                situation=case.situation,
                prefs=_copy_prefs(case.prefs),
                is_critical=case.is_critical,
                risk_history=list(case.risk_history),
            )
        )
        situations.append(case.situation)
        doc_ids.append(list(corpus.ground_truth.doc_ids[int(i)]))
        probs.append(corpus.ground_truth.click_probs[int(i)].copy())
        strata.append(int(corpus.ground_truth.strata[int(i)]))
    gt = GroundTruth(np.array(strata, dtype=np.int64), situations, doc_ids, probs)
    meta = dict(corpus.meta)
    meta["sparsified"] = {"fraction": fraction, "seed": seed, "kept": keep}
    return Corpus(
        corpus.taxonomies, new_base, gt, list(corpus.concept_seeds),
        corpus.risk_config, corpus.concept_prior_weight, meta,
    )


def _copy_prefs(prefs: UserPreferences) -> UserPreferences:
    fresh = UserPreferences()
    for doc, p in prefs.entries.items():
        fresh.add(doc, DocPrefs(p.clicks, p.recoms, p.read_time))
    return fresh


def halve_entries(corpus: Corpus, keep_fraction: float, seed: int) -> Corpus:
    """Drop a random share of each case's recorded history entries (documents
    keep their slots; dropped ones just lose their counts). Used by the
    exploration-rate sweep, which probes the critical situations with half
    their recorded entries."""
    if not 0.0 < keep_fraction <= 1.0:
        raise ConfigError(f"keep_fraction must lie in (0, 1], got {keep_fraction}")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    new_base = CaseBase()
    for case in corpus.case_base:
        recorded = [d for d, p in case.prefs.entries.items() if p.recoms > 0]
        keep = max(1, int(np.floor(len(recorded) * keep_fraction + 0.5))) if recorded else 0
        chosen = set()
        if recorded:
            idx = rng.choice(len(recorded), size=keep, replace=False)
            chosen = {recorded[int(i)] for i in idx}
        fresh = UserPreferences()
        for doc, p in case.prefs.entries.items():
            if doc in chosen:
                fresh.add(doc, DocPrefs(p.clicks, p.recoms, p.read_time))
            else:
                fresh.add(doc, DocPrefs(0, 0, 0.0))
        new_base.add(
            Case(
                situation=case.situation,
                prefs=fresh,
                is_critical=case.is_critical,
                risk_history=list(case.risk_history),
            )
        )
    return replace(corpus, case_base=new_base)
