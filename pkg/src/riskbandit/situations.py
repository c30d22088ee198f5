"""Situations, per-document preferences, and the case base.

A situation is a triple of concepts (location, time, social). A case pairs a
situation with the user's per-document interaction counts. The case base
supports similarity retrieval (nearest situation by mean per-dimension concept
similarity) and additive merge of new observations.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import kernels
from .ontology import DIMENSIONS, TaxonomySet


class EmptyCaseBaseError(ValueError):
    """Retrieval from a case base with no cases."""


@dataclass(frozen=True)
class Situation:
    location: str
    time: str
    social: str

    def as_tuple(self) -> tuple[str, str, str]:
        return (self.location, self.time, self.social)

    def validate(self, taxonomies: TaxonomySet) -> None:
        for dim in DIMENSIONS:
            taxonomies.by_dimension(dim).require(getattr(self, dim))


def situation_sim(taxonomies: TaxonomySet, a: Situation, b: Situation) -> float:
    """Mean concept similarity over the three dimensions."""
    s_loc = taxonomies.location.concept_sim(a.location, b.location)
    s_time = taxonomies.time.concept_sim(a.time, b.time)
    s_soc = taxonomies.social.concept_sim(a.social, b.social)
    return (s_loc + s_time + s_soc) / 3.0


@dataclass
class DocPrefs:
    """Interaction counts for one document: clicks out of recommendations."""

    clicks: int = 0
    recoms: int = 0
    read_time: float = 0.0

    def validate(self) -> None:
        if self.clicks < 0 or self.recoms < 0:
            raise ValueError("negative interaction count")
        if self.clicks > self.recoms:
            raise ValueError(
                f"clicks ({self.clicks}) exceed recommendations ({self.recoms})"
            )
        if self.read_time < 0:
            raise ValueError("negative read time")


class UserPreferences:
    """Per-document preference entries for one situation."""

    def __init__(self, entries: dict[str, DocPrefs] | None = None):
        self.entries: dict[str, DocPrefs] = entries if entries is not None else {}
        for prefs in self.entries.values():
            prefs.validate()

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, doc: str) -> bool:
        return doc in self.entries

    def docs(self) -> list[str]:
        return list(self.entries)

    def get(self, doc: str) -> DocPrefs:
        if doc not in self.entries:
            raise KeyError(f"unknown document {doc!r}")
        return self.entries[doc]

    def add(self, doc: str, prefs: DocPrefs) -> None:
        prefs.validate()
        if doc in self.entries:
            raise ValueError(f"document {doc!r} already present")
        self.entries[doc] = prefs

    def merge(self, other: "UserPreferences") -> None:
        """Accumulate counts from ``other``; unknown documents are inserted."""
        for doc, prefs in other.entries.items():
            prefs.validate()
            if doc in self.entries:
                mine = self.entries[doc]
                mine.clicks += prefs.clicks
                mine.recoms += prefs.recoms
                mine.read_time += prefs.read_time
            else:
                self.entries[doc] = DocPrefs(prefs.clicks, prefs.recoms, prefs.read_time)

    def total_clicks(self) -> int:
        return sum(p.clicks for p in self.entries.values())

    def total_recoms(self) -> int:
        return sum(p.recoms for p in self.entries.values())


def doc_reward(prefs: UserPreferences, doc: str) -> float:
    """Observed mean reward clicks/recoms for one document; 0 while untried."""
    entry = prefs.get(doc)
    if entry.recoms == 0:
        return 0.0
    return entry.clicks / entry.recoms


@dataclass
class Case:
    situation: Situation
    prefs: UserPreferences
    is_critical: bool = False
    risk_history: list[float] = field(default_factory=list)

    @property
    def stored_risk(self) -> float | None:
        """Running mean of propagated risk values, None before any observation."""
        if not self.risk_history:
            return None
        total = 0.0
        for value in self.risk_history:
            total += value
        return total / len(self.risk_history)


class CaseBase:
    """Insertion-ordered collection of cases, one per distinct situation."""

    def __init__(self, cases: list[Case] | None = None):
        self._cases: list[Case] = []
        self._by_situation: dict[Situation, int] = {}
        self._version = 0
        self._encoded_cache: tuple[int, int, tuple] | None = None
        if cases:
            for case in cases:
                self.add(case)

    def __len__(self) -> int:
        return len(self._cases)

    def __iter__(self):
        return iter(self._cases)

    @property
    def cases(self) -> list[Case]:
        return list(self._cases)

    def case_at(self, index: int) -> Case:
        return self._cases[index]

    def index_of(self, situation: Situation) -> int | None:
        return self._by_situation.get(situation)

    def add(self, case: Case) -> int:
        if case.situation in self._by_situation:
            raise ValueError(f"situation {case.situation} already present in case base")
        self._cases.append(case)
        index = len(self._cases) - 1
        self._by_situation[case.situation] = index
        self._version += 1
        return index

    def critical_cases(self) -> list[Case]:
        return [c for c in self._cases if c.is_critical]

    # -- retrieval -----------------------------------------------------

    def encoded(self, taxonomies: TaxonomySet) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Per-case concept index arrays in case order, cached until mutation."""
        key = (id(taxonomies), self._version)
        if self._encoded_cache is not None and self._encoded_cache[:2] == key:
            return self._encoded_cache[2]
        loc = np.empty(len(self._cases), dtype=np.int64)
        tim = np.empty(len(self._cases), dtype=np.int64)
        soc = np.empty(len(self._cases), dtype=np.int64)
        for i, case in enumerate(self._cases):
            loc[i] = taxonomies.location.index_of(case.situation.location)
            tim[i] = taxonomies.time.index_of(case.situation.time)
            soc[i] = taxonomies.social.index_of(case.situation.social)
        arrays = (loc, tim, soc)
        self._encoded_cache = (id(taxonomies), self._version, arrays)
        return arrays

    def retrieve(self, taxonomies: TaxonomySet, situation: Situation) -> tuple[Case, float]:
        """Most similar stored case and its similarity; ties go to insertion order."""
        if not self._cases:
            raise EmptyCaseBaseError("cannot retrieve from an empty case base")
        situation.validate(taxonomies)
        loc, tim, soc = self.encoded(taxonomies)
        row_loc = taxonomies.location.sim_matrix()[taxonomies.location.index_of(situation.location)]
        row_time = taxonomies.time.sim_matrix()[taxonomies.time.index_of(situation.time)]
        row_soc = taxonomies.social.sim_matrix()[taxonomies.social.index_of(situation.social)]
        index, sim = kernels.scan_best_case(row_loc, row_time, row_soc, loc, tim, soc)
        return self._cases[index], sim

    def update(self, situation: Situation, observed: UserPreferences,
               is_critical: bool = False) -> Case:
        """Merge observations into the exact-match case, or insert a new case."""
        index = self._by_situation.get(situation)
        if index is not None:
            case = self._cases[index]
            case.prefs.merge(observed)
            self._version += 1
            return case
        case = Case(situation=situation, prefs=observed, is_critical=is_critical)
        self.add(case)
        return case

    # -- persistence ---------------------------------------------------

    def to_obj(self) -> list[dict]:
        return [
            {
                "situation": {
                    "location": c.situation.location,
                    "time": c.situation.time,
                    "social": c.situation.social,
                },
                "prefs": [
                    {
                        "doc": doc,
                        "clicks": p.clicks,
                        "recoms": p.recoms,
                        "read_time": p.read_time,
                    }
                    for doc, p in c.prefs.entries.items()
                ],
                "is_critical": c.is_critical,
                "risk_history": list(c.risk_history),
            }
            for c in self._cases
        ]

    @classmethod
    def from_obj(cls, data: list[dict]) -> "CaseBase":
        cb = cls()
        for entry in data:
            situation = Situation(**entry["situation"])
            prefs = UserPreferences()
            for row in entry["prefs"]:
                prefs.add(row["doc"], DocPrefs(row["clicks"], row["recoms"], row["read_time"]))
            cb.add(
                Case(
                    situation=situation,
                    prefs=prefs,
                    is_critical=entry.get("is_critical", False),
                    risk_history=list(entry.get("risk_history", [])),
                )
            )
        return cb

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_obj(), indent=1))

    @classmethod
    def load(cls, path: str | Path) -> "CaseBase":
        return cls.from_obj(json.loads(Path(path).read_text()))
