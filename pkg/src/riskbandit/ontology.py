"""Concept taxonomies for the three context dimensions.

Each dimension of a situation (location, time, social) draws its values from
a rooted concept tree. Similarity between two concepts is computed from the
depth of their lowest common subsumer relative to their own depths, so that
concepts sharing a deep ancestor score close to 1 and concepts related only
through the root score close to 0.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

DIMENSIONS = ("location", "time", "social")


class TaxonomyError(ValueError):
    """Structural problem in a taxonomy definition."""


class UnknownConceptError(KeyError):
    """A concept id was looked up in a taxonomy that does not contain it."""

    def __init__(self, concept: str, dimension: str):
        super().__init__(concept)
        self.concept = concept
        self.dimension = dimension

    def __str__(self) -> str:
        return f"unknown concept {self.concept!r} in {self.dimension} taxonomy"


class Taxonomy:
    """A rooted tree of concept ids for one context dimension.

    Node order is the authoring order and is stable: it defines the integer
    index used by the array-based scan kernels.
    """

    def __init__(self, dimension: str, root: str, nodes: list[tuple[str, str | None]]):
        if dimension not in DIMENSIONS:
            raise TaxonomyError(f"unknown dimension {dimension!r}, expected one of {DIMENSIONS}")
        self.dimension = dimension
        self.root = root
        self._parent: dict[str, str | None] = {}
        self._order: list[str] = []
        for node_id, parent in nodes:
            if node_id in self._parent:
                raise TaxonomyError(f"duplicate node {node_id!r} in {dimension} taxonomy")
            self._parent[node_id] = parent
            self._order.append(node_id)
        self._index = {c: i for i, c in enumerate(self._order)}
        self._validate()
        self._depth: dict[str, int] = {}
        self._sim_matrix: np.ndarray | None = None

    def _validate(self) -> None:
        if self.root not in self._parent:
            raise TaxonomyError(f"declared root {self.root!r} missing from node list")
        roots = [c for c, p in self._parent.items() if p is None]
        if self.root not in roots:
            raise TaxonomyError(f"declared root {self.root!r} has a parent entry")
        extra = [c for c in roots if c != self.root]
        if extra:
            raise TaxonomyError(f"node {extra[0]!r} has no parent but is not the declared root")
        for node_id, parent in self._parent.items():
            if parent is not None and parent not in self._parent:
                raise TaxonomyError(f"node {node_id!r} references unknown parent {parent!r}")
        # Walk every node to the root; a walk longer than the node count is a cycle,
        # and a walk ending anywhere else means the node is unreachable from the root.
        for node_id in self._order:
            seen = 0
            cur: str | None = node_id
            while cur is not None:
                seen += 1
                if seen > len(self._parent):
                    raise TaxonomyError(f"cycle detected at node {node_id!r}")
                cur = self._parent[cur]

    # -- basic queries -------------------------------------------------

    def __contains__(self, concept: str) -> bool:
        return concept in self._parent

    def __len__(self) -> int:
        return len(self._order)

    @property
    def nodes(self) -> list[str]:
        return list(self._order)

    def require(self, concept: str) -> None:
        if concept not in self._parent:
            raise UnknownConceptError(concept, self.dimension)

    def index_of(self, concept: str) -> int:
        self.require(concept)
        return self._index[concept]

    def parent_of(self, concept: str) -> str | None:
        self.require(concept)
        return self._parent[concept]

    def children_of(self, concept: str) -> list[str]:
        self.require(concept)
        return [c for c in self._order if self._parent[c] == concept]

    def leaves(self) -> list[str]:
        has_child = {p for p in self._parent.values() if p is not None}
        return [c for c in self._order if c not in has_child]

    def depth(self, concept: str) -> int:
        """Number of nodes on the path from the root to the concept, root included."""
        self.require(concept)
        cached = self._depth.get(concept)
        if cached is not None:
            return cached
        parent = self._parent[concept]
        d = 1 if parent is None else self.depth(parent) + 1
        self._depth[concept] = d
        return d

    def path_to_root(self, concept: str) -> list[str]:
        self.require(concept)
        path = [concept]
        cur = self._parent[concept]
        while cur is not None:
            path.append(cur)
            cur = self._parent[cur]
        return path

    def lcs(self, a: str, b: str) -> str:
        """Deepest concept subsuming both a and b."""
        self.require(a)
        self.require(b)
        ancestors_a = set(self.path_to_root(a))
        cur: str | None = b
        while cur is not None:
            if cur in ancestors_a:
                return cur
            cur = self._parent[cur]
        raise TaxonomyError(f"no common subsumer for {a!r} and {b!r}")  # unreachable in a tree

    def concept_sim(self, a: str, b: str) -> float:
        """Similarity 2*depth(lcs) / (depth(a) + depth(b)), in (0, 1]."""
        shared = self.lcs(a, b)
        return 2.0 * self.depth(shared) / (self.depth(a) + self.depth(b))

    def sim_matrix(self) -> np.ndarray:
        """Pairwise concept similarity, indexed by node order. Cached."""
        if self._sim_matrix is None:
            n = len(self._order)
            mat = np.ones((n, n))
            for i in range(n):
                for j in range(i):
                    s = self.concept_sim(self._order[i], self._order[j])
                    mat[i, j] = s
                    mat[j, i] = s
            self._sim_matrix = mat
        return self._sim_matrix

    # -- persistence ---------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "root": self.root,
            "nodes": [{"id": c, "parent": self._parent[c]} for c in self._order],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Taxonomy":
        for key in ("dimension", "root", "nodes"):
            if key not in data:
                raise TaxonomyError(f"taxonomy definition missing field {key!r}")
        nodes = []
        for entry in data["nodes"]:
            if "id" not in entry:
                raise TaxonomyError("taxonomy node entry missing 'id'")
            nodes.append((entry["id"], entry.get("parent")))
        return cls(data["dimension"], data["root"], nodes)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1))

    @classmethod
    def load(cls, path: str | Path) -> "Taxonomy":
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class TaxonomySet:
    """The three per-dimension taxonomies used by a corpus."""

    location: Taxonomy
    time: Taxonomy
    social: Taxonomy

    def __post_init__(self):
        for dim in DIMENSIONS:
            tax = getattr(self, dim)
            if tax.dimension != dim:
                raise TaxonomyError(
                    f"taxonomy for the {dim!r} slot declares dimension {tax.dimension!r}"
                )

    def by_dimension(self, dimension: str) -> Taxonomy:
        if dimension not in DIMENSIONS:
            raise TaxonomyError(f"unknown dimension {dimension!r}")
        return getattr(self, dimension)

    def save_dir(self, out_dir: str | Path) -> None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for dim in DIMENSIONS:
            self.by_dimension(dim).save(out / f"taxonomy_{dim}.json")

    @classmethod
    def load_dir(cls, in_dir: str | Path) -> "TaxonomySet":
        base = Path(in_dir)
        return cls(*(Taxonomy.load(base / f"taxonomy_{dim}.json") for dim in DIMENSIONS))
