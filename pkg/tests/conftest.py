"""Shared fixtures.

The hand-built taxonomy trio has fully known geometry: every depth and every
pairwise similarity can be worked out by hand, which is what the oracle
tests lean on. The generated corpus is kept small so integration tests stay
fast; the acceptance suite builds its own full-size corpus.
"""
import pytest

from riskbandit import CorpusSpec, Taxonomy, TaxonomySet, generate_corpus


def build_tree(dimension: str, prefix: str) -> Taxonomy:
    # root(depth 1) -> a, b(2); a -> a1, a2(3); b -> b1(3); a1 -> a1x, a1y(4)
    p = prefix
    nodes = [
        (f"{p}-root", None),
        (f"{p}-a", f"{p}-root"),
        (f"{p}-b", f"{p}-root"),
        (f"{p}-a1", f"{p}-a"),
        (f"{p}-a2", f"{p}-a"),
        (f"{p}-b1", f"{p}-b"),
        (f"{p}-a1x", f"{p}-a1"),
        (f"{p}-a1y", f"{p}-a1"),
    ]
    return Taxonomy(dimension, f"{p}-root", nodes)


@pytest.fixture(scope="session")
def toy_taxonomies() -> TaxonomySet:
    return TaxonomySet(
        location=build_tree("location", "loc"),
        time=build_tree("time", "tim"),
        social=build_tree("social", "soc"),
    )


@pytest.fixture(scope="session")
def small_corpus():
    """200-situation corpus shared by the cheaper integration tests."""
    return generate_corpus(CorpusSpec(situations=200), seed=5)
