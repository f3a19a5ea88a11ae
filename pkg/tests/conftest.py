"""Shared builders for synthetic corpora and graphs."""

from __future__ import annotations

import random

import pytest

from citeflow.corpus import Corpus, Paper, SnapshotGraph


def make_corpus(papers: list[tuple[str, int]], edges: list[tuple[str, str]]) -> Corpus:
    """Corpus from (id, year) pairs and (src, dst) edges, no text."""
    return Corpus.from_records(
        [Paper(id=pid, year=year, title=pid) for pid, year in papers], edges
    )


def make_graph(nodes: list[str], edges: list[tuple[str, str]], step: int = 2000) -> SnapshotGraph:
    return SnapshotGraph(step, nodes, edges)


def random_corpus(rng: random.Random, n_papers: int = 30, n_edges: int = 60) -> Corpus:
    papers = [(f"p{i}", rng.randint(1990, 2020)) for i in range(n_papers)]
    years = dict(papers)
    edges = set()
    attempts = 0
    while len(edges) < n_edges and attempts < n_edges * 10:
        attempts += 1
        a, b = rng.sample(list(years), 2)
        edges.add((a, b))
    return make_corpus(papers, sorted(edges))


@pytest.fixture
def rng():
    return random.Random(20240211)
