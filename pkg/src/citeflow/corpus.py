"""Canonical data model: papers, citations, and cumulative snapshot graphs.

A corpus is loaded from a UTF-8 line-delimited JSON file holding two record
kinds. Paper records carry (id, year, title, abstract, categories?); edge
records carry (src, dst). Unknown fields are ignored so provider-specific
metadata can ride along.

Snapshot graphs are cumulative: the graph at step t contains every paper
published in year t or earlier and every citation between those papers, so
consecutive snapshots are nested.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple

from .errors import ArgumentError, ParseError, ValidationError

log = logging.getLogger(__name__)

YEAR_MIN = 1500
YEAR_MAX = 2100


@dataclass(frozen=True)
class Paper:
    """One paper: the node type of the citation network."""

    id: str
    year: int
    title: str = ""
    abstract: str = ""
    categories: tuple[str, ...] | None = None

    def __post_init__(self):
        if not self.id:
            raise ValidationError("paper id must be non-empty")
        if not isinstance(self.year, int) or not (YEAR_MIN <= self.year <= YEAR_MAX):
            raise ValidationError(
                f"paper {self.id!r}: year {self.year!r} outside [{YEAR_MIN}, {YEAR_MAX}]"
            )

    @property
    def text(self) -> str:
        """Title and abstract joined; the unit of text used downstream."""
        if self.title and self.abstract:
            return f"{self.title} {self.abstract}"
        return self.title or self.abstract


class CitationEdge(NamedTuple):
    """Directed citation: src cites dst."""

    src: str
    dst: str


class Corpus:
    """Validated, immutable collection of papers and citation edges.

    ``warnings`` records non-fatal issues found at construction time
    (duplicate edges dropped, citations that point forward in time).
    Equality compares papers and edges only.
    """

    def __init__(
        self,
        papers: Mapping[str, Paper],
        edges: Iterable[CitationEdge],
        warnings: tuple[str, ...] = (),
    ):
        self.papers: dict[str, Paper] = dict(papers)
        self.edges: frozenset[CitationEdge] = frozenset(
            CitationEdge(*e) for e in edges
        )
        self.warnings = tuple(warnings)
        self._validate()

    @classmethod
    def from_records(
        cls, papers: Iterable[Paper], edges: Iterable[tuple[str, str]]
    ) -> "Corpus":
        """Build a corpus from raw records, deduplicating edges with warnings."""
        paper_map: dict[str, Paper] = {}
        for p in papers:
            if p.id in paper_map:
                raise ValidationError(f"duplicate paper id {p.id!r}")
            paper_map[p.id] = p

        warnings: list[str] = []
        seen: set[CitationEdge] = set()
        for src, dst in edges:
            edge = CitationEdge(src, dst)
            if edge in seen:
                warnings.append(f"duplicate edge {src} -> {dst} dropped")
                continue
            seen.add(edge)
            a, b = paper_map.get(src), paper_map.get(dst)
            if a is not None and b is not None and a.year < b.year:
                warnings.append(
                    f"edge {src} -> {dst} cites forward in time "
                    f"({a.year} cites {b.year})"
                )
        for w in warnings:
            log.warning(w)
        return cls(paper_map, seen, tuple(warnings))

    def _validate(self):
        dangling = sorted(
            {e.src for e in self.edges if e.src not in self.papers}
            | {e.dst for e in self.edges if e.dst not in self.papers}
        )
        if dangling:
            raise ValidationError(
                f"edges reference unknown paper ids: {', '.join(dangling)}"
            )
        loops = [e for e in self.edges if e.src == e.dst]
        if loops:
            raise ValidationError(f"self-citation edge not allowed: {loops[0].src}")

    def __eq__(self, other) -> bool:
        if not isinstance(other, Corpus):
            return NotImplemented
        return self.papers == other.papers and self.edges == other.edges

    def __hash__(self):
        return hash((frozenset(self.papers), self.edges))

    def __len__(self) -> int:
        return len(self.papers)

    def year_range(self) -> tuple[int, int]:
        if not self.papers:
            raise ArgumentError("empty corpus has no year range")
        years = [p.year for p in self.papers.values()]
        return min(years), max(years)


class SnapshotGraph:
    """The citation graph induced by all papers published up to ``step``.

    Immutable after construction; adjacency maps are precomputed so the
    graph can be shared read-only across workers.
    """

    def __init__(self, step: int, nodes: Iterable[str], edges: Iterable[CitationEdge]):
        self.step = step
        self.nodes: frozenset[str] = frozenset(nodes)
        self.edges: frozenset[CitationEdge] = frozenset(CitationEdge(*e) for e in edges)

        out_adj: dict[str, set[str]] = {n: set() for n in self.nodes}
        und_adj: dict[str, set[str]] = {n: set() for n in self.nodes}
        pairs: set[tuple[str, str]] = set()
        for src, dst in self.edges:
            out_adj[src].add(dst)
            und_adj[src].add(dst)
            und_adj[dst].add(src)
            pairs.add((src, dst) if src <= dst else (dst, src))
        self._out = {n: frozenset(v) for n, v in out_adj.items()}
        self._und = {n: frozenset(v) for n, v in und_adj.items()}
        #: citation pairs with direction collapsed; used for edge counting
        self.undirected_pairs: frozenset[tuple[str, str]] = frozenset(pairs)

    def out_neighbors(self, node: str) -> frozenset[str]:
        return self._out[node]

    def neighbors(self, node: str) -> frozenset[str]:
        """Neighbors ignoring citation direction."""
        return self._und[node]

    def degree(self, node: str) -> int:
        return len(self._und[node])

    def __contains__(self, node: str) -> bool:
        return node in self.nodes

    def __len__(self) -> int:
        return len(self.nodes)


def load_corpus(path: str | Path) -> Corpus:
    """Load and validate a corpus file.

    Raises ParseError (with the line number) for malformed records and
    ValidationError for dangling edge endpoints. Duplicate edges are
    dropped and counted in ``Corpus.warnings``.
    """
    papers: list[Paper] = []
    edges: list[tuple[str, str]] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            raw = raw.strip()
            if not raw:
                continue
            try:
                rec = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON ({exc.msg})", line=lineno) from exc
            if not isinstance(rec, dict):
                raise ParseError("record is not an object", line=lineno)
            if "src" in rec or "dst" in rec:
                if "src" not in rec or "dst" not in rec:
                    raise ParseError("edge record needs both src and dst", line=lineno)
                edges.append((str(rec["src"]), str(rec["dst"])))
            elif "id" in rec:
                if "year" not in rec or rec["year"] is None:
                    raise ParseError(
                        f"paper {rec['id']!r} has no publication year", line=lineno
                    )
                try:
                    paper = Paper(
                        id=str(rec["id"]),
                        year=int(rec["year"]),
                        title=str(rec.get("title", "") or ""),
                        abstract=str(rec.get("abstract", "") or ""),
                        categories=(
                            tuple(str(c) for c in rec["categories"])
                            if rec.get("categories") is not None
                            else None
                        ),
                    )
                except (ValidationError, TypeError, ValueError) as exc:
                    raise ParseError(str(exc), line=lineno) from exc
                papers.append(paper)
            else:
                raise ParseError(
                    "record is neither a paper (id, year) nor an edge (src, dst)",
                    line=lineno,
                )
    return Corpus.from_records(papers, edges)


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    """Write a corpus in the line-delimited format read by load_corpus.

    Records are sorted so output is byte-stable for a given corpus.
    """
    with open(path, "w", encoding="utf-8") as fh:
        for pid in sorted(corpus.papers):
            p = corpus.papers[pid]
            rec: dict = {"id": p.id, "year": p.year, "title": p.title, "abstract": p.abstract}
            if p.categories is not None:
                rec["categories"] = list(p.categories)
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
        for src, dst in sorted(corpus.edges):
            fh.write(json.dumps({"src": src, "dst": dst}, sort_keys=True) + "\n")


def build_snapshot(corpus: Corpus, t: int) -> SnapshotGraph:
    """Induce the cumulative snapshot at year ``t`` (papers with year <= t)."""
    nodes = {pid for pid, p in corpus.papers.items() if p.year <= t}
    edges = [e for e in corpus.edges if e.src in nodes and e.dst in nodes]
    return SnapshotGraph(t, nodes, edges)


def snapshot_series(corpus: Corpus, first: int, last: int) -> list[SnapshotGraph]:
    """One snapshot per year in [first, last], in order."""
    if first > last:
        raise ArgumentError(f"first ({first}) must not exceed last ({last})")
    return [build_snapshot(corpus, t) for t in range(first, last + 1)]
