"""Overlapping community detection on snapshot graphs.

The built-in detector grows communities by greedy local expansion around
seed groups (the previous step's communities, when given) or around
high-degree singletons. Expansion admits the best boundary node while it
strictly improves an edge-proportion objective whose denominator is
raised to the ``resolution`` exponent, so larger resolutions penalise
scale. A finished community is emitted only if its fitness reaches
``threshold``; weaker groups dissolve and their nodes stay unassigned.
The detector is a pure deterministic function of the graph and its
parameters, which keeps grid search and replays reproducible. Covers
produced by an external detector can be imported from a text file with
one community per line.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, NamedTuple, Sequence

from .corpus import SnapshotGraph
from .errors import ArgumentError, ValidationError

log = logging.getLogger(__name__)

DEFAULT_RESOLUTIONS = (0.5, 1.0, 1.5, 2.0)
DEFAULT_THRESHOLDS = (0.1, 0.2, 0.3)


class CommunityId(NamedTuple):
    """Identity of a step community: the step it was found at plus an index."""

    step: int
    index: int

    def __str__(self) -> str:
        return f"{self.step}:{self.index}"

    @classmethod
    def parse(cls, text: str) -> "CommunityId":
        step, _, index = text.partition(":")
        return cls(int(step), int(index))


@dataclass(frozen=True)
class StepCommunity:
    """A group of papers found at one step."""

    id: CommunityId
    members: frozenset[str]

    def __post_init__(self):
        if not self.members:
            raise ValidationError(f"community {self.id} has no members")

    @property
    def step(self) -> int:
        return self.id.step

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class Cover:
    """All step communities found at one step. Communities may overlap."""

    step: int
    communities: tuple[StepCommunity, ...]

    def __post_init__(self):
        for c in self.communities:
            if c.id.step != self.step:
                raise ValidationError(
                    f"community {c.id} does not belong to step {self.step}"
                )

    @classmethod
    def build(cls, step: int, member_sets: Iterable[Iterable[str]]) -> "Cover":
        comms = tuple(
            StepCommunity(CommunityId(step, i), frozenset(m))
            for i, m in enumerate(member_sets)
        )
        return cls(step, comms)

    def __len__(self) -> int:
        return len(self.communities)

    def __iter__(self):
        return iter(self.communities)

    def by_id(self, cid: CommunityId) -> StepCommunity:
        for c in self.communities:
            if c.id == cid:
                return c
        raise ArgumentError(f"no community {cid} in cover for step {self.step}")


@dataclass(frozen=True)
class DetectorParams:
    """Hyperparameters of the built-in detector."""

    resolution: float
    threshold: float
    seed: int = 0

    def __post_init__(self):
        if self.resolution <= 0:
            raise ArgumentError(f"resolution must be positive, got {self.resolution}")
        if not (0 < self.threshold <= 1):
            raise ArgumentError(f"threshold must be in (0, 1], got {self.threshold}")


def _members(community) -> frozenset[str]:
    if isinstance(community, StepCommunity):
        return community.members
    return frozenset(community)


def fitness(community, graph: SnapshotGraph) -> float:
    """Fraction of the community's incident edges that are internal.

    Edges are counted with direction collapsed. A community with no
    incident edges at all is degenerate and scores 0.
    """
    members = _members(community)
    missing = members - graph.nodes
    if missing:
        raise ArgumentError(f"community members not in graph: {sorted(missing)[:5]}")
    internal2 = 0
    outgoing = 0
    for v in members:
        inside = len(graph.neighbors(v) & members)
        internal2 += inside
        outgoing += graph.degree(v) - inside
    internal = internal2 // 2
    incident = internal + outgoing
    if incident == 0:
        log.warning("community of %d node(s) has no incident edges", len(members))
        return 0.0
    return internal / incident


class _Expansion:
    """Incremental edge counters for one growing community."""

    def __init__(self, graph: SnapshotGraph, members: Iterable[str], resolution: float):
        self.graph = graph
        self.alpha = resolution
        self.members: set[str] = set(members)
        self.internal = 0
        self.outgoing = 0
        for v in self.members:
            inside = len(graph.neighbors(v) & self.members)
            self.internal += inside
            self.outgoing += graph.degree(v) - inside
        self.internal //= 2

    def objective(self, internal: int | None = None, outgoing: int | None = None) -> float:
        e_in = self.internal if internal is None else internal
        e_out = self.outgoing if outgoing is None else outgoing
        total = e_in + e_out
        if total == 0 or e_in == 0:
            return 0.0
        return e_in / total**self.alpha

    def gain_add(self, node: str) -> float:
        d_in = len(self.graph.neighbors(node) & self.members)
        d_out = self.graph.degree(node) - d_in
        return self.objective(self.internal + d_in, self.outgoing - d_in + d_out)

    def gain_remove(self, node: str) -> float:
        d_in = len(self.graph.neighbors(node) & (self.members - {node}))
        d_out = self.graph.degree(node) - d_in
        return self.objective(self.internal - d_in, self.outgoing + d_in - d_out)

    def add(self, node: str):
        d_in = len(self.graph.neighbors(node) & self.members)
        self.internal += d_in
        self.outgoing += self.graph.degree(node) - 2 * d_in
        self.members.add(node)

    def remove(self, node: str):
        self.members.discard(node)
        d_in = len(self.graph.neighbors(node) & self.members)
        self.internal -= d_in
        self.outgoing -= self.graph.degree(node) - 2 * d_in

    def frontier(self) -> set[str]:
        out: set[str] = set()
        for v in self.members:
            out |= self.graph.neighbors(v)
        return out - self.members


def _grow(graph: SnapshotGraph, seed: Iterable[str], params: DetectorParams) -> frozenset[str]:
    """Prune, expand, then prune one community around ``seed``."""
    state = _Expansion(graph, seed, params.resolution)

    def prune():
        while len(state.members) > 1:
            current = state.objective()
            best_node, best_val = None, current
            for v in sorted(state.members):
                val = state.gain_remove(v)
                if val > best_val:
                    best_node, best_val = v, val
            if best_node is None:
                return
            state.remove(best_node)

    def expand():
        while True:
            current = state.objective()
            best_node, best_val = None, -1.0
            for u in sorted(state.frontier()):
                val = state.gain_add(u)
                if val > best_val:
                    best_node, best_val = u, val
            if best_node is None or best_val <= current:
                return
            state.add(best_node)

    prune()
    expand()
    prune()
    return frozenset(state.members)


def detect(
    graph: SnapshotGraph,
    params: DetectorParams,
    seed_cover: Cover | None = None,
) -> Cover:
    """Find an overlapping cover of ``graph``.

    When ``seed_cover`` is given, each of its communities (restricted to
    the current node set) is refined first; remaining nodes may then seed
    new communities. Groups whose fitness stays below the threshold
    dissolve, leaving their nodes unassigned. Output order: largest
    community first, ties by member ids, so covers are reproducible.
    """
    if len(graph) == 0:
        return Cover(graph.step, ())

    def keep(members: frozenset[str]) -> bool:
        return len(members) >= 2 and fitness(members, graph) >= params.threshold

    found: list[frozenset[str]] = []
    if seed_cover is not None:
        for sc in seed_cover.communities:
            members = sc.members & graph.nodes
            if members:
                grown = _grow(graph, members, params)
                if keep(grown):
                    found.append(grown)

    assigned: set[str] = set().union(*found) if found else set()
    for node in sorted(graph.nodes, key=lambda n: (-graph.degree(n), n)):
        if node in assigned or graph.degree(node) == 0:
            continue
        grown = _grow(graph, {node}, params)
        if keep(grown):
            found.append(grown)
            assigned |= grown

    unique: list[frozenset[str]] = []
    seen: set[frozenset[str]] = set()
    for members in found:
        if members not in seen:
            seen.add(members)
            unique.append(members)
    unique.sort(key=lambda m: (-len(m), tuple(sorted(m))))
    return Cover.build(graph.step, unique)


def _cover_objective(cover: Cover, graph: SnapshotGraph, k: int) -> float:
    largest = sorted(
        cover.communities, key=lambda c: (-len(c.members), tuple(sorted(c.members)))
    )[:k]
    return sum(fitness(c, graph) for c in largest)


def grid_search(
    series: Sequence[SnapshotGraph],
    resolutions: Sequence[float] = DEFAULT_RESOLUTIONS,
    thresholds: Sequence[float] = DEFAULT_THRESHOLDS,
    k: int = 10,
    detector: Callable[[SnapshotGraph, DetectorParams], Cover] = detect,
) -> DetectorParams:
    """Pick one (resolution, threshold) pair to use across all steps.

    Per step, the winning cell maximises the summed fitness of the k
    largest detected communities; the returned pair is the most frequent
    winner across steps. Mode ties break by highest mean per-step
    objective, then smallest resolution, then smallest threshold, so the
    result does not depend on the order of the series.
    """
    if not resolutions or not thresholds:
        raise ArgumentError("parameter grids must be non-empty")
    cells = [(r, t) for r in resolutions for t in thresholds]
    steps = [g for g in series if len(g) > 0]
    if not steps:
        raise ArgumentError("no non-empty snapshots to search over")

    objective: dict[tuple[float, float], list[float]] = {c: [] for c in cells}
    winners: list[tuple[float, float]] = []
    for graph in steps:
        best_cell, best_val = None, -1.0
        for cell in cells:
            cover = detector(graph, DetectorParams(*cell))
            val = _cover_objective(cover, graph, k)
            objective[cell].append(val)
            if val > best_val or (val == best_val and cell < best_cell):
                best_cell, best_val = cell, val
        winners.append(best_cell)

    counts: dict[tuple[float, float], int] = {}
    for cell in winners:
        counts[cell] = counts.get(cell, 0) + 1
    top = max(counts.values())
    tied = [c for c, n in counts.items() if n == top]
    tied.sort(key=lambda c: (-sum(objective[c]) / len(objective[c]), c[0], c[1]))
    r, t = tied[0]
    return DetectorParams(resolution=r, threshold=t)


def import_cover(
    path: str | Path, step: int, graph: SnapshotGraph | None = None
) -> Cover:
    """Read a cover file: one community per line, whitespace-separated ids.

    When ``graph`` is given, every id must exist in it.
    """
    member_sets: list[frozenset[str]] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            ids = line.split()
            if not ids:
                continue
            members = frozenset(ids)
            if graph is not None:
                unknown = sorted(members - graph.nodes)
                if unknown:
                    raise ValidationError(
                        f"line {lineno}: ids not in snapshot {step}: {', '.join(unknown)}"
                    )
            member_sets.append(members)
    return Cover.build(step, member_sets)


def export_cover(cover: Cover, path: str | Path) -> None:
    """Write a cover in the format read by import_cover."""
    with open(path, "w", encoding="utf-8") as fh:
        for community in cover.communities:
            fh.write(" ".join(sorted(community.members)) + "\n")
