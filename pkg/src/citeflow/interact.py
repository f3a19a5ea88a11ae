"""Per-step community interaction network and knowledge-transfer measures.

Edge weights are citation probabilities: the number of citations crossing
from community i to community j divided by |C_i|*|C_j|. Crossing counts
are kept alongside the weights so percentage displays stay integer-exact.
Papers in overlapping communities contribute to every pair they belong
to; self-pairs are excluded (internal density is a separate metric).
"""

from __future__ import annotations

import csv
import logging
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from .corpus import SnapshotGraph
from .detect import CommunityId, Cover
from .errors import ArgumentError, UndefinedMetricError

log = logging.getLogger(__name__)


class InteractionNetwork:
    """Weighted directed graph over the step communities of one cover."""

    def __init__(
        self,
        step: int,
        sizes: Mapping[CommunityId, int],
        counts: Mapping[tuple[CommunityId, CommunityId], int],
        densities: Mapping[CommunityId, float | None] | None = None,
    ):
        self.step = step
        self.sizes: dict[CommunityId, int] = dict(sizes)
        self.counts: dict[tuple[CommunityId, CommunityId], int] = {}
        self.weights: dict[tuple[CommunityId, CommunityId], float] = {}
        self.densities: dict[CommunityId, float | None] = (
            dict(densities) if densities is not None else {}
        )
        for (i, j), c in counts.items():
            if i == j:
                raise ArgumentError("self-pairs are excluded from the network")
            if i not in self.sizes or j not in self.sizes:
                raise ArgumentError(f"edge ({i}, {j}) references unknown community")
            if c <= 0:
                continue
            self.counts[(i, j)] = int(c)
            self.weights[(i, j)] = c / (self.sizes[i] * self.sizes[j])
        self._betweenness: dict[CommunityId, float] | None = None

    @property
    def nodes(self) -> list[CommunityId]:
        return sorted(self.sizes)

    def weight(self, i: CommunityId, j: CommunityId) -> float:
        return self.weights.get((i, j), 0.0)

    def percent(self, i: CommunityId, j: CommunityId, symmetrise: bool = False) -> float:
        """Weight scaled to a percentage, computed from integer counts."""
        c = self.counts.get((i, j), 0)
        if symmetrise:
            c += self.counts.get((j, i), 0)
        return c * 100 / (self.sizes[i] * self.sizes[j])

    def undirected_neighbors(self, i: CommunityId) -> set[CommunityId]:
        out = set()
        for a, b in self.weights:
            if a == i:
                out.add(b)
            elif b == i:
                out.add(a)
        return out

    def __contains__(self, i: CommunityId) -> bool:
        return i in self.sizes

    def __len__(self) -> int:
        return len(self.sizes)


def build_interaction(cover: Cover, graph: SnapshotGraph) -> InteractionNetwork:
    """Count crossing citations for every ordered community pair."""
    from .content import citation_density

    membership: dict[str, list[CommunityId]] = {}
    for community in cover.communities:
        missing = community.members - graph.nodes
        if missing:
            raise ArgumentError(
                f"community {community.id} has members outside the snapshot: "
                f"{sorted(missing)[:5]}"
            )
        for pid in community.members:
            membership.setdefault(pid, []).append(community.id)

    counts: dict[tuple[CommunityId, CommunityId], int] = {}
    for src, dst in graph.edges:
        for ci in membership.get(src, ()):
            for cj in membership.get(dst, ()):
                if ci != cj:
                    key = (ci, cj)
                    counts[key] = counts.get(key, 0) + 1

    sizes = {c.id: len(c.members) for c in cover.communities}
    densities: dict[CommunityId, float | None] = {}
    for community in cover.communities:
        if len(community.members) >= 2:
            densities[community.id] = citation_density(community, graph)
        else:
            densities[community.id] = None
    return InteractionNetwork(cover.step, sizes, counts, densities)


def degree_centrality(net: InteractionNetwork, i: CommunityId) -> int:
    """Number of communities sharing knowledge with i, in either direction."""
    if i not in net:
        raise ArgumentError(f"community {i} not in network")
    return len(net.undirected_neighbors(i))


def _betweenness_all(net: InteractionNetwork) -> dict[CommunityId, float]:
    """Brandes' algorithm on the undirected, unweighted skeleton.

    Normalised by (n-1)(n-2)/2; graphs with fewer than 3 nodes score 0.
    """
    nodes = net.nodes
    n = len(nodes)
    adjacency = {v: sorted(net.undirected_neighbors(v)) for v in nodes}
    centrality = {v: 0.0 for v in nodes}
    if n < 3:
        return centrality

    for source in nodes:
        stack: list[CommunityId] = []
        preds: dict[CommunityId, list[CommunityId]] = {v: [] for v in nodes}
        sigma = {v: 0 for v in nodes}
        dist = {v: -1 for v in nodes}
        sigma[source] = 1
        dist[source] = 0
        queue = deque([source])
        while queue:
            v = queue.popleft()
            stack.append(v)
            for w in adjacency[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = {v: 0.0 for v in nodes}
        while stack:
            w = stack.pop()
            for v in preds[w]:
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            if w != source:
                centrality[w] += delta[w]

    scale = (n - 1) * (n - 2)  # each unordered pair visited from both ends
    return {v: b / scale for v, b in centrality.items()}


def betweenness(net: InteractionNetwork, i: CommunityId) -> float:
    if i not in net:
        raise ArgumentError(f"community {i} not in network")
    if net._betweenness is None:
        net._betweenness = _betweenness_all(net)
    return net._betweenness[i]


def second_order_proximity(
    net: InteractionNetwork, i: CommunityId, j: CommunityId
) -> float:
    """Cosine similarity of two communities' interaction-weight vectors.

    Vectors collect outgoing then incoming weights over every other
    community, excluding entries for i and j themselves on both sides.
    """
    for node in (i, j):
        if node not in net:
            raise ArgumentError(f"community {node} not in network")
    others = [v for v in net.nodes if v not in (i, j)]
    vec_i = [net.weight(i, k) for k in others] + [net.weight(k, i) for k in others]
    vec_j = [net.weight(j, k) for k in others] + [net.weight(k, j) for k in others]
    norm_i = sum(x * x for x in vec_i) ** 0.5
    norm_j = sum(x * x for x in vec_j) ** 0.5
    if norm_i == 0.0 or norm_j == 0.0:
        raise UndefinedMetricError(
            f"proximity undefined: community {i if norm_i == 0.0 else j} has no "
            "interactions with third communities"
        )
    dot = sum(x * y for x, y in zip(vec_i, vec_j))
    return dot / (norm_i * norm_j)


def total_interaction(net: InteractionNetwork, i: CommunityId) -> float:
    """Sum of interaction probabilities touching i, both directions."""
    if i not in net:
        raise ArgumentError(f"community {i} not in network")
    total = 0.0
    for (a, b), p in net.weights.items():
        if a == i or b == i:
            total += p
    return total


@dataclass(frozen=True)
class SiloRow:
    """One row of the isolation ranking."""

    community: CommunityId
    size: int
    degree: int
    density: float | None
    total_interaction: float


def find_silos(
    net: InteractionNetwork, min_size: int = 10, k: int = 5
) -> list[SiloRow]:
    """Most isolated communities: lowest total interaction probability.

    Communities of ``min_size`` or fewer papers are excluded. Returns up
    to ``k`` rows, most isolated first; ties break on community id.
    """
    rows = [
        SiloRow(
            community=i,
            size=net.sizes[i],
            degree=degree_centrality(net, i),
            density=net.densities.get(i),
            total_interaction=total_interaction(net, i),
        )
        for i in net.nodes
        if net.sizes[i] > min_size
    ]
    rows.sort(key=lambda r: (r.total_interaction, r.community))
    return rows[:k]


def export_matrix_csv(
    net: InteractionNetwork,
    path: str | Path,
    symmetrise: bool = False,
    labels: Mapping[CommunityId, str] | None = None,
) -> None:
    """Percentage-scaled interaction matrix with labelled header row."""
    nodes = net.nodes
    name = lambda c: labels[c] if labels and c in labels else str(c)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([""] + [name(c) for c in nodes])
        for i in nodes:
            row: list[object] = [name(i)]
            for j in nodes:
                row.append("" if i == j else repr(net.percent(i, j, symmetrise)))
            writer.writerow(row)


def export_edge_list(net: InteractionNetwork, path: str | Path) -> None:
    """Weighted edge list: ``src dst probability`` per line, sorted."""
    with open(path, "w", encoding="utf-8") as fh:
        for (i, j) in sorted(net.weights):
            fh.write(f"{i} {j} {net.weights[(i, j)]!r}\n")
