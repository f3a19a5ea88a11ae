"""Linking step communities across steps into dynamic communities.

Each dynamic community is a chronology of step communities; its most
recent entry is the front. Advancing one step compares every community of
the new cover against every front by Jaccard similarity: a similarity
strictly above the matching threshold is a match. Unmatched communities
are born, one-to-one matches continue, a front matched by several
communities splits, a community matching several fronts is appended to
each (merge), and unmatched fronts go dormant but stay eligible, allowing
intermittent structures. When a simultaneous split and merge touch the
same front, splits are applied first and merges append to the resulting
branches; both read the same pre-step matching matrix, so replays are
deterministic. Fronts that never match again are declared dead at their
last matched step once the series ends.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .detect import CommunityId, Cover
from .errors import ArgumentError

log = logging.getLogger(__name__)

DEFAULT_MATCH_THRESHOLD = 0.2

STATUS_ACTIVE = "active"
STATUS_DORMANT = "dormant"
STATUS_DEAD = "dead"

KINDS = ("birth", "continuation", "split", "merge", "death", "dormancy")


def jaccard(a: Iterable[str], b: Iterable[str]) -> float:
    sa, sb = set(a), set(b)
    union = sa | sb
    if not union:
        raise ArgumentError("jaccard of two empty sets is undefined")
    return len(sa & sb) / len(union)


@dataclass(frozen=True)
class DynamicCommunity:
    """A research area: a chronology of step communities."""

    id: str
    timeline: tuple[tuple[int, CommunityId], ...]
    front_members: frozenset[str]
    status: str = STATUS_ACTIVE
    dormant_steps: int = 0  # consecutive covers the front has failed to match

    def __post_init__(self):
        steps = [s for s, _ in self.timeline]
        if steps != sorted(set(steps)):
            raise ArgumentError(f"timeline steps of {self.id} are not increasing")

    @property
    def front(self) -> CommunityId:
        return self.timeline[-1][1]

    @property
    def last_step(self) -> int:
        return self.timeline[-1][0]

    @property
    def lifespan(self) -> int:
        return len(self.timeline)


@dataclass(frozen=True)
class LifecycleEvent:
    step: int
    kind: str
    dynamic_ids: tuple[str, ...]
    community_ids: tuple[CommunityId, ...]


@dataclass(frozen=True)
class TrackState:
    """Tracker state between steps; treat as immutable."""

    communities: tuple[DynamicCommunity, ...] = ()
    next_id: int = 1
    last_step: int | None = None


def _match_matrix(
    state: TrackState,
    cover: Cover,
    match_threshold: float,
    max_dormancy: int | None = None,
) -> tuple[dict[CommunityId, list[str]], dict[str, list[CommunityId]]]:
    """Pre-step matching matrix: community -> fronts and front -> communities.

    Fronts dormant for more than ``max_dormancy`` consecutive covers are
    no longer eligible to match (None keeps them eligible indefinitely).
    """
    by_sc: dict[CommunityId, list[str]] = {c.id: [] for c in cover.communities}
    by_dyn: dict[str, list[CommunityId]] = {d.id: [] for d in state.communities}
    for dyn in state.communities:
        if max_dormancy is not None and dyn.dormant_steps > max_dormancy:
            continue
        for sc in cover.communities:
            if jaccard(sc.members, dyn.front_members) > match_threshold:
                by_sc[sc.id].append(dyn.id)
                by_dyn[dyn.id].append(sc.id)
    return by_sc, by_dyn


def advance(
    state: TrackState,
    cover: Cover,
    match_threshold: float = DEFAULT_MATCH_THRESHOLD,
    max_dormancy: int | None = None,
) -> tuple[TrackState, list[LifecycleEvent]]:
    """Fold one cover into the tracking state, emitting life-cycle events."""
    if not (0.0 <= match_threshold <= 1.0):
        raise ArgumentError(f"matching threshold must be in [0, 1], got {match_threshold}")
    if state.last_step is not None and cover.step <= state.last_step:
        raise ArgumentError(
            f"cover step {cover.step} does not advance past {state.last_step}"
        )

    by_sc, by_dyn = _match_matrix(state, cover, match_threshold, max_dormancy)
    members_of = {c.id: c.members for c in cover.communities}
    step = cover.step
    next_id = state.next_id
    events: list[LifecycleEvent] = []
    new_communities: list[DynamicCommunity] = []
    # where each (front, step community) pair ended up after splits
    landed: dict[tuple[str, CommunityId], str] = {}

    for dyn in state.communities:
        matched = by_dyn[dyn.id]
        if not matched:
            retired = max_dormancy is not None and dyn.dormant_steps > max_dormancy
            new_communities.append(
                dyn if retired else replace(
                    dyn, status=STATUS_DORMANT, dormant_steps=dyn.dormant_steps + 1
                )
            )
            if not retired:
                events.append(
                    LifecycleEvent(step, "dormancy", (dyn.id,), (dyn.front,))
                )
        elif len(matched) == 1:
            sc_id = matched[0]
            updated = replace(
                dyn,
                timeline=dyn.timeline + ((step, sc_id),),
                front_members=members_of[sc_id],
                status=STATUS_ACTIVE,
                dormant_steps=0,
            )
            new_communities.append(updated)
            landed[(dyn.id, sc_id)] = dyn.id
            if len(by_sc[sc_id]) == 1:
                events.append(
                    LifecycleEvent(step, "continuation", (dyn.id,), (sc_id,))
                )
        else:
            branch_ids = []
            for sc_id in sorted(matched):
                branch = DynamicCommunity(
                    id=f"d{next_id}",
                    timeline=dyn.timeline + ((step, sc_id),),
                    front_members=members_of[sc_id],
                    status=STATUS_ACTIVE,
                )
                next_id += 1
                branch_ids.append(branch.id)
                landed[(dyn.id, sc_id)] = branch.id
                new_communities.append(branch)
            events.append(
                LifecycleEvent(
                    step,
                    "split",
                    (dyn.id, *branch_ids),
                    tuple(sorted(matched)),
                )
            )

    for sc in cover.communities:
        fronts = by_sc[sc.id]
        if not fronts:
            born = DynamicCommunity(
                id=f"d{next_id}",
                timeline=((step, sc.id),),
                front_members=sc.members,
            )
            next_id += 1
            new_communities.append(born)
            events.append(LifecycleEvent(step, "birth", (born.id,), (sc.id,)))
        elif len(fronts) >= 2:
            targets = tuple(sorted(landed[(d, sc.id)] for d in fronts))
            events.append(LifecycleEvent(step, "merge", targets, (sc.id,)))

    return TrackState(tuple(new_communities), next_id, step), events


def track_all(
    covers: Sequence[Cover],
    match_threshold: float = DEFAULT_MATCH_THRESHOLD,
    max_dormancy: int | None = None,
) -> tuple[list[DynamicCommunity], list[LifecycleEvent]]:
    """Track a whole cover series and finalise deaths.

    Communities whose front last matched before the final step are marked
    dead at that last matched step. ``max_dormancy`` optionally retires
    fronts after that many consecutive unmatched covers; the default
    keeps them eligible indefinitely.
    """
    steps = [c.step for c in covers]
    if steps != sorted(set(steps)):
        raise ArgumentError("covers must be ordered by strictly increasing step")
    state = TrackState()
    events: list[LifecycleEvent] = []
    for cover in covers:
        state, step_events = advance(state, cover, match_threshold, max_dormancy)
        events.extend(step_events)

    final: list[DynamicCommunity] = []
    if covers:
        last = covers[-1].step
        deaths = []
        for dyn in state.communities:
            if dyn.last_step < last:
                final.append(replace(dyn, status=STATUS_DEAD))
                deaths.append(
                    LifecycleEvent(dyn.last_step, "death", (dyn.id,), (dyn.front,))
                )
            else:
                final.append(replace(dyn, status=STATUS_ACTIVE))
        deaths.sort(key=lambda e: (e.step, e.dynamic_ids))
        events.extend(deaths)
    return final, events


@dataclass(frozen=True)
class MetricsBundle:
    """The six per-community metrics; series are keyed by timeline step."""

    lifespan: int
    size: dict[int, int]
    degree: dict[int, int]
    betweenness: dict[int, float]
    coherence: dict[int, float]
    stability: dict[int, float]


def community_metrics(
    dyn: DynamicCommunity,
    covers: Mapping[int, Cover],
    nets: Mapping[int, "InteractionNetwork"],
    store: "EmbeddingStore | None" = None,
) -> MetricsBundle:
    """Compute the metric series along one dynamic community's timeline.

    Coherence and stability compare consecutive timeline entries and are
    keyed by the later step; a single-step community has empty series.
    Without an embedding store the coherence series is left empty.
    """
    from .content import content_similarity
    from .interact import betweenness as net_betweenness
    from .interact import degree_centrality

    size: dict[int, int] = {}
    degree: dict[int, int] = {}
    betw: dict[int, float] = {}
    member_series: list[tuple[int, frozenset[str]]] = []
    for step, cid in dyn.timeline:
        cover = covers.get(step)
        if cover is None:
            raise ArgumentError(f"no cover available for step {step}")
        sc = cover.by_id(cid)
        net = nets.get(step)
        if net is None:
            raise ArgumentError(f"no interaction network available for step {step}")
        size[step] = len(sc.members)
        degree[step] = degree_centrality(net, cid)
        betw[step] = net_betweenness(net, cid)
        member_series.append((step, sc.members))

    coherence: dict[int, float] = {}
    stability: dict[int, float] = {}
    for (_, prev), (step, cur) in zip(member_series, member_series[1:]):
        stability[step] = jaccard(prev, cur)
        if store is not None:
            coherence[step] = content_similarity(prev, cur, store)
    return MetricsBundle(
        lifespan=len(dyn.timeline),
        size=size,
        degree=degree,
        betweenness=betw,
        coherence=coherence,
        stability=stability,
    )


def flow_graph(covers: Sequence[Cover]) -> dict:
    """Flow-diagram export: step-grouped nodes, shared-paper edges.

    Edges connect communities of consecutive covers and carry the number
    of papers moving between them.
    """
    ordered = sorted(covers, key=lambda c: c.step)
    nodes = [
        {"id": str(c.id), "step": cover.step, "size": len(c.members)}
        for cover in ordered
        for c in cover.communities
    ]
    edges = []
    for prev, cur in zip(ordered, ordered[1:]):
        for a in prev.communities:
            for b in cur.communities:
                shared = len(a.members & b.members)
                if shared:
                    edges.append({"src": str(a.id), "dst": str(b.id), "weight": shared})
    return {"nodes": nodes, "edges": edges}


def export_flow(covers: Sequence[Cover], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(flow_graph(covers), fh, indent=2, sort_keys=True)
        fh.write("\n")


def export_events(events: Iterable[LifecycleEvent], path: str | Path) -> None:
    """Line-delimited event log."""
    with open(path, "w", encoding="utf-8") as fh:
        for e in events:
            rec = {
                "step": e.step,
                "kind": e.kind,
                "dynamic_ids": list(e.dynamic_ids),
                "community_ids": [str(c) for c in e.community_ids],
            }
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
