"""Synthetic cumulative citation networks with planted ground truth.

A scenario plants communities with per-step growth schedules, life-cycle
events (split, merge, dissolve, dormancy) at named steps, citation
probabilities, and embedding centres. Generation emits a corpus, the
ground-truth covers, an embedding store, and the expected life-cycle
event log, all in the formats the rest of the pipeline consumes.

The expected events are derived by replaying the matching rules directly
over the planted member sets (a self-contained evaluator, independent of
the tracker), and generation fails up front if the schedule cannot
produce the intended events at the requested matching threshold.

Synthetic citations only ever point backward in publication time, so the
generated corpora always satisfy snapshot nesting. Everything is driven
by one seeded generator: fixed seed, byte-identical output.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .content import EmbeddingStore, save_embeddings
from .corpus import Corpus, Paper, save_corpus
from .detect import CommunityId, Cover, export_cover
from .errors import ValidationError

NormalizedEvent = tuple[int, str, tuple[CommunityId, ...], int]


@dataclass(frozen=True)
class PlantedCommunity:
    """One planted community and its growth schedule.

    Split children and merge targets receive their first roster from the
    event (a partition slice or a union), so their initial_size is unused.
    """

    id: str
    start: int
    initial_size: int
    growth: int = 0  # new papers per present step after the first
    intra_p: float = 0.3
    centre: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.initial_size < 1:
            raise ValidationError(f"community {self.id}: initial size must be >= 1")
        if not (0.0 <= self.intra_p <= 1.0):
            raise ValidationError(f"community {self.id}: intra_p outside [0, 1]")


@dataclass(frozen=True)
class SplitEvent:
    step: int
    parent: str
    children: tuple[str, ...]


@dataclass(frozen=True)
class MergeEvent:
    step: int
    sources: tuple[str, ...]
    target: str


@dataclass(frozen=True)
class DissolveEvent:
    step: int
    community: str


@dataclass(frozen=True)
class DormancyEvent:
    community: str
    steps: tuple[int, ...]


ScheduledEvent = SplitEvent | MergeEvent | DissolveEvent | DormancyEvent


@dataclass(frozen=True)
class Scenario:
    """Declarative description of a synthetic citation network."""

    first: int
    last: int
    communities: tuple[PlantedCommunity, ...]
    events: tuple[ScheduledEvent, ...] = ()
    inter_p: Mapping[tuple[str, str], float] = field(default_factory=dict)
    seed: int = 0
    embedding_dim: int = 8
    embedding_noise: float = 0.05
    match_threshold: float = 0.2

    def __post_init__(self):
        if self.first > self.last:
            raise ValidationError(f"step range [{self.first}, {self.last}] is empty")
        ids = [c.id for c in self.communities]
        if len(ids) != len(set(ids)):
            raise ValidationError("planted community ids must be unique")
        for p in self.inter_p.values():
            if not (0.0 <= p <= 1.0):
                raise ValidationError("interaction probabilities must be in [0, 1]")
        if self.embedding_dim < 2:
            raise ValidationError("embedding dimension must be >= 2")

    def to_dict(self) -> dict:
        events = []
        for e in self.events:
            if isinstance(e, SplitEvent):
                events.append(
                    {"kind": "split", "step": e.step, "parent": e.parent,
                     "children": list(e.children)}
                )
            elif isinstance(e, MergeEvent):
                events.append(
                    {"kind": "merge", "step": e.step, "sources": list(e.sources),
                     "target": e.target}
                )
            elif isinstance(e, DissolveEvent):
                events.append({"kind": "dissolve", "step": e.step, "community": e.community})
            else:
                events.append(
                    {"kind": "dormancy", "community": e.community, "steps": list(e.steps)}
                )
        return {
            "first": self.first,
            "last": self.last,
            "seed": self.seed,
            "embedding_dim": self.embedding_dim,
            "embedding_noise": self.embedding_noise,
            "match_threshold": self.match_threshold,
            "communities": [
                {
                    "id": c.id,
                    "start": c.start,
                    "initial_size": c.initial_size,
                    "growth": c.growth,
                    "intra_p": c.intra_p,
                    **({"centre": list(c.centre)} if c.centre is not None else {}),
                }
                for c in self.communities
            ],
            "events": events,
            "inter_p": [
                {"src": i, "dst": j, "p": p} for (i, j), p in sorted(self.inter_p.items())
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Scenario":
        events: list[ScheduledEvent] = []
        for e in data.get("events", ()):
            kind = e.get("kind")
            if kind == "split":
                events.append(SplitEvent(e["step"], e["parent"], tuple(e["children"])))
            elif kind == "merge":
                events.append(MergeEvent(e["step"], tuple(e["sources"]), e["target"]))
            elif kind == "dissolve":
                events.append(DissolveEvent(e["step"], e["community"]))
            elif kind == "dormancy":
                events.append(DormancyEvent(e["community"], tuple(e["steps"])))
            else:
                raise ValidationError(f"unknown scenario event kind {kind!r}")
        communities = tuple(
            PlantedCommunity(
                id=c["id"],
                start=c["start"],
                initial_size=c["initial_size"],
                growth=c.get("growth", 0),
                intra_p=c.get("intra_p", 0.3),
                centre=tuple(c["centre"]) if c.get("centre") is not None else None,
            )
            for c in data["communities"]
        )
        inter = {(e["src"], e["dst"]): float(e["p"]) for e in data.get("inter_p", ())}
        return cls(
            first=data["first"],
            last=data["last"],
            communities=communities,
            events=tuple(events),
            inter_p=inter,
            seed=data.get("seed", 0),
            embedding_dim=data.get("embedding_dim", 8),
            embedding_noise=data.get("embedding_noise", 0.05),
            match_threshold=data.get("match_threshold", 0.2),
        )

    @classmethod
    def from_json(cls, path: str | Path) -> "Scenario":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


@dataclass
class GroundTruth:
    """Everything a scenario generates, in pipeline-ready form."""

    scenario: Scenario
    corpus: Corpus
    covers: dict[int, Cover]
    store: EmbeddingStore
    events: Counter  # multiset of NormalizedEvent
    community_ids: dict[tuple[int, str], CommunityId]  # (step, planted id) -> cover id

    def cover_list(self) -> list[Cover]:
        return [self.covers[s] for s in sorted(self.covers)]


def normalize_events(events) -> Counter:
    """Project tracker events onto comparable (step, kind, scs, arity) tuples.

    Arity counts the dynamic communities an event touches: merge events
    carry the number of fronts absorbed, everything else counts one.
    """
    out: Counter = Counter()
    for e in events:
        arity = len(e.dynamic_ids) if e.kind == "merge" else 1
        out[(e.step, e.kind, tuple(sorted(e.community_ids)), arity)] += 1
    return out


def _derive_truth(covers: Sequence[Cover], threshold: float) -> Counter:
    """Replay the matching rules over planted covers.

    Kept deliberately separate from the tracker: plain front records,
    inline Jaccard, no shared state types.
    """
    fronts: list[dict] = []  # {members, last_sc, last_step}
    truth: Counter = Counter()
    for cover in covers:
        sc_matches: dict[CommunityId, list[int]] = {c.id: [] for c in cover.communities}
        front_matches: list[list[CommunityId]] = [[] for _ in fronts]
        for fi, front in enumerate(fronts):
            for c in cover.communities:
                inter = len(front["members"] & c.members)
                union = len(front["members"] | c.members)
                if union and inter / union > threshold:
                    sc_matches[c.id].append(fi)
                    front_matches[fi].append(c.id)
        members_of = {c.id: c.members for c in cover.communities}
        survivors: list[dict] = []
        for fi, front in enumerate(fronts):
            got = front_matches[fi]
            if not got:
                truth[(cover.step, "dormancy", (front["last_sc"],), 1)] += 1
                survivors.append(front)
                continue
            if len(got) >= 2:
                truth[(cover.step, "split", tuple(sorted(got)), 1)] += 1
            for sc_id in got:
                survivors.append(
                    {"members": members_of[sc_id], "last_sc": sc_id, "last_step": cover.step}
                )
        for c in cover.communities:
            m = len(sc_matches[c.id])
            if m == 0:
                truth[(cover.step, "birth", (c.id,), 1)] += 1
                survivors.append(
                    {"members": c.members, "last_sc": c.id, "last_step": cover.step}
                )
            elif m == 1:
                fi = sc_matches[c.id][0]
                if len(front_matches[fi]) == 1:
                    truth[(cover.step, "continuation", (c.id,), 1)] += 1
            else:
                truth[(cover.step, "merge", (c.id,), m)] += 1
        fronts = survivors
    if covers:
        final = covers[-1].step
        for front in fronts:
            if front["last_step"] < final:
                truth[(front["last_step"], "death", (front["last_sc"],), 1)] += 1
    return truth


class _Builder:
    """Stateful helper running one generation pass."""

    def __init__(self, scenario: Scenario):
        self.sc = scenario
        self.rng = np.random.default_rng(scenario.seed)
        self.by_id = {c.id: c for c in scenario.communities}
        self.paper_year: dict[str, int] = {}
        self.paper_home: dict[str, str] = {}
        self.counter = 0

    def new_papers(self, count: int, step: int, home: str) -> list[str]:
        ids = []
        for _ in range(count):
            self.counter += 1
            pid = f"p{self.counter:05d}"
            self.paper_year[pid] = step
            self.paper_home[pid] = home
            ids.append(pid)
        return ids

    def schedule(self) -> tuple[dict[str, list[int]], dict[str, tuple], dict[str, set[int]]]:
        """Presence steps, per-community origin, and dormancy steps."""
        sc = self.sc
        origin: dict[str, tuple] = {c.id: ("fresh",) for c in sc.communities}
        departure: dict[str, int] = {}
        dormancy: dict[str, set[int]] = {c.id: set() for c in sc.communities}

        def community(cid: str, what: str) -> PlantedCommunity:
            if cid not in self.by_id:
                raise ValidationError(f"{what} references unknown community {cid!r}")
            return self.by_id[cid]

        def depart(cid: str, step: int, what: str):
            if cid in departure:
                raise ValidationError(f"community {cid!r} departs twice ({what})")
            departure[cid] = step

        for e in sc.events:
            if isinstance(e, SplitEvent):
                parent = community(e.parent, "split")
                if len(e.children) < 2:
                    raise ValidationError(f"split of {e.parent!r} needs >= 2 children")
                if not (parent.start < e.step <= sc.last):
                    raise ValidationError(
                        f"split of {e.parent!r} at {e.step} outside its lifetime"
                    )
                depart(e.parent, e.step, "split")
                for child_id in e.children:
                    child = community(child_id, "split child")
                    if child.start != e.step:
                        raise ValidationError(
                            f"split child {child_id!r} must start at step {e.step}"
                        )
                    origin[child_id] = ("split", e.parent, e.children)
            elif isinstance(e, MergeEvent):
                target = community(e.target, "merge target")
                if len(e.sources) < 2:
                    raise ValidationError(f"merge into {e.target!r} needs >= 2 sources")
                if target.start != e.step:
                    raise ValidationError(
                        f"merge target {e.target!r} must start at step {e.step}"
                    )
                for src in e.sources:
                    source = community(src, "merge source")
                    if source.start >= e.step:
                        raise ValidationError(
                            f"merge source {src!r} does not predate step {e.step}"
                        )
                    depart(src, e.step, "merge")
                origin[e.target] = ("merge", e.sources)
            elif isinstance(e, DissolveEvent):
                c = community(e.community, "dissolve")
                if not (c.start < e.step <= sc.last):
                    raise ValidationError(
                        f"dissolve of {e.community!r} at {e.step} outside its lifetime"
                    )
                depart(e.community, e.step, "dissolve")
            else:
                c = community(e.community, "dormancy")
                for step in e.steps:
                    if not (c.start < step <= sc.last):
                        raise ValidationError(
                            f"dormancy of {e.community!r} at {step} outside its lifetime"
                        )
                dormancy[e.community].update(e.steps)

        present: dict[str, list[int]] = {}
        for c in sc.communities:
            if not (sc.first <= c.start <= sc.last):
                raise ValidationError(
                    f"community {c.id!r} starts at {c.start}, outside the step range"
                )
            stop = departure.get(c.id, sc.last + 1)
            steps = [
                s
                for s in range(c.start, min(stop, sc.last + 1))
                if s not in dormancy[c.id]
            ]
            if not steps:
                raise ValidationError(f"community {c.id!r} is never present")
            present[c.id] = steps
        return present, origin, dormancy

    def build_rosters(
        self, present: dict[str, list[int]], origin: dict[str, tuple]
    ) -> tuple[dict[int, dict[str, frozenset[str]]], dict[str, frozenset[str]]]:
        """Member sets per step, plus intra-community citations as we go."""
        sc = self.sc
        rosters: dict[int, dict[str, frozenset[str]]] = {
            s: {} for s in range(sc.first, sc.last + 1)
        }
        latest: dict[str, frozenset[str]] = {}
        self.edges: list[tuple[str, str]] = []

        def cite_intra(new_ids: list[str], pool: frozenset[str], p: float, step: int):
            if p <= 0.0 or not pool:
                return
            targets = sorted(t for t in pool if self.paper_year[t] < step)
            for u in new_ids:
                if not targets:
                    break
                draws = self.rng.random(len(targets))
                for v, r in zip(targets, draws):
                    if r < p:
                        self.edges.append((u, v))

        for step in range(sc.first, sc.last + 1):
            for cid in sorted(self.by_id):
                if step not in present[cid]:
                    continue
                c = self.by_id[cid]
                if step == present[cid][0]:
                    how = origin[cid]
                    if how[0] == "split":
                        parent_members = sorted(latest[how[1]])
                        children = how[2]
                        k = children.index(cid)
                        n = len(children)
                        lo = k * len(parent_members) // n
                        hi = (k + 1) * len(parent_members) // n
                        members = frozenset(parent_members[lo:hi])
                        if not members:
                            raise ValidationError(
                                f"split child {cid!r} would receive no papers"
                            )
                    elif how[0] == "merge":
                        members = frozenset().union(*(latest[s] for s in how[1]))
                    else:
                        members = frozenset(self.new_papers(c.initial_size, step, cid))
                else:
                    base = latest[cid]
                    batch = self.new_papers(c.growth, step, cid) if c.growth else []
                    cite_intra(batch, base, c.intra_p, step)
                    members = base | frozenset(batch)
                latest[cid] = members
                rosters[step][cid] = members
        return rosters, latest

    def cite_inter(self, final_rosters: dict[str, frozenset[str]]):
        sc = self.sc
        for (src_c, dst_c), p in sorted(self.sc.inter_p.items()):
            if p <= 0.0:
                continue
            if src_c not in final_rosters or dst_c not in final_rosters:
                raise ValidationError(
                    f"interaction target ({src_c!r}, {dst_c!r}) references a community "
                    "absent from the final step"
                )
            ri = sorted(final_rosters[src_c])
            rj = sorted(final_rosters[dst_c])
            eligible = [
                (u, v)
                for u in ri
                for v in rj
                if u != v and self.paper_year[u] > self.paper_year[v]
            ]
            expected = p * len(ri) * len(rj)
            if not eligible:
                raise ValidationError(
                    f"no backward-in-time pairs between {src_c!r} and {dst_c!r}"
                )
            q = expected / len(eligible)
            if q > 1.0:
                raise ValidationError(
                    f"interaction target {p} between {src_c!r} and {dst_c!r} is "
                    "unreachable with backward-only citations"
                )
            draws = self.rng.random(len(eligible))
            for (u, v), r in zip(eligible, draws):
                if r < q:
                    self.edges.append((u, v))

    def make_embeddings(self) -> EmbeddingStore:
        sc = self.sc
        centres: dict[str, np.ndarray] = {}
        for cid in sorted(self.by_id):
            c = self.by_id[cid]
            if c.centre is not None:
                vec = np.asarray(c.centre, dtype=np.float64)
                if vec.shape != (sc.embedding_dim,):
                    raise ValidationError(
                        f"centre of {cid!r} has dimension {vec.shape}, "
                        f"expected {sc.embedding_dim}"
                    )
            else:
                vec = self.rng.normal(size=sc.embedding_dim)
                vec = vec / np.linalg.norm(vec)
            centres[cid] = vec
        vectors = {}
        for pid in sorted(self.paper_year):
            noise = self.rng.normal(0.0, sc.embedding_noise, sc.embedding_dim)
            vectors[pid] = centres[self.paper_home[pid]] + noise
        return EmbeddingStore(vectors)

    def make_papers(self) -> list[Paper]:
        vocab = {
            cid: [f"{''.join(ch for ch in cid.lower() if ch.isalnum())}term{k}" for k in range(8)]
            for cid in sorted(self.by_id)
        }
        papers = []
        for pid in sorted(self.paper_year):
            words = vocab[self.paper_home[pid]]
            picks = self.rng.integers(0, len(words), size=6)
            title = f"{words[picks[0]]} {words[picks[1]]} research"
            abstract = " ".join(words[i] for i in picks[2:]) + " paper study"
            papers.append(
                Paper(id=pid, year=self.paper_year[pid], title=title, abstract=abstract)
            )
        return papers


def generate(scenario: Scenario) -> GroundTruth:
    """Run a scenario: corpus, covers, embeddings, and expected events."""
    builder = _Builder(scenario)
    present, origin, _ = builder.schedule()
    rosters, latest = builder.build_rosters(present, origin)
    builder.cite_inter({cid: latest[cid] for cid in present if scenario.last in present[cid]})

    covers: dict[int, Cover] = {}
    community_ids: dict[tuple[int, str], CommunityId] = {}
    for step in range(scenario.first, scenario.last + 1):
        ordered = sorted(rosters[step])
        covers[step] = Cover.build(step, [rosters[step][cid] for cid in ordered])
        for index, cid in enumerate(ordered):
            community_ids[(step, cid)] = CommunityId(step, index)

    cover_seq = [covers[s] for s in sorted(covers)]
    truth = _derive_truth(cover_seq, scenario.match_threshold)
    _check_intended(scenario, present, truth, community_ids)

    store = builder.make_embeddings()
    papers = builder.make_papers()
    corpus = Corpus.from_records(papers, builder.edges)
    return GroundTruth(
        scenario=scenario,
        corpus=corpus,
        covers=covers,
        store=store,
        events=truth,
        community_ids=community_ids,
    )


def _check_intended(
    scenario: Scenario,
    present: dict[str, list[int]],
    truth: Counter,
    community_ids: dict[tuple[int, str], CommunityId],
) -> None:
    """Fail generation when the schedule cannot produce its own events."""

    def expect(event: NormalizedEvent, label: str):
        if truth[event] < 1:
            raise ValidationError(f"infeasible schedule: {label} not realised ({event})")

    for e in scenario.events:
        if isinstance(e, SplitEvent):
            scs = tuple(sorted(community_ids[(e.step, c)] for c in e.children))
            expect((e.step, "split", scs, 1), f"split of {e.parent!r} at {e.step}")
        elif isinstance(e, MergeEvent):
            sc = community_ids[(e.step, e.target)]
            expect(
                (e.step, "merge", (sc,), len(e.sources)),
                f"merge into {e.target!r} at {e.step}",
            )
        elif isinstance(e, DissolveEvent):
            last_step = present[e.community][-1]
            sc = community_ids[(last_step, e.community)]
            expect(
                (last_step, "death", (sc,), 1), f"dissolve of {e.community!r}"
            )
        else:
            for step in sorted(e.steps):
                before = [s for s in present[e.community] if s < step]
                sc = community_ids[(before[-1], e.community)]
                expect(
                    (step, "dormancy", (sc,), 1),
                    f"dormancy of {e.community!r} at {step}",
                )
    for cid, steps in present.items():
        start = steps[0]
        if ("fresh",) == _origin_of(scenario, cid):
            expect(
                (start, "birth", (community_ids[(start, cid)],), 1),
                f"birth of {cid!r} at {start}",
            )


def _origin_of(scenario: Scenario, cid: str) -> tuple:
    for e in scenario.events:
        if isinstance(e, SplitEvent) and cid in e.children:
            return ("split", e.parent)
        if isinstance(e, MergeEvent) and cid == e.target:
            return ("merge", e.sources)
    return ("fresh",)


def save_ground_truth(gt: GroundTruth, out_dir: str | Path) -> dict[str, str]:
    """Write corpus, covers, embeddings and expected events under out_dir."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "covers").mkdir(exist_ok=True)
    paths: dict[str, str] = {}
    save_corpus(gt.corpus, out / "corpus.jsonl")
    paths["corpus"] = "corpus.jsonl"
    save_embeddings(gt.store, out / "embeddings.jsonl")
    paths["embeddings"] = "embeddings.jsonl"
    for step, cover in sorted(gt.covers.items()):
        export_cover(cover, out / "covers" / f"cover_{step}.txt")
        paths[f"cover_{step}"] = f"covers/cover_{step}.txt"
    with open(out / "truth_events.jsonl", "w", encoding="utf-8") as fh:
        for (step, kind, scs, arity), count in sorted(gt.events.items()):
            rec = {
                "step": step,
                "kind": kind,
                "community_ids": [str(c) for c in scs],
                "arity": arity,
                "count": count,
            }
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
    paths["truth_events"] = "truth_events.jsonl"
    return paths


def tracking_scenario(seed: int = 0) -> Scenario:
    """A scenario exercising every life-cycle event kind.

    Plants staggered births, one split, one merge, one dormancy with a
    return, and one death over seven steps; sizes vary with the seed.
    """
    rng = np.random.default_rng(seed)
    size = lambda base: int(base + rng.integers(0, 5))
    first, last = 2000, 2006
    communities = (
        PlantedCommunity("grow", first, size(14), growth=3),
        PlantedCommunity("splitter", first, size(16), growth=2),
        PlantedCommunity("splita", 2003, 1, growth=2),
        PlantedCommunity("splitb", 2003, 1, growth=2),
        PlantedCommunity("mrgx", first, size(12), growth=2),
        PlantedCommunity("mrgy", first, size(12), growth=2),
        PlantedCommunity("merged", 2004, 1, growth=2),
        PlantedCommunity("napper", first, size(12), growth=2),
        PlantedCommunity("fader", first, size(12), growth=2),
        PlantedCommunity("late", 2002, size(12), growth=2),
    )
    events = (
        SplitEvent(2003, "splitter", ("splita", "splitb")),
        MergeEvent(2004, ("mrgx", "mrgy"), "merged"),
        DormancyEvent("napper", (2002, 2003)),
        DissolveEvent(2002, "fader"),
    )
    return Scenario(
        first=first,
        last=last,
        communities=communities,
        events=events,
        seed=seed,
    )


def silo_gap_scenario(seed: int = 0) -> Scenario:
    """A scenario with one knowledge silo and one planted knowledge gap.

    The silo has no interactions at all. The gap pair shares an embedding
    centre and mirrors its citation behaviour towards three hub
    communities, but the pair itself never cites each other; every other
    pair interacts in proportion to its content similarity.
    """
    rng = np.random.default_rng(seed)
    dim = 8
    e1 = np.zeros(dim)
    e1[0] = 1.0
    def on_angle(deg: float) -> tuple[float, ...]:
        rad = np.deg2rad(deg)
        vec = np.zeros(dim)
        vec[0], vec[1] = np.cos(rad), np.sin(rad)
        return tuple(vec)

    size = lambda base: int(base + rng.integers(0, 4))
    first, last = 2000, 2003
    communities = (
        PlantedCommunity("gapa", first, size(10), growth=4, centre=tuple(e1)),
        PlantedCommunity("gapb", first, size(10), growth=4, centre=tuple(e1)),
        PlantedCommunity("hub1", first, size(10), growth=4, centre=on_angle(30)),
        PlantedCommunity("hub2", first, size(10), growth=4, centre=on_angle(55)),
        PlantedCommunity("hub3", first, size(10), growth=4, centre=on_angle(80)),
        PlantedCommunity("quiet", first, size(10), growth=3),
    )
    centres = {c.id: np.asarray(c.centre) for c in communities if c.centre is not None}
    hubs = ("hub1", "hub2", "hub3")
    inter: dict[tuple[str, str], float] = {}

    def target(a: str, b: str) -> float:
        sim = float(np.dot(centres[a], centres[b]))
        return 0.01 + 0.05 * max(sim, 0.0)

    # the planted gap: no (gapa, gapb) entry, so no citations either way
    for g in ("gapa", "gapb"):
        for h in hubs:
            p = target(g, h)
            inter[(g, h)] = p / 2
            inter[(h, g)] = p / 2
    for i, hi in enumerate(hubs):
        for hj in hubs[i + 1 :]:
            p = target(hi, hj)
            inter[(hi, hj)] = p / 2
            inter[(hj, hi)] = p / 2
    return Scenario(
        first=first,
        last=last,
        communities=communities,
        inter_p=inter,
        seed=seed,
        embedding_noise=0.04,
    )
