"""Research-question workflows composed from the core modules.

Foundational areas are long-lived dynamic communities that stay central
(by betweenness in the community interaction network) across an early
window. Contemporary areas are large, recent, coherent communities:
average paper age at most six years, strictly more than fifty papers, and
mean coherence above the dataset mean. Transfer matrices report the
symmetrised interaction probabilities between two community lists, scaled
to percentages.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .content import EmbeddingStore, content_similarity
from .corpus import Corpus
from .detect import CommunityId, Cover
from .errors import ArgumentError
from .interact import InteractionNetwork, betweenness
from .track import DynamicCommunity

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class WindowSpec:
    """Closed year range used for windowed rankings."""

    start: int
    end: int

    def __post_init__(self):
        if self.start > self.end:
            raise ArgumentError(f"window [{self.start}, {self.end}] is empty")

    def steps(self) -> range:
        return range(self.start, self.end + 1)


@dataclass(frozen=True)
class FoundationalRow:
    dynamic_id: str
    mean_betweenness: float
    lifespan: int
    mean_coherence: float | None


def foundational(
    dyn_communities: Sequence[DynamicCommunity],
    nets: Mapping[int, InteractionNetwork],
    window: WindowSpec,
    k: int = 10,
    covers: Mapping[int, Cover] | None = None,
    store: EmbeddingStore | None = None,
) -> list[FoundationalRow]:
    """Rank dynamic communities by mean betweenness over the window.

    Steps where a community is absent contribute zero, penalising
    intermittent presence. Ties fall back to lifespan (longer first),
    then id. Mean topic coherence is reported when an embedding store is
    available, as supporting evidence for subject-matter coherence.
    """
    window_steps = [s for s in window.steps() if s in nets]
    if not window_steps:
        raise ArgumentError(
            f"no interaction networks inside window [{window.start}, {window.end}]"
        )

    rows = []
    for dyn in dyn_communities:
        by_step = dict(dyn.timeline)
        total = 0.0
        for step in window_steps:
            cid = by_step.get(step)
            if cid is not None and cid in nets[step]:
                total += betweenness(nets[step], cid)
        score = total / len(list(window.steps()))
        coherence = None
        if store is not None and covers is not None:
            coherence = _mean_timeline_coherence(dyn, covers, store)
        rows.append(
            FoundationalRow(
                dynamic_id=dyn.id,
                mean_betweenness=score,
                lifespan=dyn.lifespan,
                mean_coherence=coherence,
            )
        )
    rows.sort(key=lambda r: (-r.mean_betweenness, -r.lifespan, r.dynamic_id))
    return rows[:k]


def _mean_timeline_coherence(
    dyn: DynamicCommunity, covers: Mapping[int, Cover], store: EmbeddingStore
) -> float | None:
    """Mean of the consecutive-step content-coherence series, if defined."""
    values = []
    previous: frozenset[str] | None = None
    for step, cid in dyn.timeline:
        cover = covers.get(step)
        if cover is None:
            return None
        members = cover.by_id(cid).members
        if previous is not None:
            values.append(content_similarity(previous, members, store))
        previous = members
    return float(np.mean(values)) if values else None


@dataclass(frozen=True)
class ContemporaryRow:
    dynamic_id: str
    size: int
    mean_age: float
    mean_coherence: float | None


def contemporary(
    dyn_communities: Sequence[DynamicCommunity],
    corpus: Corpus,
    ref_year: int,
    covers: Mapping[int, Cover],
    store: EmbeddingStore | None = None,
    max_age: float = 6.0,
    min_size: int = 50,
    stability_floor: float | None = None,
) -> list[ContemporaryRow]:
    """Communities of recent, plentiful, coherent papers.

    Filters on the front: mean paper age (ref_year minus publication
    year) at most ``max_age``, strictly more than ``min_size`` members,
    and mean coherence above ``stability_floor``. A floor of None means
    the mean coherence across all communities that have a defined series.
    Without embeddings the coherence filter is skipped with a notice.
    """
    candidates = []
    coherences: dict[str, float | None] = {}
    for dyn in dyn_communities:
        members = dyn.front_members
        ages = [ref_year - corpus.papers[p].year for p in members if p in corpus.papers]
        if not ages:
            continue
        mean_age = sum(ages) / len(ages)
        coherences[dyn.id] = (
            _mean_timeline_coherence(dyn, covers, store) if store is not None else None
        )
        candidates.append((dyn, len(members), mean_age))

    floor = stability_floor
    if store is None:
        log.info("no embeddings available; coherence filter skipped")
    elif floor is None:
        defined = [c for c in coherences.values() if c is not None]
        floor = float(np.mean(defined)) if defined else None

    rows = []
    for dyn, size, mean_age in candidates:
        if mean_age > max_age or size <= min_size:
            continue
        coherence = coherences[dyn.id]
        if store is not None and floor is not None:
            if coherence is None or coherence <= floor:
                continue
        rows.append(
            ContemporaryRow(
                dynamic_id=dyn.id, size=size, mean_age=mean_age, mean_coherence=coherence
            )
        )
    rows.sort(key=lambda r: (-r.size, r.dynamic_id))
    return rows


@dataclass(frozen=True)
class TransferMatrix:
    """Percentage-scaled symmetrised interactions, rows x columns.

    Cells pairing a community with itself are not meaningful and hold
    NaN.
    """

    rows: tuple[CommunityId, ...]
    cols: tuple[CommunityId, ...]
    values: np.ndarray

    def cell(self, i: CommunityId, j: CommunityId) -> float:
        return float(self.values[self.rows.index(i), self.cols.index(j)])


def transfer_matrix(
    rows: Sequence[CommunityId],
    cols: Sequence[CommunityId],
    net: InteractionNetwork,
) -> TransferMatrix:
    """Percentage interaction between every row and column community."""
    for c in list(rows) + list(cols):
        if c not in net:
            raise ArgumentError(f"community {c} not in interaction network")
    values = np.zeros((len(rows), len(cols)))
    for a, i in enumerate(rows):
        for b, j in enumerate(cols):
            values[a, b] = np.nan if i == j else net.percent(i, j, symmetrise=True)
    return TransferMatrix(tuple(rows), tuple(cols), values)
