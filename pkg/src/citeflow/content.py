"""Embedding-backed content metrics for communities.

Vectors arrive from a line-delimited file produced offline (one record per
paper: id plus a numeric array); the file's dimension is inferred from the
first record and enforced on the rest. All metrics are cosine-based, so
they are invariant to positive rescaling of the store. Zero vectors make
cosines undefined and raise rather than silently scoring 0.
"""

from __future__ import annotations

import json
import logging
import math
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .corpus import SnapshotGraph
from .detect import StepCommunity
from .errors import ParseError, UndefinedMetricError, ValidationError

log = logging.getLogger(__name__)


class EmbeddingStore:
    """Immutable map from paper id to a float vector of fixed dimension."""

    def __init__(self, vectors: Mapping[str, Iterable[float]]):
        if not vectors:
            raise ValidationError("embedding store is empty")
        self.vectors: dict[str, np.ndarray] = {}
        dim: int | None = None
        for pid, raw in vectors.items():
            vec = np.asarray(raw, dtype=np.float64)
            if vec.ndim != 1:
                raise ValidationError(f"embedding for {pid!r} is not a flat vector")
            if dim is None:
                dim = vec.shape[0]
                if dim < 2:
                    raise ValidationError(f"embedding dimension must be >= 2, got {dim}")
            elif vec.shape[0] != dim:
                raise ValidationError(
                    f"embedding for {pid!r} has dimension {vec.shape[0]}, expected {dim}"
                )
            if not np.isfinite(vec).all():
                raise ValidationError(f"embedding for {pid!r} has non-finite values")
            vec.flags.writeable = False
            self.vectors[pid] = vec
        self.dimension: int = int(dim)

    def __contains__(self, pid: str) -> bool:
        return pid in self.vectors

    def __len__(self) -> int:
        return len(self.vectors)

    def get(self, pid: str) -> np.ndarray | None:
        return self.vectors.get(pid)


def load_embeddings(path: str | Path) -> EmbeddingStore:
    """Read an embedding file, validating dimension and finiteness."""
    vectors: dict[str, list[float]] = {}
    dim: int | None = None
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            raw = raw.strip()
            if not raw:
                continue
            try:
                rec = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON ({exc.msg})", line=lineno) from exc
            if "id" not in rec or "vector" not in rec:
                raise ParseError("embedding record needs id and vector", line=lineno)
            vec = rec["vector"]
            if dim is None:
                dim = len(vec)
            elif len(vec) != dim:
                raise ParseError(
                    f"record {rec['id']!r} has dimension {len(vec)}, expected {dim}",
                    line=lineno,
                )
            for x in vec:
                if not isinstance(x, (int, float)) or not math.isfinite(x):
                    raise ParseError(
                        f"record {rec['id']!r} has non-finite component", line=lineno
                    )
            vectors[str(rec["id"])] = vec
    if not vectors:
        raise ValidationError(f"no embedding records in {path}")
    return EmbeddingStore(vectors)


def save_embeddings(store: EmbeddingStore, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for pid in sorted(store.vectors):
            rec = {"id": pid, "vector": [float(x) for x in store.vectors[pid]]}
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def _covered(members: Iterable[str], store: EmbeddingStore) -> list[str]:
    """Members that have vectors; warn about the rest."""
    members = sorted(members)
    covered = [m for m in members if m in store]
    skipped = len(members) - len(covered)
    if skipped:
        log.warning("%d member(s) lack embeddings and were skipped", skipped)
    return covered


def _cosine(u: np.ndarray, v: np.ndarray) -> float:
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise UndefinedMetricError("cosine with a zero vector is undefined")
    return float(np.dot(u, v) / (nu * nv))


def centroid(community, store: EmbeddingStore) -> np.ndarray:
    """Componentwise mean of the members' vectors.

    Members without vectors are skipped with a warning; a community with
    no embedded members at all is an error.
    """
    members = community.members if isinstance(community, StepCommunity) else community
    covered = _covered(members, store)
    if not covered:
        raise UndefinedMetricError("no community member has an embedding")
    return np.mean([store.vectors[m] for m in covered], axis=0)


def topic_coherence(community, store: EmbeddingStore) -> float:
    """Mean cosine similarity between member vectors and their centroid."""
    members = community.members if isinstance(community, StepCommunity) else community
    covered = _covered(members, store)
    if not covered:
        raise UndefinedMetricError("no community member has an embedding")
    center = np.mean([store.vectors[m] for m in covered], axis=0)
    if float(np.linalg.norm(center)) == 0.0:
        raise UndefinedMetricError("community centroid is the zero vector")
    return float(np.mean([_cosine(store.vectors[m], center) for m in covered]))


def content_similarity(a: Iterable[str], b: Iterable[str], store: EmbeddingStore) -> float:
    """Mean cosine over all cross pairs between two paper-id sets."""
    ca = _covered(set(a), store)
    cb = _covered(set(b), store)
    if not ca or not cb:
        side = "first" if not ca else "second"
        raise UndefinedMetricError(f"the {side} id set has no embedded members")
    total = 0.0
    for u in ca:
        for v in cb:
            total += _cosine(store.vectors[u], store.vectors[v])
    return total / (len(ca) * len(cb))


def citation_density(
    community, graph: SnapshotGraph, undirected: bool = False
) -> float:
    """Internal citations divided by possible connections.

    Citations are directed, so the default denominator is n*(n-1); pass
    undirected=True to halve it.
    """
    members = community.members if isinstance(community, StepCommunity) else frozenset(community)
    n = len(members)
    if n < 2:
        raise UndefinedMetricError(
            f"density undefined for a community of {n} member(s)"
        )
    internal = sum(
        1 for e in graph.edges if e.src in members and e.dst in members
    )
    possible = n * (n - 1)
    if undirected:
        internal = sum(
            1
            for u, v in graph.undirected_pairs
            if u in members and v in members
        )
        possible //= 2
    return internal / possible
