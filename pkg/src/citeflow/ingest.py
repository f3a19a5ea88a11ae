"""Corpus construction from a scholarly-graph API around a core paper set.

The expansion fetches the core records plus everything they cite or are
cited by (one hop). The retention filter then keeps the core and any
neighbour linked to more than one distinct core paper, in either
direction; a paper citing and cited by the same core paper counts once.

All fetches run through a policy wrapper handling rate limiting, retries,
and a per-request disk cache, so a populated cache makes expansion fully
offline and byte-reproducible. The provider mapping is isolated behind
ScholarRecord; any citation-graph API can be adapted by implementing
``fetch``.
"""

from __future__ import annotations

import hashlib
import json
import logging
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Protocol

from .corpus import Corpus, Paper
from .errors import TransportError, ValidationError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ScholarRecord:
    """Provider-independent view of one paper and its citation links."""

    id: str
    year: int | None
    title: str = ""
    abstract: str = ""
    cites: tuple[str, ...] = ()  # ids this paper cites
    cited_by: tuple[str, ...] = ()  # ids citing this paper

    def __post_init__(self):
        if not self.id:
            raise ValidationError("scholar record id must be non-empty")

    def linked_ids(self) -> set[str]:
        return set(self.cites) | set(self.cited_by)


@dataclass(frozen=True)
class FetchPolicy:
    """Politeness and reliability limits for remote fetching."""

    requests_per_second: float = 5.0
    max_retries: int = 3
    cache_dir: str | Path | None = None

    def __post_init__(self):
        if self.requests_per_second <= 0:
            raise ValidationError("requests_per_second must be positive")
        if self.max_retries < 0:
            raise ValidationError("max_retries must be >= 0")


class ScholarClient(Protocol):
    def fetch(self, paper_id: str) -> ScholarRecord | None:
        """Return the record for ``paper_id`` or None if unknown."""


class _PolicedFetcher:
    """Rate-limited, retrying, disk-cached wrapper around a raw client."""

    def __init__(self, client: ScholarClient, policy: FetchPolicy,
                 sleep: Callable[[float], None] = time.sleep):
        self.client = client
        self.policy = policy
        self.sleep = sleep
        self._last_request = 0.0
        self.cache_dir = Path(policy.cache_dir) if policy.cache_dir else None
        if self.cache_dir:
            self.cache_dir.mkdir(parents=True, exist_ok=True)

    def _cache_path(self, paper_id: str) -> Path:
        digest = hashlib.sha256(paper_id.encode("utf-8")).hexdigest()
        return self.cache_dir / f"{digest}.json"

    def _read_cache(self, paper_id: str) -> ScholarRecord | None | bool:
        """Cached record, None for a cached miss, or False when uncached."""
        if not self.cache_dir:
            return False
        path = self._cache_path(paper_id)
        if not path.exists():
            return False
        data = json.loads(path.read_text("utf-8"))
        if data.get("missing"):
            return None
        return ScholarRecord(
            id=data["id"],
            year=data.get("year"),
            title=data.get("title", ""),
            abstract=data.get("abstract", ""),
            cites=tuple(data.get("cites", ())),
            cited_by=tuple(data.get("cited_by", ())),
        )

    def _write_cache(self, paper_id: str, record: ScholarRecord | None):
        if not self.cache_dir:
            return
        if record is None:
            payload = {"request": paper_id, "missing": True}
        else:
            payload = {
                "request": paper_id,
                "id": record.id,
                "year": record.year,
                "title": record.title,
                "abstract": record.abstract,
                "cites": list(record.cites),
                "cited_by": list(record.cited_by),
            }
        self._cache_path(paper_id).write_text(
            json.dumps(payload, sort_keys=True), "utf-8"
        )

    def _throttle(self):
        interval = 1.0 / self.policy.requests_per_second
        now = time.monotonic()
        wait = self._last_request + interval - now
        if wait > 0:
            self.sleep(wait)
        self._last_request = time.monotonic()

    def fetch(self, paper_id: str) -> ScholarRecord | None:
        cached = self._read_cache(paper_id)
        if cached is not False:
            return cached
        last_error: Exception | None = None
        for attempt in range(self.policy.max_retries + 1):
            if attempt:
                self.sleep(min(2.0**attempt * 0.1, 5.0))
            self._throttle()
            try:
                record = self.client.fetch(paper_id)
            except Exception as exc:  # transport-level failure, retry
                last_error = exc
                log.warning("fetch %s failed (attempt %d): %s", paper_id, attempt + 1, exc)
                continue
            self._write_cache(paper_id, record)
            return record
        raise TransportError(
            f"fetching {paper_id!r} failed after {self.policy.max_retries + 1} "
            f"attempts: {last_error}"
        )


@dataclass
class ExpansionResult:
    """Candidate records from a one-hop expansion."""

    records: dict[str, ScholarRecord]
    skipped: tuple[str, ...]  # core ids the provider did not recognise


def expand_one_hop(
    core_ids: Iterable[str], client: ScholarClient, policy: FetchPolicy | None = None
) -> ExpansionResult:
    """Fetch the core records and every paper linked to them.

    Unknown core ids are recorded in ``skipped`` rather than failing the
    expansion; unknown neighbours are dropped silently. Exhausted retries
    raise TransportError naming the failing id.
    """
    core = sorted(set(core_ids))
    if not core:
        raise ValidationError("core id set must be non-empty")
    fetcher = _PolicedFetcher(client, policy or FetchPolicy())

    records: dict[str, ScholarRecord] = {}
    skipped: list[str] = []
    for pid in core:
        record = fetcher.fetch(pid)
        if record is None:
            skipped.append(pid)
        else:
            records[record.id] = record

    neighbour_ids = sorted(
        {n for r in records.values() for n in r.linked_ids()} - set(records)
    )
    for pid in neighbour_ids:
        record = fetcher.fetch(pid)
        if record is not None:
            records[record.id] = record
    return ExpansionResult(records=records, skipped=tuple(skipped))


def filter_periphery(
    candidates: Iterable[ScholarRecord], core_ids: Iterable[str]
) -> set[str]:
    """Retain the core plus neighbours linked to more than one core paper.

    Links are counted as distinct core papers reached in either
    direction.
    """
    core = set(core_ids)
    retained = set(core)
    for record in candidates:
        if record.id in core:
            continue
        if len(record.linked_ids() & core) >= 2:
            retained.add(record.id)
    return retained


def to_corpus(records: Iterable[ScholarRecord]) -> Corpus:
    """Build a corpus from retained records.

    Records without a publication year are dropped with a warning; edges
    keep only pairs where both endpoints survive.
    """
    by_id: dict[str, ScholarRecord] = {}
    warnings: list[str] = []
    for record in records:
        if record.year is None:
            warnings.append(f"record {record.id} has no year and was dropped")
            log.warning("record %s has no year and was dropped", record.id)
            continue
        by_id[record.id] = record

    papers = [
        Paper(id=r.id, year=r.year, title=r.title, abstract=r.abstract)
        for r in by_id.values()
    ]
    edges: set[tuple[str, str]] = set()
    for r in by_id.values():
        for target in r.cites:
            if target in by_id and target != r.id:
                edges.add((r.id, target))
        for source in r.cited_by:
            if source in by_id and source != r.id:
                edges.add((source, r.id))
    corpus = Corpus.from_records(papers, sorted(edges))
    if warnings:
        corpus = Corpus(corpus.papers, corpus.edges, tuple(warnings) + corpus.warnings)
    return corpus


class SemanticScholarClient:
    """Raw client for the Semantic Scholar Academic Graph API."""

    FIELDS = "title,abstract,year,references.paperId,citations.paperId"

    def __init__(self, base_url: str = "https://api.semanticscholar.org/graph/v1",
                 api_key: str | None = None, timeout: float = 30.0):
        import requests

        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self.session = requests.Session()
        if api_key:
            self.session.headers["x-api-key"] = api_key

    def fetch(self, paper_id: str) -> ScholarRecord | None:
        url = f"{self.base_url}/paper/{paper_id}"
        response = self.session.get(
            url, params={"fields": self.FIELDS}, timeout=self.timeout
        )
        if response.status_code == 404:
            return None
        response.raise_for_status()
        data = response.json()
        refs = [
            r["paperId"] for r in data.get("references") or () if r.get("paperId")
        ]
        cits = [
            c["paperId"] for c in data.get("citations") or () if c.get("paperId")
        ]
        return ScholarRecord(
            id=data.get("paperId") or paper_id,
            year=data.get("year"),
            title=data.get("title") or "",
            abstract=data.get("abstract") or "",
            cites=tuple(refs),
            cited_by=tuple(cits),
        )
