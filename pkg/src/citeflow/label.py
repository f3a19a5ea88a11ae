"""Topic labels for step communities from title+abstract bags of words.

Two scores are available. TF-ICF weights a term's frequency in the
community by how few communities at the same step use it. CTD adds an
inverse document frequency factor inside the community, rewarding terms
that concentrate in a few of its papers:

    ctd = tf * ln(n_docs / df) * ln(n_communities / cf)

Natural logarithms throughout; rankings are base-invariant. A term used
by every community at a step scores zero and never reaches a label.
"""

from __future__ import annotations

import logging
import math
import re
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .corpus import Corpus
from .detect import Cover, StepCommunity
from .errors import ArgumentError

log = logging.getLogger(__name__)

_TOKEN = re.compile(r"[a-z0-9]+")
_default_stopwords: frozenset[str] | None = None


def load_stopwords(path: str | Path | None = None) -> frozenset[str]:
    """Load a stopword file (one token per line, '#' comments)."""
    if path is None:
        text = (
            resources.files("citeflow").joinpath("data/stopwords.txt").read_text("utf-8")
        )
    else:
        text = Path(path).read_text("utf-8")
    words = set()
    for line in text.splitlines():
        line = line.strip().lower()
        if line and not line.startswith("#"):
            words.add(line)
    return frozenset(words)


def _stopwords() -> frozenset[str]:
    global _default_stopwords
    if _default_stopwords is None:
        _default_stopwords = load_stopwords()
    return _default_stopwords


def tokenize(text: str, stopwords: frozenset[str] | None = None) -> list[str]:
    """Lowercased alphanumeric tokens of length >= 2, stopwords removed."""
    if stopwords is None:
        stopwords = _stopwords()
    return [
        tok
        for tok in _TOKEN.findall(text.lower())
        if len(tok) >= 2 and tok not in stopwords
    ]


@dataclass(frozen=True)
class TermStats:
    """Counts backing the label scores for one term in one community."""

    term: str
    tf: int  # occurrences across the community's documents
    df: int  # community documents containing the term
    cf: int  # communities at this step containing the term


def _community_docs(
    community: StepCommunity, corpus: Corpus, stopwords: frozenset[str] | None
) -> list[list[str]]:
    docs = []
    for pid in sorted(community.members):
        paper = corpus.papers.get(pid)
        if paper is None:
            raise ArgumentError(f"community member {pid!r} not in corpus")
        docs.append(tokenize(paper.text, stopwords))
    return docs


def _community_terms(
    community: StepCommunity, corpus: Corpus, stopwords: frozenset[str] | None
) -> set[str]:
    terms: set[str] = set()
    for pid in community.members:
        paper = corpus.papers.get(pid)
        if paper is not None:
            terms.update(tokenize(paper.text, stopwords))
    return terms


def term_stats(
    community: StepCommunity,
    cover: Cover,
    corpus: Corpus,
    stopwords: frozenset[str] | None = None,
) -> dict[str, TermStats]:
    """TF/DF within the community and CF across the cover, per term."""
    docs = _community_docs(community, corpus, stopwords)
    tf: Counter[str] = Counter()
    df: Counter[str] = Counter()
    for doc in docs:
        tf.update(doc)
        df.update(set(doc))
    cf: Counter[str] = Counter()
    for other in cover.communities:
        cf.update(_community_terms(other, corpus, stopwords))
    return {
        term: TermStats(term=term, tf=tf[term], df=df[term], cf=cf[term])
        for term in tf
    }


def tficf(
    community: StepCommunity,
    cover: Cover,
    corpus: Corpus,
    stopwords: frozenset[str] | None = None,
) -> list[tuple[str, float]]:
    """Rank the community's terms by TF * ln(n_communities / CF).

    Descending score, ties alphabetical. Empty-text communities yield an
    empty ranking with a warning.
    """
    stats = term_stats(community, cover, corpus, stopwords)
    if not stats:
        log.warning("community %s has no text to label", community.id)
        return []
    n_comms = len(cover.communities)
    ranked = [
        (term, s.tf * math.log(n_comms / s.cf)) for term, s in stats.items()
    ]
    ranked.sort(key=lambda pair: (-pair[1], pair[0]))
    return ranked


def ctd(
    term: str,
    community: StepCommunity,
    cover: Cover,
    corpus: Corpus,
    stopwords: frozenset[str] | None = None,
) -> float:
    """Score one term of the community by TF * IDF * ICF."""
    stats = term_stats(community, cover, corpus, stopwords)
    if term not in stats:
        raise ArgumentError(f"term {term!r} does not occur in community {community.id}")
    s = stats[term]
    n_docs = len(community.members)
    n_comms = len(cover.communities)
    return s.tf * math.log(n_docs / s.df) * math.log(n_comms / s.cf)


def ctd_ranking(
    community: StepCommunity,
    cover: Cover,
    corpus: Corpus,
    stopwords: frozenset[str] | None = None,
) -> list[tuple[str, float]]:
    """Rank all of the community's terms by CTD (same tie rule as tficf)."""
    stats = term_stats(community, cover, corpus, stopwords)
    if not stats:
        log.warning("community %s has no text to label", community.id)
        return []
    n_docs = len(community.members)
    n_comms = len(cover.communities)
    ranked = [
        (term, s.tf * math.log(n_docs / s.df) * math.log(n_comms / s.cf))
        for term, s in stats.items()
    ]
    ranked.sort(key=lambda pair: (-pair[1], pair[0]))
    return ranked


def label_community(
    community: StepCommunity,
    cover: Cover,
    corpus: Corpus,
    n: int = 5,
    method: str = "tficf",
    stopwords: frozenset[str] | None = None,
) -> list[str]:
    """Top-n positively scored terms for the community.

    Terms with score <= 0 (used by every community, or spread over every
    document under ctd) are never labels. Fewer than n qualifying terms
    yield a shorter list.
    """
    if n < 1:
        raise ArgumentError(f"n must be >= 1, got {n}")
    if method == "tficf":
        ranked = tficf(community, cover, corpus, stopwords)
    elif method == "ctd":
        ranked = ctd_ranking(community, cover, corpus, stopwords)
    else:
        raise ArgumentError(f"unknown label method {method!r}")
    return [term for term, score in ranked if score > 0][:n]


def format_label(terms: list[str]) -> str:
    """Slash-joined display form, e.g. ``covid/coronavirus/pneumonia``."""
    return "/".join(terms)
