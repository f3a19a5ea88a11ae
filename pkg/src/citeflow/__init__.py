"""citeflow: research-area life-cycles and knowledge transfer from citations.

Builds cumulative snapshot graphs from a citation corpus, finds
overlapping communities per step, tracks them into dynamic communities
with life-cycle events, measures knowledge transfer through a community
interaction network, and surfaces foundational areas, knowledge silos,
and knowledge gaps.
"""

__version__ = "0.1.0"

from .corpus import (  # noqa: F401
    CitationEdge,
    Corpus,
    Paper,
    SnapshotGraph,
    build_snapshot,
    load_corpus,
    save_corpus,
    snapshot_series,
)
from .detect import (  # noqa: F401
    CommunityId,
    Cover,
    DetectorParams,
    StepCommunity,
    detect,
    fitness,
    grid_search,
    import_cover,
)
from .errors import (  # noqa: F401
    ArgumentError,
    CiteflowError,
    CollinearityError,
    InsufficientDataError,
    ParseError,
    TransportError,
    UndefinedMetricError,
    ValidationError,
)
from .track import DynamicCommunity, LifecycleEvent, jaccard, track_all  # noqa: F401
