"""Contextual full-text search built on compression distance.

Documents are indexed as overlapping, size-binned blocks whose compressed
sizes are precomputed.  A query is compared against nearby size bins with
the normalized compression distance; abnormally small distances (robust
lower outliers) vote for their documents, and votes rank the results.
"""

__version__ = "0.1.0"

from .config import EngineConfig
from .corpus import CorpusIndex, IngestConfig
from .distance import SizeCache, ncd
from .engine import QueryResult, query
from .outliers import GTable, estimate_g, hampel_lower, robust_stats

__all__ = [
    "EngineConfig",
    "CorpusIndex",
    "IngestConfig",
    "SizeCache",
    "ncd",
    "QueryResult",
    "query",
    "GTable",
    "estimate_g",
    "hampel_lower",
    "robust_stats",
    "__version__",
]
