"""Query execution: segmentation, bin selection, distance sampling, voting.

A query is segmented into units the same way documents are chunked.  Each
unit is compared, via NCD, against every block of its own size bin, the bin
below and the two bins above.  Within each (unit, bin) distance sample the
lower outliers are flagged; every flagged block casts one vote for its
document.  Documents are ranked by votes (ties broken by their best flagged
distance, then doc id), and the flagged byte ranges become highlights.

Distance collection and flagging are separated so that sweeping alpha (for
ROC curves) reuses one set of samples: flags at a smaller alpha are always a
subset of flags at a larger one, given thresholds from the same table.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

from .config import EngineConfig
from .corpus import Block, CorpusIndex, chunk
from .distance import SizeCache, ncd
from .outliers import GTable, hampel_lower

logger = logging.getLogger(__name__)

MIN_SAMPLE = 3  # below this the outlier statistic is meaningless


@dataclass(frozen=True)
class QueryUnit:
    data: bytes
    bin: int
    ordinal: int


@dataclass
class DistanceSample:
    """Distances from one query unit to every block of one size bin."""

    unit: QueryUnit
    bin: int
    entries: list[tuple[Block, float]]


@dataclass(frozen=True)
class FlaggedBlock:
    block: Block
    distance: float
    unit_ordinal: int


@dataclass
class QueryResult:
    alpha: float
    flagged: list[FlaggedBlock]
    votes: dict[str, int]
    ranking: list[str]
    highlights: dict[str, list[tuple[int, int]]]
    skipped_bins: list[tuple[int, int, int]] = field(default_factory=list)
    # skipped_bins rows: (unit ordinal, bin, sample size)


def segment_query(query: bytes, config: EngineConfig) -> list[QueryUnit]:
    """Split a query into size-binned units.

    Queries up to n_max_bins KB form a single unit in the bin that covers
    their length; longer queries are chunked like documents at the largest
    bin, reusing the corpus overlap setting.
    """
    query = bytes(query)
    if not query:
        raise ValueError("query must not be empty")
    cap = config.n_max_bins * 1024
    if len(query) <= cap:
        bin_k = min(config.n_max_bins, max(1, math.ceil(len(query) / 1024)))
        return [QueryUnit(data=query, bin=bin_k, ordinal=0)]
    units = []
    ranges = chunk(
        query,
        config.n_max_bins,
        config.overlap_fraction,
        config.ingest_config().min_remainder(config.n_max_bins),
    )
    for ordinal, (start, end) in enumerate(ranges):
        piece = query[start:end]
        bin_k = min(config.n_max_bins, max(1, math.ceil(len(piece) / 1024)))
        units.append(QueryUnit(data=piece, bin=bin_k, ordinal=ordinal))
    return units


def candidate_bins(unit_bin: int, n_max_bins: int) -> list[int]:
    """Bins consulted for a unit: its own, the one below, the two above."""
    if not 1 <= unit_bin <= n_max_bins:
        raise ValueError(f"unit bin {unit_bin} outside [1, {n_max_bins}]")
    lo = max(1, unit_bin - 1)
    hi = min(n_max_bins, unit_bin + 2)
    return list(range(lo, hi + 1))


def sample_distances(
    unit: QueryUnit,
    bin_k: int,
    index: CorpusIndex,
    cache: SizeCache | None = None,
) -> DistanceSample:
    """One NCD per block of the bin, in (doc_id, ordinal) order.

    Block-side compressed sizes come from the index; an empty bin yields an
    empty sample, which downstream skips.
    """
    if cache is None:
        cache = SizeCache()
    entries: list[tuple[Block, float]] = []
    for block in index.blocks_in_bin(bin_k):
        data = index.block_bytes(block)
        cache.prime(data, block.bits)
        entries.append((block, ncd(unit.data, data, cache)))
    return DistanceSample(unit=unit, bin=bin_k, entries=entries)


def collect_samples(
    query: bytes, index: CorpusIndex, config: EngineConfig
) -> list[DistanceSample]:
    """All (unit, candidate bin) distance samples for a query.

    Units whose bin exceeds the largest populated bin of the index fall back
    to the largest bins available instead of comparing against nothing.
    """
    populated = [k for k in range(1, config.n_max_bins + 1) if index.blocks_in_bin(k)]
    if not populated:
        return []
    top = populated[-1]
    cache = SizeCache()
    samples = []
    for unit in segment_query(query, config):
        for bin_k in candidate_bins(min(unit.bin, top), top):
            samples.append(sample_distances(unit, bin_k, index, cache))
    return samples


def result_at_alpha(
    samples: list[DistanceSample], alpha: float, gtable: GTable
) -> QueryResult:
    """Flag lower outliers in each sample at the given level and aggregate votes."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    flagged: list[FlaggedBlock] = []
    skipped: list[tuple[int, int, int]] = []
    for sample in samples:
        size = len(sample.entries)
        if size < MIN_SAMPLE:
            skipped.append((sample.unit.ordinal, sample.bin, size))
            logger.debug(
                "skipping bin %d for unit %d: only %d blocks",
                sample.bin,
                sample.unit.ordinal,
                size,
            )
            continue
        if alpha == 0.0:
            continue
        g = gtable.threshold(size, alpha)
        verdict = hampel_lower([d for _, d in sample.entries], g)
        for idx in sorted(verdict.flagged_indices):
            block, dist = sample.entries[idx]
            flagged.append(
                FlaggedBlock(block=block, distance=dist, unit_ordinal=sample.unit.ordinal)
            )
    votes: dict[str, int] = {}
    best: dict[str, float] = {}
    highlights: dict[str, set[tuple[int, int]]] = {}
    for item in flagged:
        doc_id = item.block.doc_id
        votes[doc_id] = votes.get(doc_id, 0) + 1
        if doc_id not in best or item.distance < best[doc_id]:
            best[doc_id] = item.distance
        highlights.setdefault(doc_id, set()).add(item.block.byte_range)
    ranking = sorted(votes, key=lambda d: (-votes[d], best[d], d))
    return QueryResult(
        alpha=alpha,
        flagged=flagged,
        votes=votes,
        ranking=ranking,
        highlights={d: sorted(spans) for d, spans in highlights.items()},
        skipped_bins=skipped,
    )


def query(
    query_bytes: bytes,
    index: CorpusIndex,
    config: EngineConfig,
    gtable: GTable,
    alpha: float | None = None,
) -> QueryResult:
    """End-to-end query at one alpha (defaults to the configured level)."""
    samples = collect_samples(query_bytes, index, config)
    return result_at_alpha(samples, config.alpha if alpha is None else alpha, gtable)
