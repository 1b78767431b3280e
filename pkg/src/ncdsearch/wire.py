"""Wire format shared by the CLI JSON output and the HTTP service.

Field names here are the public contract consumed by the web UI; see the
README for the documented schema.
"""

from __future__ import annotations

import hashlib

from .corpus import CorpusIndex
from .engine import QueryResult


def query_fingerprint(query: bytes, alpha: float) -> str:
    """Stable id for one (query text, alpha) pair."""
    h = hashlib.sha256()
    h.update(query)
    h.update(b"\x00")
    h.update(repr(float(alpha)).encode())
    return h.hexdigest()[:16]


def result_to_dict(
    result: QueryResult,
    query: bytes,
    max_blocks: int,
) -> dict:
    """Serialize a query result; flagged blocks are listed best-first and
    truncated to ``max_blocks`` for display."""
    flagged = sorted(
        result.flagged,
        key=lambda f: (f.distance, f.block.doc_id, f.block.bin, f.block.ordinal),
    )[:max_blocks]
    return {
        "query_id": query_fingerprint(query, result.alpha),
        "alpha": result.alpha,
        "flagged": [
            {
                "doc_id": f.block.doc_id,
                "bin": f.block.bin,
                "ordinal": f.block.ordinal,
                "start": f.block.start,
                "end": f.block.end,
                "ncd": f.distance,
                "unit": f.unit_ordinal,
            }
            for f in flagged
        ],
        "votes": dict(sorted(result.votes.items())),
        "ranking": list(result.ranking),
        "highlights": {
            doc_id: [[s, e] for s, e in spans]
            for doc_id, spans in sorted(result.highlights.items())
        },
    }


def document_to_dict(index: CorpusIndex, doc_id: str, with_text: bool = False) -> dict:
    rec = index.documents[doc_id]
    payload = {
        "doc_id": rec.doc_id,
        "name": rec.name,
        "byte_length": rec.byte_length,
        "subject_labels": sorted(rec.subject_labels),
        "source_uri": rec.source_uri,
    }
    if with_text:
        payload["text"] = index.document_bytes(doc_id).decode("utf-8", errors="replace")
    return payload
