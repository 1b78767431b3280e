"""HTTP/JSON service over a loaded corpus.

All endpoints are read-only against an immutable index snapshot; the only
shared mutable state is the threshold table's serialized insert and a small
session cache of recent query results (for the highlights endpoint).  An
ingest endpoint exists for administration but is disabled unless explicitly
enabled at startup.
"""

from __future__ import annotations

import collections
import threading
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import __version__
from .config import EngineConfig
from .corpus import ConfigError, CorpusIndex, DocumentConflictError
from .engine import collect_samples, result_at_alpha
from .outliers import GTable
from .wire import document_to_dict, result_to_dict

RESULT_CACHE_SIZE = 64


class QueryRequest(BaseModel):
    text: str
    alpha: Optional[float] = None
    max_blocks: Optional[int] = None


class IngestRequest(BaseModel):
    doc_id: str
    text: str
    name: Optional[str] = None
    subject_labels: list[str] = []
    source_uri: str = ""


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(
        status_code=status, content={"error": {"code": code, "message": message}}
    )


def prewarm_thresholds(index: CorpusIndex, config: EngineConfig, gtable: GTable) -> None:
    """Simulate thresholds for every populated bin at the default alpha, so
    the first query does not pay the Monte Carlo cost."""
    if not 0.0 < config.alpha < 1.0:
        return
    for bin_k in range(1, config.n_max_bins + 1):
        size = len(index.blocks_in_bin(bin_k))
        if size >= 3:
            gtable.threshold(size, config.alpha)


def create_app(
    index: Optional[CorpusIndex],
    config: Optional[EngineConfig] = None,
    gtable: Optional[GTable] = None,
    enable_admin: bool = False,
    prewarm: bool = False,
    static_dir: Optional[str] = None,
) -> FastAPI:
    config = config or EngineConfig()
    if gtable is None:
        gtable = GTable(replicates=config.gtable_replicates, rng_seed=config.rng_seed)
    if prewarm and index is not None:
        prewarm_thresholds(index, config, gtable)
    # the interactive API browser is disabled so /docs can serve documents
    app = FastAPI(
        title="ncdsearch", version=__version__, docs_url=None, redoc_url=None
    )
    state = {
        "index": index,
        "results": collections.OrderedDict(),
        "lock": threading.Lock(),
    }

    def current_index() -> Optional[CorpusIndex]:
        return state["index"]

    @app.get("/health")
    def health():
        idx = current_index()
        if idx is None:
            return _error(409, "corpus_not_loaded", "no corpus is loaded")
        payload = {"status": "ok", "version": __version__}
        payload.update(idx.stats())
        return payload

    @app.post("/query")
    def run_query(body: QueryRequest):
        idx = current_index()
        if idx is None:
            return _error(409, "corpus_not_loaded", "no corpus is loaded")
        if not body.text:
            return _error(400, "empty_query", "query text must not be empty")
        alpha = config.alpha if body.alpha is None else body.alpha
        if not 0.0 <= alpha <= 1.0:
            return _error(400, "bad_alpha", f"alpha must lie in [0, 1], got {alpha}")
        max_blocks = body.max_blocks or config.max_blocks_shown
        if max_blocks < 1:
            return _error(400, "bad_max_blocks", "max_blocks must be >= 1")
        data = body.text.encode("utf-8")
        samples = collect_samples(data, idx, config)
        result = result_at_alpha(samples, alpha, gtable)
        payload = result_to_dict(result, data, max_blocks)
        with state["lock"]:
            cache = state["results"]
            cache[payload["query_id"]] = payload
            while len(cache) > RESULT_CACHE_SIZE:
                cache.popitem(last=False)
        return payload

    @app.get("/docs")
    def list_documents():
        idx = current_index()
        if idx is None:
            return _error(409, "corpus_not_loaded", "no corpus is loaded")
        return {
            "documents": [
                document_to_dict(idx, doc_id) for doc_id in sorted(idx.documents)
            ]
        }

    @app.get("/docs/{doc_id}")
    def get_document(doc_id: str):
        idx = current_index()
        if idx is None:
            return _error(409, "corpus_not_loaded", "no corpus is loaded")
        if doc_id not in idx.documents:
            return _error(404, "unknown_document", f"no document {doc_id}")
        return document_to_dict(idx, doc_id, with_text=True)

    @app.get("/docs/{doc_id}/highlights")
    def get_highlights(doc_id: str, query_id: str = ""):
        idx = current_index()
        if idx is None:
            return _error(409, "corpus_not_loaded", "no corpus is loaded")
        if doc_id not in idx.documents:
            return _error(404, "unknown_document", f"no document {doc_id}")
        cached = state["results"].get(query_id)
        if cached is None:
            return _error(404, "unknown_query", f"no cached result for {query_id!r}")
        return {
            "doc_id": doc_id,
            "query_id": query_id,
            "highlights": cached["highlights"].get(doc_id, []),
        }

    if enable_admin:

        @app.post("/admin/ingest")
        def admin_ingest(body: IngestRequest):
            idx = current_index()
            if idx is None:
                return _error(409, "corpus_not_loaded", "no corpus is loaded")
            if not body.text:
                return _error(400, "empty_document", "document text must not be empty")
            try:
                idx.add_document(
                    body.doc_id,
                    body.text.encode("utf-8"),
                    name=body.name,
                    subject_labels=body.subject_labels,
                    source_uri=body.source_uri,
                )
            except DocumentConflictError as exc:
                return _error(409, "document_conflict", str(exc))
            except (ValueError, ConfigError) as exc:
                return _error(400, "bad_document", str(exc))
            return idx.stats()

    @app.exception_handler(Exception)
    def unhandled(request: Request, exc: Exception):  # pragma: no cover
        return _error(500, "internal_error", str(exc))

    if static_dir is not None:
        from fastapi.staticfiles import StaticFiles

        # API routes are registered first, so they win over the mount
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
