"""Retrieval experiments and ROC evaluation.

Three experiment generators produce labeled queries:

1. a leading fragment of an indexed document is the query; the source
   document is the one relevant result;
2. the same, but the fragment is cut out of every document before the corpus
   is rebuilt, so only contextual similarity remains (labels unchanged);
3. fragments of external documents are queries; relevant documents are the
   indexed ones sharing at least one subject label.

For each query, a document counts as retrieved when it gets at least one
vote.  Sweeping alpha from 0 (nothing retrieved) to 1 (everything below the
median retrieved) yields a ROC curve per query; AUC is the trapezoid over the
curve's points, and the diagonal of a random classifier (AUC 0.5) is reported
alongside.  Distance samples are collected once per query and reused across
the whole alpha grid.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .config import EngineConfig
from .corpus import CorpusIndex
from .engine import collect_samples, result_at_alpha
from .outliers import GTable

logger = logging.getLogger(__name__)

DEFAULT_ALPHA_GRID = (0.0, 0.001, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0)

DIAGONAL_AUC = 0.5  # random binary classifier reference


@dataclass(frozen=True)
class LabeledQuery:
    query_id: str
    data: bytes
    experiment_kind: int  # 1 | 2 | 3
    relevant_doc_ids: Optional[frozenset[str]] = None
    relevant_subjects: Optional[frozenset[str]] = None

    def __post_init__(self) -> None:
        by_doc = self.relevant_doc_ids is not None
        by_subject = self.relevant_subjects is not None
        if by_doc == by_subject:
            raise ValueError("exactly one relevance criterion must be populated")
        if self.experiment_kind in (1, 2) and not by_doc:
            raise ValueError("experiments 1 and 2 label relevance by document")
        if self.experiment_kind == 3 and not by_subject:
            raise ValueError("experiment 3 labels relevance by subject")


@dataclass(frozen=True)
class ROCPoint:
    alpha: float
    sensitivity: float
    one_minus_specificity: float
    tp: int
    fp: int
    tn: int
    fn: int


@dataclass
class QueryEvaluation:
    query: LabeledQuery
    relevant: frozenset[str]
    points: list[ROCPoint]
    auc: Optional[float]  # None when the query has no relevant documents
    # documents with votes > 0 at each grid alpha; kept so the same run can
    # be re-scored under different labels (permutation nulls) for free
    retrieved_by_alpha: list[frozenset[str]] = field(default_factory=list)


def _select_doc_ids(
    index: CorpusIndex,
    fragment_length: int,
    rng: Optional[np.random.Generator],
    max_queries: Optional[int],
) -> list[str]:
    eligible = []
    for doc_id in sorted(index.documents):
        if index.documents[doc_id].byte_length < fragment_length:
            logger.warning(
                "skipping %s: shorter than fragment length %d", doc_id, fragment_length
            )
            continue
        eligible.append(doc_id)
    if max_queries is not None and max_queries < len(eligible):
        if rng is None:
            rng = np.random.default_rng(0)
        picked = rng.choice(len(eligible), size=max_queries, replace=False)
        eligible = [eligible[i] for i in sorted(int(i) for i in picked)]
    return eligible


def make_experiment1(
    index: CorpusIndex,
    fragment_length: int,
    rng: Optional[np.random.Generator] = None,
    max_queries: Optional[int] = None,
) -> list[LabeledQuery]:
    """Leading-fragment queries against the unmodified corpus."""
    if fragment_length < 1024:
        raise ValueError("fragment_length must be >= 1024")
    queries = []
    for doc_id in _select_doc_ids(index, fragment_length, rng, max_queries):
        fragment = index.document_bytes(doc_id)[:fragment_length]
        queries.append(
            LabeledQuery(
                query_id=f"exp1-{doc_id}",
                data=fragment,
                experiment_kind=1,
                relevant_doc_ids=frozenset({doc_id}),
            )
        )
    return queries


def make_experiment2(
    index: CorpusIndex,
    fragment_length: int,
    rng: Optional[np.random.Generator] = None,
    max_queries: Optional[int] = None,
) -> tuple[CorpusIndex, list[LabeledQuery]]:
    """Leading-fragment queries with every fragment excised before re-ingest.

    Relevance labels stay on the source documents even though the literal
    fragment is gone from the rebuilt corpus.
    """
    if fragment_length < 1024:
        raise ValueError("fragment_length must be >= 1024")
    modified = CorpusIndex(index.config)
    for doc_id in sorted(index.documents):
        record = index.documents[doc_id]
        data = index.document_bytes(doc_id)
        if len(data) > fragment_length:
            data = data[fragment_length:]
        modified.add_document(
            doc_id,
            data,
            name=record.name,
            subject_labels=record.subject_labels,
            source_uri=record.source_uri,
        )
    queries = []
    for doc_id in _select_doc_ids(index, fragment_length, rng, max_queries):
        fragment = index.document_bytes(doc_id)[:fragment_length]
        queries.append(
            LabeledQuery(
                query_id=f"exp2-{doc_id}",
                data=fragment,
                experiment_kind=2,
                relevant_doc_ids=frozenset({doc_id}),
            )
        )
    return modified, queries


def make_experiment3(
    external_docs: Sequence[tuple[str, bytes, Sequence[str]]],
    fragment_length: int,
    fragments_per_doc: int = 5,
) -> list[LabeledQuery]:
    """Evenly spaced fragments of external, subject-labeled documents."""
    queries = []
    for doc_id, data, subjects in external_docs:
        n = len(data)
        if n < fragment_length:
            logger.warning(
                "skipping external doc %s: shorter than fragment length", doc_id
            )
            continue
        span = n - fragment_length
        count = fragments_per_doc
        starts = sorted(
            {
                round(i * span / (count - 1)) if count > 1 else 0
                for i in range(count)
            }
        )
        if len(starts) < fragments_per_doc:
            logger.warning(
                "external doc %s too short for %d distinct fragments, using %d",
                doc_id,
                fragments_per_doc,
                len(starts),
            )
        for ordinal, start in enumerate(starts):
            queries.append(
                LabeledQuery(
                    query_id=f"exp3-{doc_id}-{ordinal}",
                    data=data[start : start + fragment_length],
                    experiment_kind=3,
                    relevant_subjects=frozenset(subjects),
                )
            )
    return queries


def relevant_documents(index: CorpusIndex, query: LabeledQuery) -> frozenset[str]:
    if query.relevant_doc_ids is not None:
        return frozenset(d for d in query.relevant_doc_ids if d in index.documents)
    assert query.relevant_subjects is not None
    return frozenset(
        doc_id
        for doc_id, rec in index.documents.items()
        if rec.subject_labels & query.relevant_subjects
    )


def _validate_grid(alpha_grid: Sequence[float]) -> list[float]:
    grid = list(alpha_grid)
    if len(grid) < 2 or grid[0] != 0.0 or grid[-1] != 1.0:
        raise ValueError("alpha grid must start at 0 and end at 1")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("alpha grid must be strictly increasing")
    return grid


def trapezoid_auc(points: Sequence[ROCPoint]) -> float:
    """Area under the curve traced by the grid points, in alpha order.

    Both coordinates are non-decreasing in alpha, so alpha order is also
    x order; duplicate x values contribute zero width.
    """
    area = 0.0
    for a, b in zip(points, points[1:]):
        area += (b.one_minus_specificity - a.one_minus_specificity) * (
            b.sensitivity + a.sensitivity
        ) / 2.0
    return area


def _score_points(
    grid: Sequence[float],
    retrieved_by_alpha: Sequence[frozenset[str]],
    relevant: frozenset[str],
    total_docs: int,
) -> tuple[list[ROCPoint], Optional[float]]:
    irrelevant_count = total_docs - len(relevant)
    points = []
    for alpha, retrieved in zip(grid, retrieved_by_alpha):
        tp = len(retrieved & relevant)
        fp = len(retrieved) - tp
        fn = len(relevant) - tp
        tn = irrelevant_count - fp
        sensitivity = tp / len(relevant) if relevant else float("nan")
        fpr = fp / irrelevant_count if irrelevant_count else 0.0
        points.append(
            ROCPoint(
                alpha=alpha,
                sensitivity=sensitivity,
                one_minus_specificity=fpr,
                tp=tp,
                fp=fp,
                tn=tn,
                fn=fn,
            )
        )
    auc = trapezoid_auc(points) if relevant else None
    return points, auc


def evaluate_queries(
    index: CorpusIndex,
    queries: Sequence[LabeledQuery],
    config: EngineConfig,
    gtable: GTable,
    alpha_grid: Sequence[float] = DEFAULT_ALPHA_GRID,
) -> list[QueryEvaluation]:
    """ROC points and AUC for each query over the alpha grid.

    Distance samples are computed once per query; only the flagging step is
    repeated across the grid.
    """
    grid = _validate_grid(alpha_grid)
    total = len(index.documents)
    evaluations = []
    for q in queries:
        relevant = relevant_documents(index, q)
        samples = collect_samples(q.data, index, config)
        retrieved_by_alpha = [
            frozenset(result_at_alpha(samples, alpha, gtable).votes) for alpha in grid
        ]
        points, auc = _score_points(grid, retrieved_by_alpha, relevant, total)
        if auc is None:
            logger.warning(
                "query %s has no relevant documents; excluded from AUC", q.query_id
            )
        evaluations.append(
            QueryEvaluation(
                query=q,
                relevant=relevant,
                points=points,
                auc=auc,
                retrieved_by_alpha=retrieved_by_alpha,
            )
        )
    return evaluations


def relabel_evaluation(
    evaluation: QueryEvaluation, relevant: frozenset[str], total_docs: int
) -> QueryEvaluation:
    """Re-score an evaluated query under a different relevance labeling."""
    points, auc = _score_points(
        [p.alpha for p in evaluation.points],
        evaluation.retrieved_by_alpha,
        relevant,
        total_docs,
    )
    return QueryEvaluation(
        query=evaluation.query,
        relevant=relevant,
        points=points,
        auc=auc,
        retrieved_by_alpha=evaluation.retrieved_by_alpha,
    )


def mean_auc(evaluations: Sequence[QueryEvaluation]) -> float:
    values = [e.auc for e in evaluations if e.auc is not None]
    if not values:
        raise ValueError("no queries with defined AUC")
    return float(np.mean(values))


def shuffle_labels(
    queries: Sequence[LabeledQuery],
    doc_ids: Sequence[str],
    rng: np.random.Generator,
) -> list[LabeledQuery]:
    """Null-experiment variant: each query gets one random relevant document."""
    ids = sorted(doc_ids)
    out = []
    for q in queries:
        pick = ids[int(rng.integers(len(ids)))]
        out.append(
            LabeledQuery(
                query_id=q.query_id,
                data=q.data,
                experiment_kind=q.experiment_kind if q.experiment_kind != 3 else 1,
                relevant_doc_ids=frozenset({pick}),
            )
        )
    return out


# -- artifacts ---------------------------------------------------------------

CSV_COLUMNS = (
    "experiment",
    "query_id",
    "alpha",
    "tp",
    "fp",
    "tn",
    "fn",
    "sensitivity",
    "one_minus_specificity",
)


def write_points_csv(path: str | Path, evaluations: Sequence[QueryEvaluation]) -> None:
    """Per-(query, alpha) confusion rows; queries without relevant docs are
    reported in the summary instead."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for ev in evaluations:
            if ev.auc is None:
                continue
            for p in ev.points:
                writer.writerow(
                    [
                        ev.query.experiment_kind,
                        ev.query.query_id,
                        repr(p.alpha),
                        p.tp,
                        p.fp,
                        p.tn,
                        p.fn,
                        repr(p.sensitivity),
                        repr(p.one_minus_specificity),
                    ]
                )


def write_summary_json(
    path: str | Path,
    evaluations: Sequence[QueryEvaluation],
    extra: Optional[dict] = None,
) -> None:
    included = [e for e in evaluations if e.auc is not None]
    payload = {
        "queries": [
            {"query_id": e.query.query_id, "auc": e.auc, "relevant": sorted(e.relevant)}
            for e in included
        ],
        "excluded_query_ids": sorted(
            e.query.query_id for e in evaluations if e.auc is None
        ),
        "mean_auc": float(np.mean([e.auc for e in included])) if included else None,
        "diagonal_auc": DIAGONAL_AUC,
    }
    if extra:
        payload.update(extra)
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def run_experiment(
    kind: int,
    index: CorpusIndex,
    config: EngineConfig,
    gtable: GTable,
    out_dir: str | Path,
    fragment_length: int = 2048,
    max_queries: Optional[int] = None,
    seed: int = 0,
    alpha_grid: Sequence[float] = DEFAULT_ALPHA_GRID,
    external_docs: Optional[Sequence[tuple[str, bytes, Sequence[str]]]] = None,
    fragments_per_doc: int = 5,
) -> list[QueryEvaluation]:
    """Run one experiment end to end and write its CSV/JSON artifacts."""
    rng = np.random.default_rng(seed)
    if kind == 1:
        queries = make_experiment1(index, fragment_length, rng, max_queries)
        target = index
    elif kind == 2:
        target, queries = make_experiment2(index, fragment_length, rng, max_queries)
    elif kind == 3:
        if external_docs is None:
            raise ValueError("experiment 3 needs external labeled documents")
        queries = make_experiment3(external_docs, fragment_length, fragments_per_doc)
        target = index
    else:
        raise ValueError(f"unknown experiment kind: {kind}")
    evaluations = evaluate_queries(target, queries, config, gtable, alpha_grid)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_points_csv(out / f"experiment{kind}_points.csv", evaluations)
    write_summary_json(
        out / f"experiment{kind}_summary.json",
        evaluations,
        extra={
            "experiment": kind,
            "fragment_length": fragment_length,
            "seed": seed,
            "alpha_grid": [repr(a) for a in alpha_grid],
        },
    )
    return evaluations
