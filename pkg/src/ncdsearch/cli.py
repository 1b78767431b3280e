"""Command line interface: ingest, query, eval, serve.

Exit codes: 0 success, 1 usage or configuration error, 2 data error
(missing or corrupt corpus, unreadable input).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .config import EngineConfig, load_config
from .corpus import ConfigError, CorpusError, CorpusIndex
from .engine import collect_samples, result_at_alpha
from .evaluation import DEFAULT_ALPHA_GRID, mean_auc, run_experiment
from .outliers import GTable
from .wire import result_to_dict

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _build_parser() -> _Parser:
    parser = _Parser(prog="ncdsearch", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key = value config file")
    common.add_argument("--n-max-bins", type=int, dest="n_max_bins")
    common.add_argument("--overlap", type=float, dest="overlap_fraction")
    common.add_argument("--alpha", type=float, dest="alpha")
    common.add_argument("--max-blocks", type=int, dest="max_blocks_shown")
    common.add_argument("--gtable-replicates", type=int, dest="gtable_replicates")
    common.add_argument("--seed", type=int, dest="rng_seed")

    p_ingest = sub.add_parser("ingest", parents=[common], help="build a corpus from text files")
    p_ingest.add_argument("--input", type=Path, required=True, help="directory of .txt documents")
    p_ingest.add_argument("--corpus", type=Path, required=True, help="corpus directory to create or update")

    p_query = sub.add_parser("query", parents=[common], help="run a query against a corpus")
    p_query.add_argument("--corpus", type=Path, required=True)
    group = p_query.add_mutually_exclusive_group(required=True)
    group.add_argument("--text", help="inline query text")
    group.add_argument("--file", type=Path, help="file whose content is the query")
    p_query.add_argument("--json", action="store_true", help="machine readable output")
    p_query.add_argument(
        "--dump-distances",
        type=Path,
        help="write every (unit, bin, block) distance as CSV, e.g. to inspect "
        "how close the per-bin samples are to normal",
    )

    p_eval = sub.add_parser("eval", parents=[common], help="run a retrieval experiment")
    p_eval.add_argument("--corpus", type=Path, required=True)
    p_eval.add_argument("--experiment", type=int, choices=(1, 2, 3), required=True)
    p_eval.add_argument("--output", type=Path, required=True)
    p_eval.add_argument("--fragment-length", type=int, default=2048)
    p_eval.add_argument("--queries", type=int, default=None, help="cap on number of queries")
    p_eval.add_argument("--external", type=Path, help="directory of labeled external docs (experiment 3)")
    p_eval.add_argument("--fragments-per-doc", type=int, default=5)

    p_serve = sub.add_parser("serve", parents=[common], help="serve the HTTP API")
    p_serve.add_argument("--corpus", type=Path, required=True)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8470)
    p_serve.add_argument("--enable-admin", action="store_true")
    p_serve.add_argument("--ui", type=Path, help="directory with the built web UI")

    return parser


def _engine_config(args) -> EngineConfig:
    overrides = {
        key: getattr(args, key, None)
        for key in (
            "n_max_bins",
            "overlap_fraction",
            "alpha",
            "max_blocks_shown",
            "gtable_replicates",
            "rng_seed",
        )
    }
    return load_config(args.config, **overrides)


def _read_documents(input_dir: Path):
    """Yield (doc_id, data, subjects, source_uri) for each *.txt document.

    A sidecar <name>.meta.json may supply {"subjects": [...], "source_uri": ...}.
    """
    for path in sorted(input_dir.glob("*.txt")):
        doc_id = path.stem
        data = path.read_bytes()
        subjects: list[str] = []
        source_uri = ""
        sidecar = path.with_suffix(".meta.json")
        if sidecar.exists():
            meta = json.loads(sidecar.read_text())
            subjects = list(meta.get("subjects", []))
            source_uri = meta.get("source_uri", "")
        yield doc_id, data, subjects, source_uri


def _load_index(corpus: Path) -> CorpusIndex:
    return CorpusIndex.load(corpus)


def _gtable_for(corpus: Path, config: EngineConfig) -> GTable:
    return GTable.load_or_create(
        corpus / "gtable.json", config.gtable_replicates, config.rng_seed
    )


def cmd_ingest(args) -> int:
    config = _engine_config(args)
    if not args.input.is_dir():
        print(f"input directory not readable: {args.input}", file=sys.stderr)
        return EXIT_DATA
    try:
        index = CorpusIndex.load(args.corpus)
        if index.config != config.ingest_config():
            logger.warning(
                "corpus already exists; keeping its chunking config %s",
                index.config,
            )
    except CorpusError:
        index = CorpusIndex(config.ingest_config())
    count = 0
    for doc_id, data, subjects, source_uri in _read_documents(args.input):
        if not data:
            logger.warning("skipping empty file: %s", doc_id)
            continue
        index.add_document(doc_id, data, subject_labels=subjects, source_uri=source_uri)
        count += 1
    index.persist(args.corpus)
    print(f"{count} documents ingested ({index.block_count()} blocks, "
          f"{len(index.documents)} total documents)")
    return EXIT_OK


def _write_distance_dump(path: Path, samples) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["unit", "bin", "doc_id", "ordinal", "ncd"])
        for sample in samples:
            for block, dist in sample.entries:
                writer.writerow(
                    [sample.unit.ordinal, sample.bin, block.doc_id,
                     block.ordinal, repr(dist)]
                )


def cmd_query(args) -> int:
    config = _engine_config(args)
    if args.text is not None:
        data = args.text.encode("utf-8")
    else:
        if not args.file.is_file():
            print(f"query file not readable: {args.file}", file=sys.stderr)
            return EXIT_DATA
        data = args.file.read_bytes()
    if not data:
        print("query is empty", file=sys.stderr)
        return EXIT_USAGE
    index = _load_index(args.corpus)
    gtable = _gtable_for(args.corpus, config)
    if not index.documents:
        payload = {"query_id": "", "alpha": config.alpha, "flagged": [],
                   "votes": {}, "ranking": [], "highlights": {}}
    else:
        samples = collect_samples(data, index, config)
        result = result_at_alpha(samples, config.alpha, gtable)
        payload = result_to_dict(result, data, config.max_blocks_shown)
        gtable.save(args.corpus / "gtable.json")
        if args.dump_distances:
            _write_distance_dump(args.dump_distances, samples)
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
        return EXIT_OK
    if not payload["ranking"]:
        print("no documents retrieved")
        return EXIT_OK
    print("documents by votes:")
    for doc_id in payload["ranking"]:
        print(f"  {doc_id}  votes={payload['votes'][doc_id]}")
    print("top flagged blocks:")
    for row in payload["flagged"]:
        print(
            f"  ncd={row['ncd']:.4f}  {row['doc_id']}  bin={row['bin']}KB"
            f"  block={row['ordinal']}  bytes=[{row['start']}, {row['end']})"
        )
    return EXIT_OK


def cmd_eval(args) -> int:
    config = _engine_config(args)
    index = _load_index(args.corpus)
    gtable = _gtable_for(args.corpus, config)
    external = None
    if args.experiment == 3:
        if args.external is None or not args.external.is_dir():
            print("experiment 3 needs --external with labeled documents", file=sys.stderr)
            return EXIT_USAGE
        external = [
            (doc_id, data, subjects)
            for doc_id, data, subjects, _ in _read_documents(args.external)
        ]
    evaluations = run_experiment(
        args.experiment,
        index,
        config,
        gtable,
        args.output,
        fragment_length=args.fragment_length,
        max_queries=args.queries,
        seed=config.rng_seed,
        alpha_grid=DEFAULT_ALPHA_GRID,
        external_docs=external,
        fragments_per_doc=args.fragments_per_doc,
    )
    gtable.save(args.corpus / "gtable.json")
    included = [e for e in evaluations if e.auc is not None]
    print(f"experiment {args.experiment}: {len(evaluations)} queries, "
          f"{len(included)} scored")
    if included:
        print(f"mean AUC: {mean_auc(evaluations):.4f}")
    print(f"artifacts written to {args.output}")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    config = _engine_config(args)
    index = _load_index(args.corpus)
    gtable = _gtable_for(args.corpus, config)
    if args.ui is not None and not args.ui.is_dir():
        print(f"UI directory not found: {args.ui}", file=sys.stderr)
        return EXIT_DATA
    app = create_app(
        index,
        config,
        gtable,
        enable_admin=args.enable_admin,
        prewarm=True,
        static_dir=str(args.ui) if args.ui else None,
    )
    gtable.save(args.corpus / "gtable.json")
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


_COMMANDS = {
    "ingest": cmd_ingest,
    "query": cmd_query,
    "eval": cmd_eval,
    "serve": cmd_serve,
}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CorpusError as exc:
        print(f"corpus error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
