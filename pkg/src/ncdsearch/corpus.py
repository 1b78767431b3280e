"""Document store with size-binned, overlapping block division.

Every document is split, for each size bin k in 1..n_max_bins, into blocks of
nominally k KB whose starts advance by nominal*(1 - overlap) bytes, so each
block repeats a configurable fraction of its predecessor.  A too-short tail
block is not kept: it is replaced by a full-size block re-anchored to end at
the document's last byte, which preserves coverage without ever exceeding the
nominal size.  Blocks store byte ranges plus the compressed size of their
content; bytes are materialized on demand from the document blob.

On disk a corpus is a directory:

    manifest.json    config, documents, per-bin block tables (versioned)
    manifest.sha256  checksum of manifest.json
    blobs/<doc_id>   raw document bytes, stored verbatim

The manifest is serialized canonically (sorted keys, fixed indentation) so an
unchanged corpus re-persists byte-identically.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

from . import lz

FORMAT_VERSION = 1

_DOC_ID_RE = re.compile(r"^[A-Za-z0-9][A-Za-z0-9._-]*$")


class CorpusError(Exception):
    """Base class for corpus storage failures."""


class ConfigError(CorpusError):
    """Invalid chunking or ingest configuration."""


class DocumentConflictError(CorpusError):
    """Same doc_id ingested with different content."""


class CorpusNotFoundError(CorpusError):
    """Corpus directory or manifest missing."""


class CorpusVersionError(CorpusError):
    """Manifest format version not understood."""


class CorpusCorruptionError(CorpusError):
    """Checksum mismatch while reading a corpus."""


def nominal_bytes(bin_k: int) -> int:
    return bin_k * 1024


def chunk(
    data: bytes,
    bin_k: int,
    overlap_fraction: float,
    min_remainder: Optional[int] = None,
) -> list[tuple[int, int]]:
    """Byte ranges [start, end) covering ``data`` for one size bin.

    Block i starts at i*step with step = max(1, round(nominal*(1-overlap))).
    Generation stops once a block reaches the end of the document.  A tail
    block shorter than ``min_remainder`` (default: half the nominal size) is
    replaced by a full-size block ending at the last byte; a document shorter
    than the nominal size is always a single block.
    """
    n = len(data)
    if n == 0:
        raise ValueError("cannot chunk an empty document")
    if bin_k < 1:
        raise ConfigError(f"size bin must be >= 1, got {bin_k}")
    if not 0.01 <= overlap_fraction <= 0.99:
        raise ConfigError(
            f"overlap fraction must lie in [0.01, 0.99], got {overlap_fraction}"
        )
    nominal = nominal_bytes(bin_k)
    if min_remainder is None:
        min_remainder = nominal // 2
    step = max(1, round(nominal * (1.0 - overlap_fraction)))
    ranges: list[tuple[int, int]] = []
    i = 0
    while True:
        if ranges and ranges[-1][1] >= n:
            break
        start = i * step
        ranges.append((start, min(start + nominal, n)))
        i += 1
    last_start, last_end = ranges[-1]
    if len(ranges) >= 2 and last_end - last_start < min_remainder:
        ranges[-1] = (n - nominal, n)
    return ranges


@dataclass(frozen=True)
class IngestConfig:
    n_max_bins: int = 32
    overlap_fraction: float = 0.10
    min_remainder_fraction: float = 0.5

    def __post_init__(self) -> None:
        if self.n_max_bins < 1:
            raise ConfigError(f"n_max_bins must be >= 1, got {self.n_max_bins}")
        if not 0.01 <= self.overlap_fraction <= 0.99:
            raise ConfigError(
                f"overlap fraction must lie in [0.01, 0.99], got {self.overlap_fraction}"
            )
        if not 0.0 < self.min_remainder_fraction <= 1.0:
            raise ConfigError(
                "min_remainder_fraction must lie in (0, 1], got "
                f"{self.min_remainder_fraction}"
            )

    def min_remainder(self, bin_k: int) -> int:
        return int(nominal_bytes(bin_k) * self.min_remainder_fraction)


@dataclass(frozen=True)
class DocumentRecord:
    doc_id: str
    name: str
    byte_length: int
    subject_labels: frozenset[str] = frozenset()
    source_uri: str = ""
    sha256: str = ""


@dataclass(frozen=True)
class Block:
    doc_id: str
    bin: int
    ordinal: int
    start: int
    end: int
    bits: int

    @property
    def block_id(self) -> str:
        return f"{self.doc_id}:{self.bin}:{self.ordinal}"

    @property
    def byte_range(self) -> tuple[int, int]:
        return (self.start, self.end)


class CorpusIndex:
    """In-memory corpus: documents, raw blobs and per-bin block tables."""

    def __init__(self, config: Optional[IngestConfig] = None) -> None:
        self.config = config or IngestConfig()
        self.documents: dict[str, DocumentRecord] = {}
        self._blobs: dict[str, bytes] = {}
        self._blocks_by_bin: dict[int, list[Block]] = {}
        self._sorted = True

    # -- ingestion ---------------------------------------------------------

    def add_document(
        self,
        doc_id: str,
        data: bytes,
        name: Optional[str] = None,
        subject_labels: Iterable[str] = (),
        source_uri: str = "",
    ) -> DocumentRecord:
        """Chunk and index one document under every size bin.

        Re-adding identical content is a no-op; same id with different bytes
        raises DocumentConflictError.
        """
        if not _DOC_ID_RE.match(doc_id):
            raise ConfigError(f"invalid doc_id: {doc_id!r}")
        data = bytes(data)
        if not data:
            raise ValueError(f"document {doc_id} is empty")
        digest = hashlib.sha256(data).hexdigest()
        existing = self.documents.get(doc_id)
        if existing is not None:
            if existing.sha256 != digest:
                raise DocumentConflictError(
                    f"doc_id {doc_id} already ingested with different content"
                )
            return existing
        record = DocumentRecord(
            doc_id=doc_id,
            name=name or doc_id,
            byte_length=len(data),
            subject_labels=frozenset(subject_labels),
            source_uri=source_uri,
            sha256=digest,
        )
        self.documents[doc_id] = record
        self._blobs[doc_id] = data
        for bin_k in range(1, self.config.n_max_bins + 1):
            ranges = chunk(
                data,
                bin_k,
                self.config.overlap_fraction,
                self.config.min_remainder(bin_k),
            )
            table = self._blocks_by_bin.setdefault(bin_k, [])
            for ordinal, (start, end) in enumerate(ranges):
                table.append(
                    Block(
                        doc_id=doc_id,
                        bin=bin_k,
                        ordinal=ordinal,
                        start=start,
                        end=end,
                        bits=lz.compressed_size(data[start:end]),
                    )
                )
        self._sorted = False
        return record

    # -- access ------------------------------------------------------------

    def document_bytes(self, doc_id: str) -> bytes:
        try:
            return self._blobs[doc_id]
        except KeyError:
            raise KeyError(f"unknown document: {doc_id}") from None

    def blocks_in_bin(self, bin_k: int) -> list[Block]:
        if not self._sorted:
            for table in self._blocks_by_bin.values():
                table.sort(key=lambda b: (b.doc_id, b.ordinal))
            self._sorted = True
        return self._blocks_by_bin.get(bin_k, [])

    def block_bytes(self, block: Block) -> bytes:
        return self._blobs[block.doc_id][block.start : block.end]

    def block_count(self) -> int:
        return sum(len(t) for t in self._blocks_by_bin.values())

    def stats(self) -> dict:
        return {
            "documents": len(self.documents),
            "blocks": self.block_count(),
            "bins": self.config.n_max_bins,
            "overlap_fraction": self.config.overlap_fraction,
        }

    # -- persistence -------------------------------------------------------

    def _manifest_payload(self) -> dict:
        docs = [
            {
                "doc_id": rec.doc_id,
                "name": rec.name,
                "byte_length": rec.byte_length,
                "subject_labels": sorted(rec.subject_labels),
                "source_uri": rec.source_uri,
                "sha256": rec.sha256,
            }
            for rec in sorted(self.documents.values(), key=lambda r: r.doc_id)
        ]
        blocks: dict[str, dict[str, list[list[int]]]] = {}
        for bin_k in sorted(self._blocks_by_bin):
            for block in self.blocks_in_bin(bin_k):
                per_doc = blocks.setdefault(block.doc_id, {})
                per_doc.setdefault(str(bin_k), []).append(
                    [block.start, block.end, block.bits]
                )
        return {
            "format_version": FORMAT_VERSION,
            "config": {
                "n_max_bins": self.config.n_max_bins,
                "overlap_fraction": self.config.overlap_fraction,
                "min_remainder_fraction": self.config.min_remainder_fraction,
            },
            "documents": docs,
            "blocks": blocks,
        }

    def persist(self, path: str | Path) -> None:
        root = Path(path)
        (root / "blobs").mkdir(parents=True, exist_ok=True)
        manifest = json.dumps(self._manifest_payload(), indent=2, sort_keys=True) + "\n"
        data = manifest.encode()
        (root / "manifest.json").write_bytes(data)
        (root / "manifest.sha256").write_text(hashlib.sha256(data).hexdigest() + "\n")
        for doc_id, blob in self._blobs.items():
            (root / "blobs" / doc_id).write_bytes(blob)

    @classmethod
    def load(cls, path: str | Path) -> "CorpusIndex":
        root = Path(path)
        manifest_path = root / "manifest.json"
        if not manifest_path.exists():
            raise CorpusNotFoundError(f"no corpus manifest at {manifest_path}")
        raw = manifest_path.read_bytes()
        sha_path = root / "manifest.sha256"
        if not sha_path.exists():
            raise CorpusCorruptionError(f"missing checksum file {sha_path}")
        expected = sha_path.read_text().strip()
        actual = hashlib.sha256(raw).hexdigest()
        if actual != expected:
            raise CorpusCorruptionError(
                f"manifest checksum mismatch: expected {expected}, got {actual}"
            )
        try:
            payload = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise CorpusCorruptionError(f"manifest is not valid JSON: {exc}") from exc
        version = payload.get("format_version")
        if version != FORMAT_VERSION:
            raise CorpusVersionError(f"unsupported corpus format version: {version!r}")
        cfg = payload["config"]
        index = cls(
            IngestConfig(
                n_max_bins=int(cfg["n_max_bins"]),
                overlap_fraction=float(cfg["overlap_fraction"]),
                min_remainder_fraction=float(cfg["min_remainder_fraction"]),
            )
        )
        for doc in payload["documents"]:
            doc_id = doc["doc_id"]
            blob_path = root / "blobs" / doc_id
            if not blob_path.exists():
                raise CorpusCorruptionError(f"missing blob for document {doc_id}")
            blob = blob_path.read_bytes()
            if hashlib.sha256(blob).hexdigest() != doc["sha256"]:
                raise CorpusCorruptionError(f"blob checksum mismatch for {doc_id}")
            index.documents[doc_id] = DocumentRecord(
                doc_id=doc_id,
                name=doc["name"],
                byte_length=int(doc["byte_length"]),
                subject_labels=frozenset(doc["subject_labels"]),
                source_uri=doc["source_uri"],
                sha256=doc["sha256"],
            )
            index._blobs[doc_id] = blob
            for bin_str, rows in payload["blocks"].get(doc_id, {}).items():
                bin_k = int(bin_str)
                table = index._blocks_by_bin.setdefault(bin_k, [])
                for ordinal, (start, end, bits) in enumerate(rows):
                    table.append(
                        Block(
                            doc_id=doc_id,
                            bin=bin_k,
                            ordinal=ordinal,
                            start=int(start),
                            end=int(end),
                            bits=int(bits),
                        )
                    )
        index._sorted = False
        return index


def persist(index: CorpusIndex, path: str | Path) -> None:
    index.persist(path)


def load(path: str | Path) -> CorpusIndex:
    return CorpusIndex.load(path)
