import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ncdsearch import lz
from ncdsearch.corpus import (
    Block,
    ConfigError,
    CorpusCorruptionError,
    CorpusIndex,
    CorpusNotFoundError,
    CorpusVersionError,
    DocumentConflictError,
    IngestConfig,
    chunk,
)
from oracles import enumerate_chunk_starts


def random_bytes(rng, n):
    return bytes(rng.integers(0, 256, n, dtype=np.uint8))


class TestChunk:
    def test_worked_example_40kb_10kb_10_percent(self):
        data = b"x" * (40 * 1024)
        ranges = chunk(data, 10, 0.10)
        assert len(ranges) == 5
        # step round(10240 * 0.9) = 9216; the 4096-byte tail is below half the
        # nominal size, so it is re-anchored to end at the last byte
        assert ranges == [
            (0, 10240),
            (9216, 19456),
            (18432, 28672),
            (27648, 37888),
            (30720, 40960),
        ]
        stored = sum(e - s for s, e in ranges)
        assert 40 * 1024 <= stored <= 50 * 1024

    def test_short_document_single_block(self):
        ranges = chunk(b"y" * 700, 10, 0.10)
        assert ranges == [(0, 700)]

    def test_tiny_remainder_kept_when_single(self):
        ranges = chunk(b"z" * 100, 1, 0.5)
        assert ranges == [(0, 100)]

    def test_8192_bytes_1kb_bin_half_overlap(self):
        data = b"q" * 8192
        ranges = chunk(data, 1, 0.5)
        assert ranges == enumerate_chunk_starts(8192, 1024, 512, 512)
        assert ranges[0] == (0, 1024)
        assert ranges[1] == (512, 1536)
        assert ranges[-1] == (7168, 8192)
        assert len(ranges) == 15

    def test_overlap_range_enforced(self):
        with pytest.raises(ConfigError):
            chunk(b"a" * 100, 1, 0.005)
        with pytest.raises(ConfigError):
            chunk(b"a" * 100, 1, 0.995)

    def test_empty_document_rejected(self):
        with pytest.raises(ValueError):
            chunk(b"", 1, 0.1)

    @settings(max_examples=200, deadline=None)
    @given(
        n=st.integers(min_value=1, max_value=50_000),
        bin_k=st.integers(min_value=1, max_value=8),
        overlap=st.sampled_from([0.05, 0.10, 0.25, 0.50]),
    )
    def test_chunk_properties(self, n, bin_k, overlap):
        nominal = bin_k * 1024
        ranges = chunk(b"\0" * n, bin_k, overlap)
        assert ranges == enumerate_chunk_starts(
            n, nominal, max(1, round(nominal * (1 - overlap))), nominal // 2
        )
        # full coverage, no oversized block, starts strictly increasing
        assert ranges[0][0] == 0 and ranges[-1][1] == n
        covered = 0
        for (s, e), nxt in zip(ranges, ranges[1:] + [(n, n)]):
            assert 0 < e - s <= nominal
            assert s <= covered  # no gap
            covered = max(covered, e)
            assert nxt[0] > s
        assert covered == n
        # moderate overlaps keep total storage near nominal/(1-overlap)
        stored = sum(e - s for s, e in ranges)
        assert stored <= n / (1 - overlap) + nominal

    def test_adjacent_overlap_matches_setting(self):
        ranges = chunk(b"\0" * 50_000, 2, 0.10)
        nominal, step = 2048, round(2048 * 0.9)
        for (s1, e1), (s2, e2) in zip(ranges[:-2], ranges[1:-1]):
            assert e1 - s2 == nominal - step


class TestIngest:
    def test_every_bin_covered_small_doc(self):
        index = CorpusIndex(IngestConfig(n_max_bins=32))
        index.add_document("doc", b"m" * (5 * 1024))
        for bin_k in range(1, 33):
            blocks = index.blocks_in_bin(bin_k)
            assert len(blocks) >= 1
            if bin_k >= 5:
                assert len(blocks) == 1
                assert blocks[0].byte_range == (0, 5 * 1024)

    def test_reingest_identical_is_idempotent(self, tmp_path):
        rng = np.random.default_rng(5)
        data = random_bytes(rng, 3000)
        index = CorpusIndex(IngestConfig(n_max_bins=4))
        index.add_document("a", data)
        before = index.block_count()
        index.add_document("a", data)
        assert index.block_count() == before
        index.persist(tmp_path / "c")
        manifest1 = (tmp_path / "c" / "manifest.json").read_bytes()
        index.add_document("a", data)
        index.persist(tmp_path / "c")
        assert (tmp_path / "c" / "manifest.json").read_bytes() == manifest1

    def test_conflicting_content_rejected(self):
        index = CorpusIndex(IngestConfig(n_max_bins=2))
        index.add_document("a", b"first version here")
        with pytest.raises(DocumentConflictError):
            index.add_document("a", b"second version here")

    def test_invalid_doc_id_rejected(self):
        index = CorpusIndex()
        with pytest.raises(ConfigError):
            index.add_document("../escape", b"data")

    def test_total_blocks_match_bruteforce_enumeration(self):
        rng = np.random.default_rng(7)
        cfg = IngestConfig(n_max_bins=3, overlap_fraction=0.10)
        index = CorpusIndex(cfg)
        expected = 0
        for d in range(100):
            n = int(rng.integers(500, 8_000))
            index.add_document(f"d{d:03d}", random_bytes(rng, n))
            for bin_k in range(1, 4):
                nominal = bin_k * 1024
                expected += len(
                    enumerate_chunk_starts(
                        n, nominal, max(1, round(nominal * 0.9)), nominal // 2
                    )
                )
        assert index.block_count() == expected

    def test_cached_sizes_match_recomputation(self):
        rng = np.random.default_rng(11)
        index = CorpusIndex(IngestConfig(n_max_bins=4))
        for d in range(3):
            index.add_document(f"d{d}", random_bytes(rng, int(rng.integers(2000, 9000))))
        blocks = [b for k in range(1, 5) for b in index.blocks_in_bin(k)]
        picks = rng.choice(len(blocks), size=min(100, len(blocks)), replace=False)
        for i in picks:
            block = blocks[int(i)]
            assert lz.compressed_size(index.block_bytes(block)) == block.bits

    def test_block_order_is_deterministic(self):
        index = CorpusIndex(IngestConfig(n_max_bins=2))
        index.add_document("b", b"bbb" * 400)
        index.add_document("a", b"aaa" * 400)
        blocks = index.blocks_in_bin(1)
        assert blocks == sorted(blocks, key=lambda b: (b.doc_id, b.ordinal))


class TestPersistence:
    def test_roundtrip_empty_corpus(self, tmp_path):
        index = CorpusIndex(IngestConfig(n_max_bins=3))
        index.persist(tmp_path / "c")
        loaded = CorpusIndex.load(tmp_path / "c")
        assert loaded.documents == {}
        assert loaded.config == index.config

    def test_roundtrip_hundred_docs_byte_identical(self, tmp_path):
        rng = np.random.default_rng(13)
        index = CorpusIndex(IngestConfig(n_max_bins=3))
        for d in range(100):
            index.add_document(
                f"doc{d:03d}",
                random_bytes(rng, int(rng.integers(600, 4000))),
                subject_labels={f"s{d % 5}"},
                source_uri=f"local://{d}",
            )
        index.persist(tmp_path / "c")
        manifest1 = (tmp_path / "c" / "manifest.json").read_bytes()
        loaded = CorpusIndex.load(tmp_path / "c")
        assert loaded.documents == index.documents
        for k in range(1, 4):
            assert loaded.blocks_in_bin(k) == index.blocks_in_bin(k)
        loaded.persist(tmp_path / "c2")
        assert (tmp_path / "c2" / "manifest.json").read_bytes() == manifest1

    def test_flipped_manifest_byte_is_a_checksum_error(self, tmp_path):
        index = CorpusIndex(IngestConfig(n_max_bins=2))
        index.add_document("doc", b"payload " * 300)
        index.persist(tmp_path / "c")
        manifest = tmp_path / "c" / "manifest.json"
        raw = bytearray(manifest.read_bytes())
        raw[len(raw) // 2] ^= 0x01
        manifest.write_bytes(bytes(raw))
        with pytest.raises(CorpusCorruptionError):
            CorpusIndex.load(tmp_path / "c")

    def test_version_mismatch_reported_distinctly(self, tmp_path):
        import hashlib

        index = CorpusIndex(IngestConfig(n_max_bins=2))
        index.add_document("doc", b"payload " * 300)
        index.persist(tmp_path / "c")
        manifest = tmp_path / "c" / "manifest.json"
        payload = json.loads(manifest.read_text())
        payload["format_version"] = 99
        raw = (json.dumps(payload, indent=2, sort_keys=True) + "\n").encode()
        manifest.write_bytes(raw)
        (tmp_path / "c" / "manifest.sha256").write_text(
            hashlib.sha256(raw).hexdigest() + "\n"
        )
        with pytest.raises(CorpusVersionError):
            CorpusIndex.load(tmp_path / "c")

    def test_missing_corpus_reported_distinctly(self, tmp_path):
        with pytest.raises(CorpusNotFoundError):
            CorpusIndex.load(tmp_path / "nowhere")

    def test_corrupt_blob_detected(self, tmp_path):
        index = CorpusIndex(IngestConfig(n_max_bins=2))
        index.add_document("doc", b"payload " * 300)
        index.persist(tmp_path / "c")
        blob = tmp_path / "c" / "blobs" / "doc"
        blob.write_bytes(b"tampered" + blob.read_bytes()[8:])
        with pytest.raises(CorpusCorruptionError):
            CorpusIndex.load(tmp_path / "c")
