"""Windowless Lempel-Ziv parser with a deterministic bit-cost model.

The parser is greedy: at every position it takes the longest match of the
remaining input anywhere in the already-consumed prefix (no window limit),
breaking length ties toward the smallest offset.  Matches shorter than
``MIN_MATCH`` are emitted as single-byte literals.  Self-overlapping matches
(offset < length) are allowed and decode byte by byte, so runs collapse into
one phrase.

Costs are counted in bits and never rounded to bytes:

* literal: 1 flag bit + 8 data bits = 9 bits
* match:   1 flag bit + Elias-gamma(offset) + Elias-gamma(length) bits

``compressed_size`` is the complexity estimate everything downstream builds
on; equal inputs always yield equal costs.

Two interchangeable backends produce the same parse: a pure Python one built
on ``bytes.rfind`` and a numba-compiled hash-chain kernel used when numba is
importable (set ``NCDSEARCH_PURE=1`` to force the pure backend).
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable

import numpy as np

MIN_MATCH = 3
LITERAL_BITS = 9  # 1 flag bit + 8 data bits


def gamma_bits(value: int) -> int:
    """Length in bits of the Elias-gamma code for ``value`` (>= 1)."""
    if value < 1:
        raise ValueError("gamma code is defined for positive integers")
    return 2 * (value.bit_length() - 1) + 1


@dataclass(frozen=True, slots=True)
class Phrase:
    """One token of the parse: a literal byte or a back-reference."""

    kind: str  # "literal" | "match"
    literal_byte: int = 0
    offset: int = 0
    length: int = 0

    @classmethod
    def literal(cls, byte: int) -> "Phrase":
        return cls(kind="literal", literal_byte=byte)

    @classmethod
    def match(cls, offset: int, length: int) -> "Phrase":
        return cls(kind="match", offset=offset, length=length)

    @property
    def cost_bits(self) -> int:
        if self.kind == "literal":
            return LITERAL_BITS
        return 1 + gamma_bits(self.offset) + gamma_bits(self.length)


def _extend(data: bytes, j: int, i: int, known: int, n: int) -> int:
    """Longest L with data[j:j+L] == data[i:i+L], given the first ``known``
    bytes already match.  Slice compares double the verified span, then a
    binary search pins the first mismatch."""
    max_len = n - i
    c = known
    while c < max_len:
        step = min(c, max_len - c)
        if data[j + c : j + c + step] == data[i + c : i + c + step]:
            c += step
        else:
            lo, hi = 0, step
            while hi - lo > 1:
                mid = (lo + hi) // 2
                if data[j + c : j + c + mid] == data[i + c : i + c + mid]:
                    lo = mid
                else:
                    hi = mid
            return c + lo
    return max_len


def _parse_pure(data: bytes) -> list[tuple[int, int, int]]:
    """Reference backend.  Returns rows (kind, a, b): kind 0 is a literal with
    byte value a, kind 1 is a match with offset a and length b.

    A set of already-seen trigrams rejects hopeless positions cheaply (random
    data would otherwise trigger a full backward scan per byte); confirmed
    probes use ``bytes.rfind``, whose rightmost-occurrence answer is exactly
    the smallest-offset tie-break.
    """
    n = len(data)
    rows: list[tuple[int, int, int]] = []
    seen: set[bytes] = set()
    registered = 0  # trigram starts in [0, registered) are in `seen`
    i = 0
    last_tri = n - MIN_MATCH  # last valid trigram start
    while i < n:
        best_j = -1
        best_len = 0
        if i > 0 and n - i >= MIN_MATCH:
            upto = min(i, last_tri + 1)
            while registered < upto:
                seen.add(data[registered : registered + MIN_MATCH])
                registered += 1
            probe = data[i : i + MIN_MATCH]
            if probe in seen:
                # end bound i+2 forces the source start strictly before i
                j = data.rfind(probe, 0, i + MIN_MATCH - 1)
                length = _extend(data, j, i, MIN_MATCH, n)
                while i + length < n:
                    j2 = data.rfind(data[i : i + length + 1], 0, i + length)
                    if j2 < 0:
                        break
                    j = j2
                    length = _extend(data, j2, i, length + 1, n)
                best_j, best_len = j, length
        if best_len >= MIN_MATCH:
            rows.append((1, i - best_j, best_len))
            i += best_len
        else:
            rows.append((0, data[i], 0))
            i += 1
    return rows


_FAST_KERNEL = None
_FAST_FAILED = False


def _get_fast_kernel():
    """Compile (once) and return the numba parse kernel, or None."""
    global _FAST_KERNEL, _FAST_FAILED
    if _FAST_KERNEL is not None:
        return _FAST_KERNEL
    if _FAST_FAILED or os.environ.get("NCDSEARCH_PURE"):
        return None
    try:
        from numba import njit
    except Exception:
        _FAST_FAILED = True
        return None

    @njit(cache=True, nogil=True)
    def kernel(buf, head, prev, rows, shift):  # pragma: no cover (compiled)
        n = buf.shape[0]
        i = 0
        inserted = 0
        count = 0
        total_bits = 0
        while i < n:
            # register candidate sources that start strictly before i
            limit = i if i < n - 2 else n - 2
            while inserted < limit:
                v = (
                    np.int64(buf[inserted]) * 65536
                    + np.int64(buf[inserted + 1]) * 256
                    + np.int64(buf[inserted + 2])
                )
                key = ((v * 2654435761) & 0xFFFFFFFF) >> shift
                prev[inserted] = head[key]
                head[key] = inserted
                inserted += 1
            best_len = 0
            best_j = -1
            if i > 0 and n - i >= 3:
                v = (
                    np.int64(buf[i]) * 65536
                    + np.int64(buf[i + 1]) * 256
                    + np.int64(buf[i + 2])
                )
                key = ((v * 2654435761) & 0xFFFFFFFF) >> shift
                j = head[key]
                max_len = n - i
                while j >= 0:
                    if best_len > 0 and buf[j + best_len] != buf[i + best_len]:
                        j = prev[j]
                        continue
                    length = 0
                    while length < max_len and buf[j + length] == buf[i + length]:
                        length += 1
                    if length > best_len:
                        best_len = length
                        best_j = j
                        if best_len == max_len:
                            break
                        if i + best_len >= n:
                            break
                    j = prev[j]
            if best_len >= 3:
                off = i - best_j
                rows[count, 0] = 1
                rows[count, 1] = off
                rows[count, 2] = best_len
                b = 0
                t = off
                while t > 0:
                    t >>= 1
                    b += 1
                total_bits += 2 * (b - 1) + 1
                b = 0
                t = best_len
                while t > 0:
                    t >>= 1
                    b += 1
                total_bits += 2 * (b - 1) + 1 + 1
                i += best_len
            else:
                rows[count, 0] = 0
                rows[count, 1] = buf[i]
                rows[count, 2] = 0
                total_bits += 9
                i += 1
            count += 1
        return count, total_bits

    _FAST_KERNEL = kernel
    return kernel


def _parse_fast(data: bytes):
    kernel = _get_fast_kernel()
    if kernel is None:
        return None
    n = len(data)
    buf = np.frombuffer(data, dtype=np.uint8)
    bits = max(12, min(18, n.bit_length() + 2))
    head = np.full(1 << bits, -1, dtype=np.int32)
    prev = np.empty(n, dtype=np.int32)
    rows = np.empty((max(n, 1), 3), dtype=np.int32)
    count, total_bits = kernel(buf, head, prev, rows, 32 - bits)
    return rows[:count], int(total_bits)


def _parse_rows(data: bytes):
    """Parse to (rows, total_bits) using the fast backend when available."""
    if len(data) == 0:
        return [], 0
    fast = _parse_fast(data)
    if fast is not None:
        return fast
    rows = _parse_pure(data)
    total = 0
    for kind, a, b in rows:
        if kind == 0:
            total += LITERAL_BITS
        else:
            total += 1 + gamma_bits(a) + gamma_bits(b)
    return rows, total


def lz_parse(data: bytes) -> list[Phrase]:
    """Greedy windowless parse of ``data`` into literal and match phrases."""
    rows, _ = _parse_rows(bytes(data))
    phrases = []
    for kind, a, b in rows:
        if kind == 0:
            phrases.append(Phrase.literal(int(a)))
        else:
            phrases.append(Phrase.match(int(a), int(b)))
    return phrases


def compressed_size(data: bytes) -> int:
    """Size in bits of the parsed representation of ``data``."""
    _, total = _parse_rows(bytes(data))
    return total


def concat_size(x: bytes, y: bytes) -> int:
    """compressed_size of the concatenation x || y.

    Kept as a named operation so callers never build concatenations ad hoc.
    """
    return compressed_size(bytes(x) + bytes(y))


def decode(phrases: Iterable[Phrase]) -> bytes:
    """Invert a parse.  Self-overlapping matches replicate their pattern."""
    out = bytearray()
    for phrase in phrases:
        if phrase.kind == "literal":
            out.append(phrase.literal_byte)
        else:
            start = len(out) - phrase.offset
            if start < 0:
                raise ValueError("match offset reaches before the start of output")
            if phrase.offset >= phrase.length:
                out += out[start : start + phrase.length]
            else:
                pattern = bytes(out[start:])
                reps = phrase.length // phrase.offset + 1
                out += (pattern * reps)[: phrase.length]
    return bytes(out)


def parse_cost_bits(phrases: Iterable[Phrase]) -> int:
    """Total bit cost of an explicit phrase list."""
    return sum(p.cost_bits for p in phrases)
