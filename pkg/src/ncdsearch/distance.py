"""Normalized compression distance with a shared compressed-size cache.

``ncd(x, y)`` is max{C(xy)-C(x), C(yx)-C(y)} / max{C(x), C(y)}.  Both
concatenation orders are always evaluated: the parser is greedy and
asymmetric, so the two numerators genuinely differ and the max keeps the
result exactly symmetric.  Values land in [0, ~1.1]; a slight overshoot of 1
is expected from any real compressor, and negative numerators (concatenation
compressing better than either part) clamp to 0.
"""

from __future__ import annotations

import threading
from typing import Optional

from . import lz

# Real compressors overshoot the ideal NCD <= 1 bound a little.
MAX_EXPECTED = 1.1


class SizeCache:
    """Append-only map from exact byte content to compressed size in bits.

    Reads are lock-free; inserts are serialized so concurrent queries can
    share one cache.  Priming with a wrong size is a programming error and
    raises instead of silently poisoning distances.
    """

    def __init__(self) -> None:
        self._sizes: dict[bytes, int] = {}
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._sizes)

    def prime(self, data: bytes, bits: int) -> None:
        data = bytes(data)
        with self._lock:
            known = self._sizes.get(data)
            if known is not None and known != bits:
                raise ValueError(
                    f"cache already holds {known} bits for this content, got {bits}"
                )
            self._sizes[data] = bits

    def size_of(self, data: bytes) -> int:
        data = bytes(data)
        bits = self._sizes.get(data)
        if bits is None:
            bits = lz.compressed_size(data)
            with self._lock:
                self._sizes.setdefault(data, bits)
        return bits


def ncd(x: bytes, y: bytes, cache: Optional[SizeCache] = None) -> float:
    """Similarity distance between two byte sequences (0 similar, ~1 unrelated).

    Raises ValueError when both inputs are empty (the ratio is undefined).
    """
    x = bytes(x)
    y = bytes(y)
    if not x and not y:
        raise ValueError("ncd is undefined for two empty sequences")
    if cache is None:
        cache = SizeCache()
    cx = cache.size_of(x)
    cy = cache.size_of(y)
    cxy = lz.concat_size(x, y)
    cyx = lz.concat_size(y, x)
    numerator = max(cxy - cx, cyx - cy)
    if numerator < 0:
        numerator = 0
    return numerator / max(cx, cy)
