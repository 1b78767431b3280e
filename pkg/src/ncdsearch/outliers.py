"""Lower-outlier detection for distance samples.

A sample of distances from a query to the blocks of one size bin is treated
as mostly irrelevant and approximately normal.  A value is flagged as a
relevant candidate when (M - x) / S exceeds a critical threshold, where M is
the sample median and S the median absolute deviation.

The threshold g(N; alpha) is calibrated so that a clean sample of N normals
shows no flag with probability 1 - alpha, judged by the two-sided statistic
T = max_i |X_i - M| / S.  g has no closed form and is estimated by Monte
Carlo; estimates depend only on (N, alpha, replicates, seed) and are cached
in a small table that can be persisted as JSON.

Sweep endpoints are handled outside the simulation: alpha = 0 yields an
infinite threshold (nothing flagged) and alpha = 1 yields threshold 0
(everything strictly below the median flagged, ties at the median excluded).
"""

from __future__ import annotations

import json
import math
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

GTABLE_FORMAT_VERSION = 1

# Replicates are drawn in chunks of this many rows; the generated stream is
# identical to drawing one replicate at a time from the same generator.
_CHUNK_ROWS = 1024

# Substitute scale for all-tied samples, relative to max(|M|, 1).
_ZERO_MAD_EPS = 1e-9


@dataclass(frozen=True)
class RobustStats:
    """Median, median absolute deviation and size of a sample."""

    median: float
    mad: float
    n: int


@dataclass(frozen=True)
class OutlierVerdict:
    flagged_indices: frozenset[int]
    g_used: float
    stats: RobustStats


def robust_stats(sample: Sequence[float]) -> RobustStats:
    """Median and MAD of a non-empty sample (even sizes average the two
    central order statistics)."""
    arr = np.asarray(sample, dtype=float)
    if arr.size == 0:
        raise ValueError("robust_stats requires a non-empty sample")
    median = float(np.median(arr))
    mad = float(np.median(np.abs(arr - median)))
    return RobustStats(median=median, mad=mad, n=int(arr.size))


def _quantile_index(alpha: float, replicates: int) -> int:
    """1-based order statistic index for the empirical (1-alpha) quantile.

    The tiny nudge keeps ceil() faithful to exact arithmetic when
    (1-alpha)*replicates is an integer that floating point overshoots.
    """
    k = math.ceil((1.0 - alpha) * replicates - 1e-9)
    return max(1, min(replicates, k))


def _t_statistics(n: int, replicates: int, seed: int) -> np.ndarray:
    """Monte Carlo draws of T = max|X - M| / S over `replicates` samples of
    n standard normals.  Replicate r consumes draws [r*n, (r+1)*n) of
    default_rng(seed); degenerate replicates (S = 0) are redrawn from the
    stream tail, which has probability zero for continuous normals.
    """
    if n < 3:
        raise ValueError("threshold calibration needs sample size >= 3")
    if replicates < 1:
        raise ValueError("need at least one replicate")
    rng = np.random.default_rng(seed)
    out = np.empty(replicates, dtype=float)
    done = 0
    while done < replicates:
        rows = min(_CHUNK_ROWS, replicates - done)
        draws = rng.standard_normal((rows, n))
        med = np.median(draws, axis=1)
        dev = np.abs(draws - med[:, None])
        mad = np.median(dev, axis=1)
        good = mad > 0.0
        t = np.max(dev[good], axis=1) / mad[good]
        out[done : done + t.size] = t
        done += t.size
    return out


def estimate_g(n: int, alpha: float, replicates: int = 10000, seed: int = 0) -> float:
    """Monte Carlo estimate of the standardization threshold g(n; alpha).

    Intended use is replicates >= 1000; smaller values are accepted so the
    estimator can be checked against brute-force references.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie strictly between 0 and 1")
    t = np.sort(_t_statistics(n, replicates, seed))
    return float(t[_quantile_index(alpha, replicates) - 1])


def hampel_lower(sample: Sequence[float], g: float) -> OutlierVerdict:
    """Flag the sample entries whose drop below the median exceeds g MADs.

    An all-tied sample has S = 0; a tiny substitute scale keeps the rule
    defined (and flags nothing, as no value is strictly below the median).
    """
    arr = np.asarray(sample, dtype=float)
    if arr.size < 3:
        raise ValueError("hampel_lower requires at least 3 values")
    stats = robust_stats(arr)
    scale = stats.mad
    if scale == 0.0:
        scale = _ZERO_MAD_EPS * max(abs(stats.median), 1.0)
    flagged = np.nonzero((stats.median - arr) / scale > g)[0]
    return OutlierVerdict(
        flagged_indices=frozenset(int(i) for i in flagged),
        g_used=float(g),
        stats=stats,
    )


@dataclass
class GTable:
    """Cache of g(N; alpha) estimates for one (replicates, seed) pair.

    Thread contract: reads are unsynchronized, inserts are serialized.  The
    per-N sorted T statistics are kept in memory so sweeping alpha costs one
    simulation per sample size, not one per grid point.
    """

    replicates: int = 10000
    rng_seed: int = 0
    entries: dict[tuple[int, float], float] = field(default_factory=dict)
    _t_cache: dict[int, np.ndarray] = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def threshold(self, n: int, alpha: float) -> float:
        """g for a sample of size n at level alpha, including sweep endpoints."""
        if not 0.0 <= alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")
        if alpha == 0.0:
            return math.inf
        if alpha == 1.0:
            return 0.0
        key = (int(n), float(alpha))
        hit = self.entries.get(key)
        if hit is not None:
            return hit
        with self._lock:
            hit = self.entries.get(key)
            if hit is not None:
                return hit
            t = self._t_cache.get(key[0])
            if t is None:
                t = np.sort(_t_statistics(key[0], self.replicates, self.rng_seed))
                self._t_cache[key[0]] = t
            g = float(t[_quantile_index(alpha, self.replicates) - 1])
            self.entries[key] = g
            return g

    def save(self, path: str | Path) -> None:
        rows = [
            {"n": n, "alpha": alpha, "g": g}
            for (n, alpha), g in sorted(self.entries.items())
        ]
        payload = {
            "format_version": GTABLE_FORMAT_VERSION,
            "replicates": self.replicates,
            "rng_seed": self.rng_seed,
            "entries": rows,
        }
        Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "GTable":
        payload = json.loads(Path(path).read_text())
        version = payload.get("format_version")
        if version != GTABLE_FORMAT_VERSION:
            raise ValueError(f"unsupported g-table format version: {version!r}")
        table = cls(replicates=int(payload["replicates"]), rng_seed=int(payload["rng_seed"]))
        for row in payload["entries"]:
            table.entries[(int(row["n"]), float(row["alpha"]))] = float(row["g"])
        return table

    @classmethod
    def load_or_create(cls, path: str | Path, replicates: int, rng_seed: int) -> "GTable":
        """Reuse a persisted table when its provenance matches, else start fresh."""
        path = Path(path)
        if path.exists():
            try:
                table = cls.load(path)
            except (ValueError, KeyError, json.JSONDecodeError):
                return cls(replicates=replicates, rng_seed=rng_seed)
            if table.replicates == replicates and table.rng_seed == rng_seed:
                return table
        return cls(replicates=replicates, rng_seed=rng_seed)
