"""Engine configuration shared by the CLI and the HTTP service.

Config files are plain ``key = value`` lines ('#' starts a comment); CLI
flags override file values.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path

from .corpus import ConfigError, IngestConfig


@dataclass(frozen=True)
class EngineConfig:
    n_max_bins: int = 32
    overlap_fraction: float = 0.10
    alpha: float = 0.05
    max_blocks_shown: int = 50
    gtable_replicates: int = 10000
    rng_seed: int = 0
    min_remainder_fraction: float = 0.5

    def __post_init__(self) -> None:
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.max_blocks_shown < 1:
            raise ConfigError("max_blocks_shown must be >= 1")
        if self.gtable_replicates < 1:
            raise ConfigError("gtable_replicates must be >= 1")
        # bin and overlap ranges are validated by IngestConfig
        self.ingest_config()

    def ingest_config(self) -> IngestConfig:
        return IngestConfig(
            n_max_bins=self.n_max_bins,
            overlap_fraction=self.overlap_fraction,
            min_remainder_fraction=self.min_remainder_fraction,
        )


_INT_KEYS = {"n_max_bins", "max_blocks_shown", "gtable_replicates", "rng_seed"}
_FLOAT_KEYS = {"overlap_fraction", "alpha", "min_remainder_fraction"}


def parse_config_text(text: str) -> dict:
    """Parse key = value lines into a dict of typed config values."""
    known = {f.name for f in fields(EngineConfig)}
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected key = value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in known:
            raise ConfigError(f"config line {lineno}: unknown key {key!r}")
        try:
            if key in _INT_KEYS:
                values[key] = int(value)
            elif key in _FLOAT_KEYS:
                values[key] = float(value)
            else:
                values[key] = value
        except ValueError as exc:
            raise ConfigError(f"config line {lineno}: bad value for {key}: {value!r}") from exc
    return values


def load_config(path: str | Path | None = None, **overrides) -> EngineConfig:
    """Build an EngineConfig from an optional file plus explicit overrides."""
    values: dict = {}
    if path is not None:
        values.update(parse_config_text(Path(path).read_text()))
    values.update({k: v for k, v in overrides.items() if v is not None})
    return EngineConfig(**values)
