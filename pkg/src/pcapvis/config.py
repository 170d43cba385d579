"""Pipeline configuration shared by the CLI and the dataset builder."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

from .colormap import SHADING_FLAT, SHADING_VALUE_SCALED
from .curves import KIND_HILBERT, KIND_SCANLINE
from .pcap import DEFAULT_CHUNK_SIZE


@dataclass
class PipelineConfig:
    chunk_size: int = DEFAULT_CHUNK_SIZE
    layout_kind: str = KIND_HILBERT
    order: int | None = None  # None = auto via choose_order
    shading: str = SHADING_VALUE_SCALED
    seed: int = 0
    train_ratio: float = 0.8
    split_by_source: bool = False
    jobs: int = 1
    output_dir: str = "out"

    def __post_init__(self):
        if not 0.0 < self.train_ratio < 1.0:
            raise ValueError(f"train_ratio must be in (0, 1), got {self.train_ratio}")
        if self.chunk_size < 1 or self.chunk_size > DEFAULT_CHUNK_SIZE:
            raise ValueError(
                f"chunk_size must be in 1..{DEFAULT_CHUNK_SIZE}, got {self.chunk_size}"
            )
        if self.layout_kind not in (KIND_HILBERT, KIND_SCANLINE):
            raise ValueError(f"unknown layout kind: {self.layout_kind!r}")
        if self.shading not in (SHADING_FLAT, SHADING_VALUE_SCALED):
            raise ValueError(f"unknown shading mode: {self.shading!r}")
        if self.jobs < 1:
            raise ValueError(f"jobs must be >= 1, got {self.jobs}")

    def to_dict(self) -> dict:
        return asdict(self)

    def write_echo(self, directory: str | Path) -> None:
        """Record the effective config next to the outputs it produced."""
        path = Path(directory) / "run-config.json"
        path.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")


def merge_config(defaults: PipelineConfig | None = None, file_values: dict | None = None,
                 cli_values: dict | None = None) -> PipelineConfig:
    """Precedence: CLI flags > config file > defaults."""
    merged = (defaults or PipelineConfig()).to_dict()
    for layer in (file_values or {}, cli_values or {}):
        for key, value in layer.items():
            if value is None:
                continue
            if key not in merged:
                raise ValueError(f"unknown config key: {key!r}")
            merged[key] = value
    return PipelineConfig(**merged)
