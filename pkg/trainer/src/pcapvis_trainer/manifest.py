"""Reader for the image-dataset manifest format.

The manifest is line-delimited JSON; each row names an image (path
relative to the manifest's directory), its label ("normal" or
"malware") and its split ("train" or "test"). Only the fields this
trainer consumes are modeled; unknown fields are ignored so the format
can grow on the producer side.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import ManifestError

LABELS = ("normal", "malware")
LABEL_TO_INDEX = {label: i for i, label in enumerate(LABELS)}


@dataclass(frozen=True)
class ManifestRow:
    image_path: str
    label: str
    split: str


def read_manifest(path: str | Path) -> list[ManifestRow]:
    path = Path(path)
    rows = []
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from exc
    for lineno, line in enumerate(lines, 1):
        line = line.strip()
        if not line:
            continue
        try:
            raw = json.loads(line)
            row = ManifestRow(image_path=raw["image_path"], label=raw["label"],
                              split=raw["split"])
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise ManifestError(f"{path}:{lineno}: {exc}") from exc
        if row.label not in LABELS or row.split not in ("train", "test"):
            raise ManifestError(f"{path}:{lineno}: bad label/split {row}")
        rows.append(row)
    if not rows:
        raise ManifestError(f"{path}: manifest has no entries")
    return rows


def split_rows(rows: list[ManifestRow], split: str) -> list[ManifestRow]:
    return [r for r in rows if r.split == split]
