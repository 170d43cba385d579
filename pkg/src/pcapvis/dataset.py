"""Walk labeled capture collections and emit an image dataset.

Directory convention: one root of normal captures, one root of malware
captures. A capture's label comes solely from which root it was found
under; for malware, the first subdirectory below the root (if any) is
recorded as the family (e.g. malware/botnet/x.pcap -> family "botnet").

The manifest is line-delimited JSON, one object per image, fields in a
fixed order: image_path, label, malware_family, source_pcap,
chunk_index, split. image_path and source_pcap are relative paths, so
re-running the build on the same inputs gives byte-identical manifests
wherever the dataset lives.

Train/test assignment orders all images by a seeded hash of
(source_pcap, chunk_index) and cuts that ordering at round(n * ratio),
which gives exact split sizes while staying independent of file
discovery order. ``split_by_source`` instead cuts an ordering of whole
capture files, so chunks of one capture never straddle the split.
"""

from __future__ import annotations

import hashlib
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .colormap import ColorScheme, scheme_to_text
from .config import PipelineConfig
from .curves import CurveLayout
from .encoder import choose_order, encode_chunk, image_filename, write_png
from .errors import EmptyCorpus, EmptyManifest, InputFormatError, ManifestFormatError
from .pcap import chunk_stream, parse_pcap

logger = logging.getLogger(__name__)

LABEL_NORMAL = "normal"
LABEL_MALWARE = "malware"

MANIFEST_NAME = "manifest.jsonl"
IMAGES_SUBDIR = "images"

_MANIFEST_FIELDS = ("image_path", "label", "malware_family", "source_pcap", "chunk_index", "split")


@dataclass(frozen=True)
class ManifestEntry:
    image_path: str
    label: str
    malware_family: str | None
    source_pcap: str
    chunk_index: int
    split: str


@dataclass
class DatasetSummary:
    total: int
    counts: dict  # label -> split -> count
    family_percentages: dict  # family -> percent of malware images
    skipped_empty_sources: int = 0
    parse_errors: list = field(default_factory=list)


def _split_key(seed: int, source_pcap: str, chunk_index: int | None = None) -> str:
    material = f"{seed}\x00{source_pcap}"
    if chunk_index is not None:
        material += f"\x00{chunk_index}"
    return hashlib.sha256(material.encode("utf-8")).hexdigest()


def discover_pcaps(root: str | Path) -> list[Path]:
    root = Path(root)
    found = sorted(p for p in root.rglob("*.pcap") if p.is_file())
    if not found:
        raise EmptyCorpus(f"no .pcap files under {root}")
    return found


def _source_name(root: Path, path: Path, label: str) -> tuple[str, str | None]:
    """(manifest source_pcap, malware family) for one capture file."""
    rel = path.relative_to(root).as_posix()
    family = None
    if label == LABEL_MALWARE and "/" in rel:
        family = rel.split("/", 1)[0]
    return f"{label}/{rel}", family


def _source_id(source_pcap: str) -> str:
    stem = source_pcap[: -len(".pcap")] if source_pcap.endswith(".pcap") else source_pcap
    return stem.replace("/", "-")


def assign_splits(items: list[tuple[str, int]], seed: int, train_ratio: float,
                  split_by_source: bool = False) -> dict[tuple[str, int], str]:
    """Map every (source_pcap, chunk_index) to "train" or "test".

    The ordering key is a pure function of (seed, source_pcap,
    chunk_index); the cut point depends only on the corpus size, so the
    result is invariant under discovery-order permutations.
    """
    n_train = int(len(items) * train_ratio + 0.5)
    splits: dict[tuple[str, int], str] = {}
    if split_by_source:
        by_source: dict[str, list[tuple[str, int]]] = {}
        for item in items:
            by_source.setdefault(item[0], []).append(item)
        ordered_sources = sorted(by_source, key=lambda s: (_split_key(seed, s), s))
        assigned = 0
        for source in ordered_sources:
            split = "train" if assigned < n_train else "test"
            for item in by_source[source]:
                splits[item] = split
            if split == "train":
                assigned += len(by_source[source])
    else:
        ordered = sorted(items, key=lambda it: (_split_key(seed, it[0], it[1]), it))
        for rank, item in enumerate(ordered):
            splits[item] = "train" if rank < n_train else "test"
    return splits


def _encode_source(pcap_path: Path, source_pcap: str, config: PipelineConfig,
                   scheme: ColorScheme, images_dir: Path) -> list[tuple[str, int]]:
    """Encode one capture; returns (image_path, chunk_index) per image."""
    _, records = parse_pcap(pcap_path)
    source_id = _source_id(source_pcap)
    produced = []
    for chunk in chunk_stream(records, config.chunk_size, source_id=source_id):
        order = config.order if config.order is not None else choose_order(len(chunk.data))
        layout = CurveLayout(kind=config.layout_kind, order=order)
        image = encode_chunk(chunk, layout, scheme)
        name = image_filename(source_id, chunk.index, layout)
        write_png(image, images_dir / name)
        produced.append((f"{IMAGES_SUBDIR}/{name}", chunk.index))
    return produced


def build_dataset(normal_dir: str | Path, malware_dir: str | Path,
                  config: PipelineConfig) -> tuple[list[ManifestEntry], DatasetSummary]:
    """Encode both corpora, write images + manifest, return both."""
    scheme = ColorScheme(shading=config.shading)
    out_dir = Path(config.output_dir)
    images_dir = out_dir / IMAGES_SUBDIR
    images_dir.mkdir(parents=True, exist_ok=True)

    sources = []  # (source_pcap, family, label, path)
    for label, root in ((LABEL_NORMAL, Path(normal_dir)), (LABEL_MALWARE, Path(malware_dir))):
        for path in discover_pcaps(root):
            source_pcap, family = _source_name(root, path, label)
            sources.append((source_pcap, family, label, path))
    sources.sort(key=lambda s: s[0])

    parse_errors: list[str] = []
    skipped_empty = 0
    per_source_images: dict[str, list[tuple[str, int]]] = {}

    def run_one(entry):
        source_pcap, _family, _label, path = entry
        return source_pcap, _encode_source(path, source_pcap, config, scheme, images_dir)

    if config.jobs > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            futures = [(s, pool.submit(run_one, s)) for s in sources]
            results = []
            for s, fut in futures:
                try:
                    results.append(fut.result())
                except InputFormatError as exc:
                    parse_errors.append(f"{s[0]}: {exc}")
    else:
        results = []
        for s in sources:
            try:
                results.append(run_one(s))
            except InputFormatError as exc:
                parse_errors.append(f"{s[0]}: {exc}")

    for source_pcap, produced in results:
        if not produced:
            skipped_empty += 1
            logger.info("skipping %s: no payload bytes", source_pcap)
            continue
        per_source_images[source_pcap] = produced

    items = [(source_pcap, idx)
             for source_pcap, produced in per_source_images.items()
             for _path, idx in produced]
    splits = assign_splits(items, config.seed, config.train_ratio, config.split_by_source)

    manifest: list[ManifestEntry] = []
    for source_pcap, family, label, _path in sources:
        for img_path, idx in per_source_images.get(source_pcap, []):
            manifest.append(ManifestEntry(
                image_path=img_path,
                label=label,
                malware_family=family,
                source_pcap=source_pcap,
                chunk_index=idx,
                split=splits[(source_pcap, idx)],
            ))

    write_manifest(manifest, out_dir / MANIFEST_NAME)
    summary = summarize(manifest) if manifest else DatasetSummary(total=0, counts={}, family_percentages={})
    summary.skipped_empty_sources = skipped_empty
    summary.parse_errors = parse_errors
    (out_dir / "summary.json").write_text(json.dumps(asdict(summary), indent=2, sort_keys=True) + "\n")
    # exact palette the images were rendered under, for trainers and docs
    (out_dir / "scheme.txt").write_text(scheme_to_text(scheme))
    return manifest, summary


def summarize(manifest: list[ManifestEntry]) -> DatasetSummary:
    """Exact counts per label/split; family percentages over malware."""
    if not manifest:
        raise EmptyManifest("manifest has no entries")
    counts: dict[str, dict[str, int]] = {}
    family_counts: dict[str, int] = {}
    n_malware = 0
    for entry in manifest:
        counts.setdefault(entry.label, {"train": 0, "test": 0})
        counts[entry.label][entry.split] += 1
        if entry.label == LABEL_MALWARE:
            n_malware += 1
            family = entry.malware_family or "unspecified"
            family_counts[family] = family_counts.get(family, 0) + 1
    family_pct = {fam: 100.0 * n / n_malware for fam, n in sorted(family_counts.items())}
    return DatasetSummary(total=len(manifest), counts=counts, family_percentages=family_pct)


def format_summary(summary: DatasetSummary) -> str:
    lines = [f"total images: {summary.total}"]
    for label in sorted(summary.counts):
        per = summary.counts[label]
        lines.append(f"  {label:<8} train={per.get('train', 0):<6} test={per.get('test', 0)}")
    if summary.family_percentages:
        lines.append("malware families:")
        for fam, pct in summary.family_percentages.items():
            lines.append(f"  {fam:<16} {pct:6.2f}%")
    if summary.skipped_empty_sources:
        lines.append(f"sources skipped (no payload): {summary.skipped_empty_sources}")
    for err in summary.parse_errors:
        lines.append(f"parse error: {err}")
    return "\n".join(lines)


def write_manifest(manifest: list[ManifestEntry], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for entry in manifest:
            row = {name: getattr(entry, name) for name in _MANIFEST_FIELDS}
            fh.write(json.dumps(row) + "\n")


def read_manifest(path: str | Path) -> list[ManifestEntry]:
    entries = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
                entries.append(ManifestEntry(**{name: row[name] for name in _MANIFEST_FIELDS}))
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise ManifestFormatError(f"{path}:{lineno}: {exc}") from exc
            if entries[-1].split not in ("train", "test"):
                raise ManifestFormatError(f"{path}:{lineno}: bad split {entries[-1].split!r}")
    return entries
