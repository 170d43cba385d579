"""Render one chunk of capture bytes as a deterministic RGB image.

Byte d of the chunk colors the pixel at layout(d); grid cells past the
last byte are filled with the scheme's padding color, so the index-to-
pixel map never depends on chunk length. Images are written as 8-bit
RGB PNGs with pinned compression settings, making output files
byte-identical across runs, and carry their provenance as PNG text
chunks (source, chunk, layout, scheme).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image
from PIL.PngImagePlugin import PngInfo

from .colormap import ColorScheme
from .curves import MAX_ORDER, CurveLayout
from .errors import ChunkTooLarge, OversizeData
from .pcap import Chunk

# Pinned so golden files stay stable: zlib level 6, no optimizer pass.
PNG_COMPRESS_LEVEL = 6

META_KEYS = ("source", "chunk", "layout", "scheme")


@dataclass(frozen=True)
class EncodedImage:
    width: int
    height: int
    pixels: np.ndarray  # height x width x 3, uint8, row-major
    meta: dict[str, str] = field(default_factory=dict)


def choose_order(data_len: int) -> int:
    """Smallest Hilbert order whose grid holds data_len bytes (max 8)."""
    if data_len < 1:
        raise ValueError(f"data_len must be >= 1, got {data_len}")
    if data_len > 4**MAX_ORDER:
        raise OversizeData(f"{data_len} bytes exceeds the 4^{MAX_ORDER} grid capacity")
    order = 1
    while 4**order < data_len:
        order += 1
    return order


def encode_chunk(chunk: Chunk, layout: CurveLayout, scheme: ColorScheme | None = None) -> EncodedImage:
    """Map every chunk byte to its grid cell color; pad the rest."""
    scheme = scheme if scheme is not None else ColorScheme()
    n = len(chunk.data)
    if n == 0:
        raise ValueError("cannot encode an empty chunk")
    if n > layout.capacity:
        raise ChunkTooLarge(f"{n} bytes > layout capacity {layout.capacity}")
    side = layout.side
    pixels = np.empty((side, side, 3), dtype=np.uint8)
    pixels[:, :] = scheme.padding_color
    xs, ys = layout.coords()
    values = np.frombuffer(chunk.data, dtype=np.uint8)
    pixels[ys[:n], xs[:n]] = scheme.lookup_table()[values]
    meta = {
        "source": chunk.source_id,
        "chunk": str(chunk.index),
        "layout": layout.label(),
        "scheme": scheme.digest(),
    }
    return EncodedImage(width=side, height=side, pixels=pixels, meta=meta)


def image_filename(source_id: str, chunk_index: int, layout: CurveLayout) -> str:
    return f"{source_id}__{chunk_index}__{layout.kind}__o{layout.order}.png"


def write_png(image: EncodedImage, path: str | Path) -> None:
    """Write an 8-bit RGB PNG; identical inputs produce identical bytes."""
    info = PngInfo()
    for key in META_KEYS:
        if key in image.meta:
            info.add_text(key, image.meta[key])
    pil = Image.fromarray(image.pixels, mode="RGB")
    pil.save(path, format="PNG", pnginfo=info, compress_level=PNG_COMPRESS_LEVEL, optimize=False)


def read_png(path: str | Path) -> EncodedImage:
    """Load a PNG written by write_png, including its text metadata."""
    with Image.open(path) as pil:
        pil.load()
        pixels = np.asarray(pil.convert("RGB"), dtype=np.uint8)
        meta = {k: v for k, v in getattr(pil, "text", {}).items()}
    return EncodedImage(width=pixels.shape[1], height=pixels.shape[0], pixels=pixels, meta=meta)
