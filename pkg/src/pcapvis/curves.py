"""Bijective 1D-to-2D index layouts and a locality metric.

Two layouts are provided: the Hilbert space-filling curve (the default
for rendering, because nearby stream offsets land on nearby pixels) and
a plain scanline raster (the baseline the locality metric is compared
against).

The Hilbert mapping is the iterative bit-manipulation form, O(order)
per point, in the canonical orientation that starts at (0, 0), visits
(0, 1), (1, 1) and ends at (1, 0) at order 1; higher orders nest this
"U" recursively, so the order-k curve starts at (0, 0) and ends at
(2^k - 1, 0). Coordinates are (x, y) = (column, row).

``locality_score(layout, w)`` is the mean Euclidean distance in grid
space over all index pairs whose 1D offsets differ by at most ``w``
(offsets 1..w, every admissible start index). Lower means the layout
keeps byte neighborhoods more compact on the grid. The windowed mean,
rather than the single-offset mean, is what makes the Hilbert/scanline
comparison meaningful: a raster is perfectly local at offsets that are
exact multiples of its width and pathological elsewhere, and averaging
over the window captures both.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IndexOutOfRange

MAX_ORDER = 8

KIND_HILBERT = "hilbert"
KIND_SCANLINE = "scanline"


def hilbert_d_to_xy(order: int, d: int) -> tuple[int, int]:
    """Map curve index d to (x, y) on the 2^order x 2^order grid."""
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    capacity = 1 << (2 * order)
    if not 0 <= d < capacity:
        raise IndexOutOfRange(f"d={d} outside [0, {capacity})")
    x = y = 0
    t = d
    s = 1
    side = 1 << order
    while s < side:
        rx = 1 & (t >> 1)
        ry = 1 & (t ^ rx)
        if ry == 0:
            if rx == 1:
                x = s - 1 - x
                y = s - 1 - y
            x, y = y, x
        x += s * rx
        y += s * ry
        t >>= 2
        s <<= 1
    return x, y


def hilbert_coords(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized hilbert_d_to_xy for d = 0 .. 4^order - 1.

    Same bit-twiddling as the scalar form, applied to whole index
    arrays, so building the full 65536-point order-8 table is cheap.
    """
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    capacity = 1 << (2 * order)
    t = np.arange(capacity, dtype=np.int64)
    x = np.zeros(capacity, dtype=np.int64)
    y = np.zeros(capacity, dtype=np.int64)
    s = 1
    side = 1 << order
    while s < side:
        rx = 1 & (t >> 1)
        ry = 1 & (t ^ rx)
        flip = (ry == 0) & (rx == 1)
        x[flip] = s - 1 - x[flip]
        y[flip] = s - 1 - y[flip]
        swap = ry == 0
        x[swap], y[swap] = y[swap], x[swap]
        x += s * rx
        y += s * ry
        t >>= 2
        s <<= 1
    return x, y


def scanline_d_to_xy(width: int, d: int) -> tuple[int, int]:
    """Raster layout: left to right, top to bottom."""
    if width < 1:
        raise ValueError(f"width must be >= 1, got {width}")
    if d < 0:
        raise IndexOutOfRange(f"d must be >= 0, got {d}")
    return d % width, d // width


@dataclass(frozen=True)
class CurveLayout:
    """A bijection from {0 .. capacity-1} onto a square pixel grid."""

    kind: str
    order: int

    def __post_init__(self):
        if self.kind not in (KIND_HILBERT, KIND_SCANLINE):
            raise ValueError(f"unknown layout kind: {self.kind!r}")
        if not 1 <= self.order <= MAX_ORDER:
            raise ValueError(f"order must be in 1..{MAX_ORDER}, got {self.order}")

    @property
    def side(self) -> int:
        return 1 << self.order

    @property
    def capacity(self) -> int:
        return self.side * self.side

    def d_to_xy(self, d: int) -> tuple[int, int]:
        if not 0 <= d < self.capacity:
            raise IndexOutOfRange(f"d={d} outside [0, {self.capacity})")
        if self.kind == KIND_HILBERT:
            return hilbert_d_to_xy(self.order, d)
        return scanline_d_to_xy(self.side, d)

    def coords(self) -> tuple[np.ndarray, np.ndarray]:
        """(xs, ys) arrays over all indices, in index order. Cached."""
        return _coords_cached(self.kind, self.order)

    def label(self) -> str:
        return f"{self.kind}:o{self.order}"


_COORD_CACHE: dict[tuple[str, int], tuple[np.ndarray, np.ndarray]] = {}


def _coords_cached(kind: str, order: int) -> tuple[np.ndarray, np.ndarray]:
    key = (kind, order)
    if key not in _COORD_CACHE:
        side = 1 << order
        if kind == KIND_HILBERT:
            x, y = hilbert_coords(order)
        else:
            d = np.arange(side * side, dtype=np.int64)
            x, y = d % side, d // side
        x.flags.writeable = False
        y.flags.writeable = False
        _COORD_CACHE[key] = (x, y)
    return _COORD_CACHE[key]


def pair_distance_mean(layout: CurveLayout, offset: int) -> float:
    """Mean grid distance over all index pairs exactly ``offset`` apart."""
    capacity = layout.capacity
    if not 1 <= offset < capacity:
        raise IndexOutOfRange(f"offset={offset} outside [1, {capacity})")
    x, y = layout.coords()
    dx = x[offset:] - x[:-offset]
    dy = y[offset:] - y[:-offset]
    return float(np.mean(np.sqrt(dx * dx + dy * dy)))


def locality_score(layout: CurveLayout, window: int) -> float:
    """Mean grid distance over all index pairs at most ``window`` apart.

    Deterministic full enumeration: every pair (i, i+o) for o in 1..w
    and i in [0, capacity - o) contributes once.
    """
    capacity = layout.capacity
    if not 1 <= window < capacity:
        raise IndexOutOfRange(f"window={window} outside [1, {capacity})")
    x, y = layout.coords()
    total = 0.0
    pairs = 0
    for offset in range(1, window + 1):
        dx = x[offset:] - x[:-offset]
        dy = y[offset:] - y[:-offset]
        total += float(np.sum(np.sqrt(dx * dx + dy * dy)))
        pairs += capacity - offset
    return total / pairs


def curve_dump_lines(kind: str, order: int):
    """Text debug dump: one "d x y" line per index, for diffing."""
    layout = CurveLayout(kind=kind, order=order)
    x, y = layout.coords()
    for d in range(layout.capacity):
        yield f"{d} {x[d]} {y[d]}"
