"""Byte classification and byte-to-RGB color mapping.

Every byte value belongs to exactly one of five classes, following the
usual ASCII reading of the byte range:

    null              0x00                      pure black
    control           0x01-0x1F and 0x7F        green
    printable         0x20-0x7E                 blue
    extended          0x80-0xFE                 red
    nonbreaking_space 0xFF                      pure white

Hues can be rebound through a plain-text config, but black for 0x00 and
white for 0xFF are fixed, each hued class must own a distinct dominant
channel (so the class stays recoverable from the rendered color), and
the padding color (used for grid cells past the end of a chunk) must be
unreachable from any byte value.

Two shading modes exist. ``flat`` renders each class at its full base
hue. ``value_scaled`` (the default) keeps per-byte information: the
dominant channel carries ``64 + round(191 * (b - lo) / (hi - lo))``
where ``[lo, hi]`` is the byte's class span, other channels stay 0, so
no byte inside a hued class renders fully dark and the mapping is
injective within the class.
"""

from __future__ import annotations

import enum
import hashlib
from dataclasses import dataclass, field

import numpy as np

RGB = tuple[int, int, int]

BLACK: RGB = (0, 0, 0)
WHITE: RGB = (255, 255, 255)
DEFAULT_PADDING: RGB = (128, 128, 128)

SHADING_FLAT = "flat"
SHADING_VALUE_SCALED = "value_scaled"

_SCALE_FLOOR = 64
_SCALE_SPAN = 191


class ByteClass(enum.Enum):
    NULL = "null"
    PRINTABLE = "printable"
    CONTROL = "control"
    EXTENDED = "extended"
    NONBREAKING_SPACE = "nonbreaking_space"


# Inclusive [lo, hi] span used by value_scaled shading. The control
# class is not contiguous (0x01-0x1F plus 0x7F) but its span ends at
# 0x7F, which keeps the scaling monotone across the gap.
CLASS_SPAN: dict[ByteClass, tuple[int, int]] = {
    ByteClass.NULL: (0x00, 0x00),
    ByteClass.CONTROL: (0x01, 0x7F),
    ByteClass.PRINTABLE: (0x20, 0x7E),
    ByteClass.EXTENDED: (0x80, 0xFE),
    ByteClass.NONBREAKING_SPACE: (0xFF, 0xFF),
}

_HUED_CLASSES = (ByteClass.PRINTABLE, ByteClass.CONTROL, ByteClass.EXTENDED)

DEFAULT_HUES: dict[ByteClass, RGB] = {
    ByteClass.NULL: BLACK,
    ByteClass.PRINTABLE: (0, 0, 255),
    ByteClass.CONTROL: (0, 255, 0),
    ByteClass.EXTENDED: (255, 0, 0),
    ByteClass.NONBREAKING_SPACE: WHITE,
}


def classify_byte(b: int) -> ByteClass:
    """Assign a byte value 0..255 to its class. Total function."""
    if not 0 <= b <= 255:
        raise ValueError(f"byte value out of range: {b}")
    if b == 0x00:
        return ByteClass.NULL
    if b == 0xFF:
        return ByteClass.NONBREAKING_SPACE
    if 0x20 <= b <= 0x7E:
        return ByteClass.PRINTABLE
    if b <= 0x1F or b == 0x7F:
        return ByteClass.CONTROL
    return ByteClass.EXTENDED


def _dominant_channel(hue: RGB) -> int:
    return max(range(3), key=lambda i: hue[i])


@dataclass(frozen=True)
class ColorScheme:
    class_hue: dict[ByteClass, RGB] = field(default_factory=lambda: dict(DEFAULT_HUES))
    shading: str = SHADING_VALUE_SCALED
    padding_color: RGB = DEFAULT_PADDING

    def __post_init__(self):
        if self.shading not in (SHADING_FLAT, SHADING_VALUE_SCALED):
            raise ValueError(f"unknown shading mode: {self.shading!r}")
        if self.class_hue[ByteClass.NULL] != BLACK:
            raise ValueError("null bytes must map to pure black")
        if self.class_hue[ByteClass.NONBREAKING_SPACE] != WHITE:
            raise ValueError("0xFF must map to pure white")
        dominant = [_dominant_channel(self.class_hue[k]) for k in _HUED_CLASSES]
        if len(set(dominant)) != len(dominant):
            raise ValueError("hued classes must dominate distinct RGB channels")
        lut = np.array([color_of(b, self) for b in range(256)], dtype=np.uint8)
        lut.flags.writeable = False
        if tuple(self.padding_color) in {tuple(c) for c in lut.tolist()}:
            raise ValueError("padding color collides with a producible byte color")
        object.__setattr__(self, "_lut", lut)

    def digest(self) -> str:
        """Short stable identifier of the palette + shading."""
        return hashlib.sha256(scheme_to_text(self).encode("ascii")).hexdigest()[:12]

    def lookup_table(self) -> np.ndarray:
        """256x3 read-only uint8 table: row b is color_of(b)."""
        return self._lut  # type: ignore[attr-defined]


def color_of(b: int, scheme: ColorScheme | None = None) -> RGB:
    """Map one byte value to its RGB triple under the scheme."""
    scheme = scheme if scheme is not None else ColorScheme()
    klass = classify_byte(b)
    if klass is ByteClass.NULL:
        return BLACK
    if klass is ByteClass.NONBREAKING_SPACE:
        return WHITE
    hue = scheme.class_hue[klass]
    if scheme.shading == SHADING_FLAT:
        return hue
    lo, hi = CLASS_SPAN[klass]
    level = _SCALE_FLOOR + int(_SCALE_SPAN * (b - lo) / (hi - lo) + 0.5)
    out = [0, 0, 0]
    out[_dominant_channel(hue)] = level
    return tuple(out)  # type: ignore[return-value]


_CONFIG_CLASS_KEYS = {
    "null": ByteClass.NULL,
    "printable": ByteClass.PRINTABLE,
    "control": ByteClass.CONTROL,
    "extended": ByteClass.EXTENDED,
    "nonbreaking_space": ByteClass.NONBREAKING_SPACE,
}


def _hex_rgb(color: RGB) -> str:
    return "#{:02X}{:02X}{:02X}".format(*color)


def _parse_hex_rgb(text: str) -> RGB:
    text = text.strip().lstrip("#")
    if len(text) != 6:
        raise ValueError(f"expected 6 hex digits, got {text!r}")
    return tuple(int(text[i : i + 2], 16) for i in (0, 2, 4))  # type: ignore[return-value]


def scheme_to_text(scheme: ColorScheme) -> str:
    """Serialize as plain-text key = value lines."""
    lines = [f"shading = {scheme.shading}"]
    for key, klass in _CONFIG_CLASS_KEYS.items():
        lines.append(f"{key} = {_hex_rgb(scheme.class_hue[klass])}")
    lines.append(f"padding = {_hex_rgb(scheme.padding_color)}")
    return "\n".join(lines) + "\n"


def scheme_from_text(text: str) -> ColorScheme:
    """Parse the key = value form written by scheme_to_text."""
    hues = dict(DEFAULT_HUES)
    shading = SHADING_VALUE_SCALED
    padding = DEFAULT_PADDING
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = (part.strip() for part in line.partition("="))
        if key == "shading":
            shading = value
        elif key == "padding":
            padding = _parse_hex_rgb(value)
        elif key in _CONFIG_CLASS_KEYS:
            hues[_CONFIG_CLASS_KEYS[key]] = _parse_hex_rgb(value)
        else:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
    return ColorScheme(class_hue=hues, shading=shading, padding_color=padding)
