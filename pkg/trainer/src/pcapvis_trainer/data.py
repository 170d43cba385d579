"""Image loading for training and inference.

Images are upsampled with nearest-neighbor interpolation so the blocky
per-byte structure survives resizing, then scaled to [0, 1] float
tensors. The PNG text chunk ``scheme`` (the palette digest stamped by
the encoder) travels with each file and is used to refuse mixing
images rendered under different palettes.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import torch
from PIL import Image
from torch.utils.data import Dataset

from .manifest import LABEL_TO_INDEX, ManifestRow

# Fit/validate phase tag, so tests can intercept which paths each
# phase touches. Set by the training loop, read nowhere else.
_current_phase = "idle"


def set_phase(phase: str) -> None:
    global _current_phase
    _current_phase = phase


def current_phase() -> str:
    return _current_phase


def _open_image(path: Path) -> Image.Image:
    return Image.open(path)


def read_scheme_digest(path: Path) -> str | None:
    with _open_image(path) as img:
        img.load()
        return getattr(img, "text", {}).get("scheme")


def load_image_tensor(path: Path, input_resize: int) -> torch.Tensor:
    with _open_image(path) as img:
        rgb = img.convert("RGB").resize((input_resize, input_resize), Image.NEAREST)
        array = np.asarray(rgb, dtype=np.float32) / 255.0
    return torch.from_numpy(array).permute(2, 0, 1)


class ManifestImageDataset(Dataset):
    def __init__(self, rows: list[ManifestRow], root: Path, input_resize: int):
        self.rows = rows
        self.root = Path(root)
        self.input_resize = input_resize

    def __len__(self) -> int:
        return len(self.rows)

    def path_of(self, index: int) -> Path:
        return self.root / self.rows[index].image_path

    def __getitem__(self, index: int):
        row = self.rows[index]
        tensor = load_image_tensor(self.path_of(index), self.input_resize)
        return tensor, LABEL_TO_INDEX[row.label]
