import json
import random

import numpy as np
import pytest
from PIL import Image
from PIL.PngImagePlugin import PngInfo

SCHEME_DIGEST = "0a1b2c3d4e5f"


def write_toy_png(path, kind, rng, scheme=SCHEME_DIGEST, side=32):
    """Hand-built stand-ins for encoder output.

    "normal" images are mid-blue speckle, "malware" images are mostly
    black with white blotches, so the classes are visually separable.
    """
    pixels = np.zeros((side, side, 3), dtype=np.uint8)
    if kind == "normal":
        pixels[:, :, 2] = rng.integers(64, 256, size=(side, side))
    else:
        white = rng.random((side, side)) < 0.25
        pixels[white] = 255
    info = PngInfo()
    info.add_text("source", "toy")
    info.add_text("chunk", "0")
    info.add_text("layout", "hilbert:o5")
    info.add_text("scheme", scheme)
    Image.fromarray(pixels, mode="RGB").save(path, format="PNG", pnginfo=info)


def build_toy_dataset(root, n_train_each=12, n_test_each=8, seed=0,
                      scheme=SCHEME_DIGEST, test_scheme=None):
    """Write images + manifest under root; returns the manifest path."""
    rng = np.random.default_rng(seed)
    images = root / "images"
    images.mkdir(parents=True, exist_ok=True)
    rows = []
    for label in ("normal", "malware"):
        for split, count in (("train", n_train_each), ("test", n_test_each)):
            for i in range(count):
                name = f"{label}_{split}_{i}.png"
                digest = test_scheme if (split == "test" and test_scheme) else scheme
                write_toy_png(images / name, label, rng, scheme=digest)
                rows.append({
                    "image_path": f"images/{name}",
                    "label": label,
                    "malware_family": "botnet" if label == "malware" else None,
                    "source_pcap": f"{label}/toy.pcap",
                    "chunk_index": i,
                    "split": split,
                })
    manifest = root / "manifest.jsonl"
    manifest.write_text("".join(json.dumps(r) + "\n" for r in rows))
    return manifest


@pytest.fixture
def toy_manifest(tmp_path):
    return build_toy_dataset(tmp_path)


@pytest.fixture
def fast_config():
    from pcapvis_trainer.train import TrainerConfig

    def factory(**kwargs):
        defaults = dict(architecture="resnet34", epochs=2, batch_size=6,
                        learning_rate=0.05, input_resize=48, seed=1,
                        pretrained=False)
        defaults.update(kwargs)
        return TrainerConfig(**defaults)
    return factory
