"""Run a trained model over the manifest test split and export
predictions as line-delimited JSON records, one per image:

    {"image_path": ..., "predicted_label": ..., "score": ...}

``score`` is the malware probability (softmax); the label is malware
iff score >= 0.5, matching the evaluation harness's threshold
convention. Before inference every test image's palette digest (PNG
text chunk ``scheme``) is checked against the digest the model was
trained under.
"""

from __future__ import annotations

import json
from pathlib import Path

import torch
from torch.utils.data import DataLoader

from .data import ManifestImageDataset, read_scheme_digest
from .errors import SchemeMismatch, TrainerError
from .manifest import read_manifest, split_rows
from .train import TrainerConfig, build_model

DECISION_THRESHOLD = 0.5


def load_artifact(path: str | Path) -> tuple[torch.nn.Module, TrainerConfig, str | None]:
    try:
        payload = torch.load(path, map_location="cpu", weights_only=True)
    except Exception as exc:
        raise TrainerError(f"cannot load model artifact {path}: {exc}") from exc
    if not isinstance(payload, dict) or payload.get("format") != 1:
        raise TrainerError(f"unrecognized model artifact format in {path}")
    config = TrainerConfig(**payload["config"])
    model = build_model(config.architecture, pretrained=False)
    model.load_state_dict(payload["state_dict"])
    model.eval()
    return model, config, payload.get("scheme_digest")


def predict(artifact_path: str | Path, manifest_path: str | Path,
            out_path: str | Path) -> list[dict]:
    """Score the manifest's test split; write and return the records."""
    manifest_path = Path(manifest_path)
    model, config, trained_digest = load_artifact(artifact_path)
    rows = split_rows(read_manifest(manifest_path), "test")
    root = manifest_path.parent

    if trained_digest is not None:
        for row in rows:
            digest = read_scheme_digest(root / row.image_path)
            if digest is not None and digest != trained_digest:
                raise SchemeMismatch(
                    f"{row.image_path} was encoded under scheme {digest}, "
                    f"model was trained under {trained_digest}"
                )

    dataset = ManifestImageDataset(rows, root, config.input_resize)
    loader = DataLoader(dataset, batch_size=config.batch_size, shuffle=False, num_workers=0)
    scores: list[float] = []
    with torch.no_grad():
        for batch, _labels in loader:
            probs = torch.softmax(model(batch), dim=1)
            scores.extend(probs[:, 1].tolist())  # malware probability

    records = []
    for row, score in zip(rows, scores):
        label = "malware" if score >= DECISION_THRESHOLD else "normal"
        records.append({"image_path": row.image_path,
                        "predicted_label": label,
                        "score": round(float(score), 6)})
    with open(out_path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record) + "\n")
    return records
