"""Classifier evaluation: confusion counts, derived metrics, and
consistency checking of reported result tables.

Malware is the positive class throughout: TP counts malware images
flagged as malware, TN normal images passed as normal, FP normal
images flagged, FN malware images missed. Ratio metrics with a zero
denominator are reported as undefined with a reason, never silently
as 0, since a collapsed classifier (no positive predictions at all)
should look broken rather than mediocre.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .dataset import ManifestEntry
from .errors import (
    DuplicatePrediction,
    EmptyConfusion,
    MissingPrediction,
    PredictionFormatError,
    UnknownImage,
)

DEFAULT_THRESHOLD = 0.5

LABELS = ("normal", "malware")


@dataclass(frozen=True)
class PredictionRecord:
    image_path: str
    predicted_label: str
    score: float | None = None  # malware probability when present


@dataclass
class MetricsReport:
    tp: int
    tn: int
    fp: int
    fn: int
    accuracy: float | None
    precision: float | None
    recall: float | None
    f1: float | None
    undefined: dict  # metric name -> reason, for absent values

    def to_dict(self) -> dict:
        return {
            "tp": self.tp, "tn": self.tn, "fp": self.fp, "fn": self.fn,
            "accuracy": self.accuracy, "precision": self.precision,
            "recall": self.recall, "f1": self.f1, "undefined": self.undefined,
        }


def load_predictions(path: str | Path, threshold: float = DEFAULT_THRESHOLD) -> list[PredictionRecord]:
    """Read line-delimited JSON predictions.

    Each line needs image_path plus a predicted_label, a score, or
    both. When both are present they must agree with the decision
    threshold (label == malware iff score >= threshold).
    """
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise PredictionFormatError(f"{path}:{lineno}: {exc}") from exc
            if not isinstance(row, dict) or "image_path" not in row:
                raise PredictionFormatError(f"{path}:{lineno}: missing image_path")
            score = row.get("score")
            label = row.get("predicted_label")
            if score is None and label is None:
                raise PredictionFormatError(
                    f"{path}:{lineno}: need predicted_label or score"
                )
            if score is not None:
                if not isinstance(score, (int, float)) or not 0.0 <= score <= 1.0:
                    raise PredictionFormatError(f"{path}:{lineno}: score {score!r} not in [0, 1]")
                implied = "malware" if score >= threshold else "normal"
                if label is None:
                    label = implied
                elif label != implied:
                    raise PredictionFormatError(
                        f"{path}:{lineno}: label {label!r} disagrees with "
                        f"score {score} at threshold {threshold}"
                    )
            if label not in LABELS:
                raise PredictionFormatError(f"{path}:{lineno}: bad label {label!r}")
            records.append(PredictionRecord(image_path=row["image_path"],
                                            predicted_label=label, score=score))
    return records


def confusion(manifest: list[ManifestEntry], predictions: list[PredictionRecord],
              positive_label: str = "malware") -> tuple[int, int, int, int]:
    """Join predictions against the manifest's test split.

    Every test-split entry must have exactly one prediction and every
    prediction must refer to a test-split image.
    """
    truth = {e.image_path: e.label for e in manifest if e.split == "test"}
    seen: set[str] = set()
    tp = tn = fp = fn = 0
    for pred in predictions:
        if pred.image_path not in truth:
            raise UnknownImage(f"prediction for unknown test image {pred.image_path!r}")
        if pred.image_path in seen:
            raise DuplicatePrediction(f"multiple predictions for {pred.image_path!r}")
        seen.add(pred.image_path)
        actual_pos = truth[pred.image_path] == positive_label
        predicted_pos = pred.predicted_label == positive_label
        if actual_pos and predicted_pos:
            tp += 1
        elif actual_pos:
            fn += 1
        elif predicted_pos:
            fp += 1
        else:
            tn += 1
    missing = set(truth) - seen
    if missing:
        sample = sorted(missing)[:3]
        raise MissingPrediction(f"{len(missing)} test images without predictions, e.g. {sample}")
    return tp, tn, fp, fn


def metrics(tp: int, tn: int, fp: int, fn: int) -> MetricsReport:
    """Accuracy, precision, recall, F1 from the confusion counts."""
    if min(tp, tn, fp, fn) < 0:
        raise ValueError("confusion counts must be non-negative")
    total = tp + tn + fp + fn
    if total == 0:
        raise EmptyConfusion("all four confusion counts are zero")
    undefined: dict[str, str] = {}
    accuracy = (tp + tn) / total

    if tp + fp > 0:
        precision = tp / (tp + fp)
    else:
        precision = None
        undefined["precision"] = "undefined (no positive predictions)"
    if tp + fn > 0:
        recall = tp / (tp + fn)
    else:
        recall = None
        undefined["recall"] = "undefined (no positive instances)"
    if precision is None or recall is None:
        f1 = None
        undefined["f1"] = "undefined (precision or recall undefined)"
    elif precision + recall == 0:
        f1 = None
        undefined["f1"] = "undefined (precision and recall both zero)"
    else:
        f1 = 2.0 * precision * recall / (precision + recall)
    return MetricsReport(tp=tp, tn=tn, fp=fp, fn=fn, accuracy=accuracy,
                         precision=precision, recall=recall, f1=f1, undefined=undefined)


def f1_from(precision: float, recall: float) -> float | None:
    if precision + recall == 0:
        return None
    return 2.0 * precision * recall / (precision + recall)


@dataclass(frozen=True)
class RowVerdict:
    name: str
    f1_reported: float
    f1_computed: float | None
    consistent: bool


# Reported F1 must match the F1 recomputed from the row's own P and R
# to within 0.05 percentage points (two-decimal rounding slack).
CONSISTENCY_TOLERANCE_PP = 0.05


def consistency_check(rows: list[tuple[str, float, float, float]]) -> list[RowVerdict]:
    """Check reported (precision, recall, f1) percentage rows.

    Each row is (name, precision_pct, recall_pct, f1_pct).
    """
    verdicts = []
    for name, p_pct, r_pct, f1_pct in rows:
        f1_computed = f1_from(p_pct / 100.0, r_pct / 100.0)
        if f1_computed is None:
            verdicts.append(RowVerdict(name, f1_pct, None, consistent=f1_pct == 0.0))
            continue
        f1_computed_pct = 100.0 * f1_computed
        consistent = abs(f1_computed_pct - f1_pct) <= CONSISTENCY_TOLERANCE_PP
        verdicts.append(RowVerdict(name, f1_pct, f1_computed_pct, consistent))
    return verdicts


def _fmt(value: float | None, reason: dict, key: str) -> str:
    if value is None:
        return reason.get(key, "undefined")
    return f"{100.0 * value:6.2f}%"


def format_report(malware_view: MetricsReport, normal_view: MetricsReport) -> str:
    """Two-view text report: malware-positive (primary) and normal-positive."""
    lines = [
        f"confusion (malware positive): tp={malware_view.tp} tn={malware_view.tn} "
        f"fp={malware_view.fp} fn={malware_view.fn}",
        f"  accuracy : {_fmt(malware_view.accuracy, malware_view.undefined, 'accuracy')}",
        f"  precision: {_fmt(malware_view.precision, malware_view.undefined, 'precision')}",
        f"  recall   : {_fmt(malware_view.recall, malware_view.undefined, 'recall')}",
        f"  f1       : {_fmt(malware_view.f1, malware_view.undefined, 'f1')}",
        "with normal as the positive class:",
        f"  precision: {_fmt(normal_view.precision, normal_view.undefined, 'precision')}",
        f"  recall   : {_fmt(normal_view.recall, normal_view.undefined, 'recall')}",
        f"  f1       : {_fmt(normal_view.f1, normal_view.undefined, 'f1')}",
    ]
    return "\n".join(lines)
