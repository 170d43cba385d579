"""Fine-tune a residual CNN on a manifest dataset.

Transfer-learning shape: a torchvision ResNet (50 or 34 layers) with
its final fully-connected layer replaced by a fresh 2-class head. By
default the backbone is frozen and only the head trains, with plain
SGD (momentum 0.9) at a fixed learning rate. ImageNet starting weights
are requested with ``pretrained`` (needs network access to fetch them
once); ``pretrained=False`` trains the same architecture from random
initialization, which is the only option in offline environments.

The manifest's test split doubles as the per-epoch validation set and
the training loop logs one row per epoch (train loss, validation loss,
validation accuracy). Validation images are only ever touched in the
no-grad evaluate phase; the fit phase reads train-split images
exclusively.
"""

from __future__ import annotations

import csv
import logging
import math
import random
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
import torch
from torch import nn
from torch.utils.data import DataLoader

from .data import ManifestImageDataset, read_scheme_digest, set_phase
from .errors import SingleClassTrainSet, TrainerError
from .manifest import LABELS, read_manifest, split_rows

logger = logging.getLogger(__name__)

ARCHITECTURES = ("resnet50", "resnet34")

ARTIFACT_NAME = "model.pt"
EPOCH_LOG_NAME = "epochs.csv"
EPOCH_LOG_FIELDS = ("epoch", "train_loss", "valid_loss", "accuracy")


@dataclass
class TrainerConfig:
    architecture: str = "resnet50"
    epochs: int = 50
    batch_size: int = 6
    learning_rate: float = 0.05
    input_resize: int = 224
    seed: int = 0
    pretrained: bool = True
    freeze_backbone: bool = True
    deterministic: bool = True
    early_stopping: bool = False
    early_stop_patience: int = 3

    def __post_init__(self):
        if self.architecture not in ARCHITECTURES:
            raise ValueError(f"architecture must be one of {ARCHITECTURES}")
        if self.epochs < 1 or self.batch_size < 1:
            raise ValueError("epochs and batch_size must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")


@dataclass
class EpochLog:
    epoch: int
    train_loss: float
    valid_loss: float
    accuracy: float


def seed_everything(seed: int, deterministic: bool) -> None:
    random.seed(seed)
    np.random.seed(seed % (2**32))
    torch.manual_seed(seed)
    if deterministic:
        torch.use_deterministic_algorithms(True)


class FeatureNormHead(nn.Module):
    """Classifier head: pooled features scaled to unit length, then linear.

    Backbone activation scale varies wildly between pretrained and
    random-initialized networks; normalizing the feature vector keeps
    gradient magnitudes, and therefore the configured learning rate,
    meaningful in both regimes. Layer norm is used (not batch norm) so
    train and eval behave identically even after very short runs.
    """

    def __init__(self, in_features: int, classes: int):
        super().__init__()
        self.norm = nn.LayerNorm(in_features, elementwise_affine=False)
        self.linear = nn.Linear(in_features, classes)
        self.scale = in_features**-0.5  # layer-norm output has norm sqrt(dim)

    def forward(self, x):
        return self.linear(self.norm(x) * self.scale)


def build_model(architecture: str, pretrained: bool) -> nn.Module:
    from torchvision import models

    if architecture == "resnet50":
        ctor, weights = models.resnet50, models.ResNet50_Weights.IMAGENET1K_V2
    elif architecture == "resnet34":
        ctor, weights = models.resnet34, models.ResNet34_Weights.IMAGENET1K_V1
    else:
        raise ValueError(f"unknown architecture {architecture!r}")
    if pretrained:
        try:
            model = ctor(weights=weights)
        except Exception as exc:
            raise TrainerError(
                f"could not fetch pretrained weights for {architecture} "
                f"({exc}); pass pretrained=False to train from scratch"
            ) from exc
    else:
        model = ctor(weights=None)
    model.fc = FeatureNormHead(model.fc.in_features, len(LABELS))
    return model


def calibrate_batchnorm(model: nn.Module, loader: DataLoader) -> None:
    """Replace batch-norm running statistics with the data's statistics.

    A random-initialized backbone frozen in eval mode applies batch norm
    with the meaningless init stats (identity), letting activation scales
    drift layer by layer until class structure washes out. One no-grad
    pass with cumulative averaging fixes the stats to the training data;
    pretrained backbones keep their shipped stats and skip this.
    """
    for module in model.modules():
        if isinstance(module, nn.modules.batchnorm._BatchNorm):
            module.reset_running_stats()
            module.momentum = None  # cumulative moving average
    model.train()
    with torch.no_grad():
        for batch, _labels in loader:
            model(batch)
    model.eval()


def _loader(dataset, batch_size: int, shuffle: bool, seed: int,
            drop_last: bool = False) -> DataLoader:
    generator = torch.Generator()
    generator.manual_seed(seed)
    # dropping a partial final batch also protects the head's batch norm
    # from single-sample batches
    drop_last = drop_last and len(dataset) > batch_size
    return DataLoader(dataset, batch_size=batch_size, shuffle=shuffle,
                      num_workers=0, generator=generator, drop_last=drop_last)


def _run_validation(model, loader, loss_fn) -> tuple[float, float]:
    set_phase("validate")
    model.eval()
    total_loss = 0.0
    correct = 0
    count = 0
    with torch.no_grad():
        for batch, labels in loader:
            logits = model(batch)
            total_loss += loss_fn(logits, labels).item() * len(labels)
            correct += int((logits.argmax(dim=1) == labels).sum())
            count += len(labels)
    set_phase("idle")
    if count == 0:
        return math.nan, math.nan
    return total_loss / count, correct / count


def train(manifest_path: str | Path, config: TrainerConfig,
          out_dir: str | Path) -> tuple[Path, list[EpochLog]]:
    """Train per config, write model artifact + epoch CSV, return both."""
    manifest_path = Path(manifest_path)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    seed_everything(config.seed, config.deterministic)

    rows = read_manifest(manifest_path)
    root = manifest_path.parent
    train_rows = split_rows(rows, "train")
    valid_rows = split_rows(rows, "test")
    train_labels = {r.label for r in train_rows}
    if train_labels != set(LABELS):
        raise SingleClassTrainSet(f"train split has labels {sorted(train_labels)}")
    if valid_rows:
        logger.warning(
            "using the manifest test split as the per-epoch validation set; "
            "reported valid_loss/accuracy and the final test evaluation share data"
        )

    scheme_digest = read_scheme_digest(root / train_rows[0].image_path)

    model = build_model(config.architecture, config.pretrained)
    if config.freeze_backbone:
        for name, param in model.named_parameters():
            if not name.startswith("fc."):
                param.requires_grad = False
    trainable = [p for p in model.parameters() if p.requires_grad]
    optimizer = torch.optim.SGD(trainable, lr=config.learning_rate, momentum=0.9)
    loss_fn = nn.CrossEntropyLoss()

    train_ds = ManifestImageDataset(train_rows, root, config.input_resize)
    valid_ds = ManifestImageDataset(valid_rows, root, config.input_resize)
    train_loader = _loader(train_ds, config.batch_size, shuffle=True, seed=config.seed,
                           drop_last=True)
    valid_loader = _loader(valid_ds, config.batch_size, shuffle=False, seed=config.seed)

    if not config.pretrained:
        set_phase("fit")
        calibrate_batchnorm(model, train_loader)
        set_phase("idle")

    logs: list[EpochLog] = []
    best_valid = math.inf
    stale = 0
    for epoch in range(1, config.epochs + 1):
        set_phase("fit")
        if config.freeze_backbone:
            # frozen backbone keeps its batch-norm statistics fixed;
            # only the head trains
            model.eval()
            model.fc.train()
        else:
            model.train()
        total = 0.0
        seen = 0
        for batch, labels in train_loader:
            optimizer.zero_grad()
            loss = loss_fn(model(batch), labels)
            loss.backward()
            optimizer.step()
            total += loss.item() * len(labels)
            seen += len(labels)
        set_phase("idle")
        train_loss = total / seen

        valid_loss, accuracy = _run_validation(model, valid_loader, loss_fn)
        logs.append(EpochLog(epoch=epoch, train_loss=train_loss,
                             valid_loss=valid_loss, accuracy=accuracy))
        logger.info("epoch %d: train_loss=%.5f valid_loss=%.5f accuracy=%.4f",
                    epoch, train_loss, valid_loss, accuracy)

        if config.early_stopping and not math.isnan(valid_loss):
            if valid_loss < best_valid - 1e-6:
                best_valid = valid_loss
                stale = 0
            else:
                stale += 1
                if stale >= config.early_stop_patience:
                    logger.info("early stop after epoch %d", epoch)
                    break

    artifact_path = out_dir / ARTIFACT_NAME
    torch.save({
        "format": 1,
        "state_dict": model.state_dict(),
        "config": asdict(config),
        "scheme_digest": scheme_digest,
        "labels": list(LABELS),
    }, artifact_path)
    write_epoch_log(logs, out_dir / EPOCH_LOG_NAME)
    return artifact_path, logs


def write_epoch_log(logs: list[EpochLog], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(EPOCH_LOG_FIELDS)
        for log in logs:
            writer.writerow([log.epoch, log.train_loss, log.valid_loss, log.accuracy])


def read_epoch_log(path: str | Path) -> list[EpochLog]:
    with open(path, newline="") as fh:
        return [EpochLog(epoch=int(r["epoch"]), train_loss=float(r["train_loss"]),
                         valid_loss=float(r["valid_loss"]), accuracy=float(r["accuracy"]))
                for r in csv.DictReader(fh)]
