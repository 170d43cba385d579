"""Learning-rate range sweep.

Runs a short training pass while growing the learning rate
exponentially between two bounds, tracking an exponentially smoothed
loss, and suggests the rate at the steepest descent of that curve.
The sweep aborts once the smoothed loss blows past four times its best
value, since everything beyond that point is divergence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import cycle
from pathlib import Path

import torch
from torch import nn

from .data import ManifestImageDataset, set_phase
from .errors import SingleClassTrainSet
from .manifest import LABELS, read_manifest, split_rows
from .train import TrainerConfig, _loader, build_model, calibrate_batchnorm, seed_everything

SMOOTHING = 0.9
DIVERGENCE_FACTOR = 4.0


@dataclass
class LrFindResult:
    rates: list[float]
    losses: list[float]  # smoothed
    suggestion: float


def lr_find(manifest_path: str | Path, config: TrainerConfig,
            min_lr: float = 1e-7, max_lr: float = 10.0,
            num_steps: int = 40) -> LrFindResult:
    """Sweep lr over a log range for (at most) a partial epoch."""
    manifest_path = Path(manifest_path)
    seed_everything(config.seed, config.deterministic)

    rows = read_manifest(manifest_path)
    train_rows = split_rows(rows, "train")
    if {r.label for r in train_rows} != set(LABELS):
        raise SingleClassTrainSet("learning-rate sweep needs both labels in the train split")

    dataset = ManifestImageDataset(train_rows, manifest_path.parent, config.input_resize)
    loader = _loader(dataset, config.batch_size, shuffle=True, seed=config.seed,
                     drop_last=True)
    num_steps = max(4, min(num_steps, max(len(loader), 4)))

    model = build_model(config.architecture, config.pretrained)
    if not config.pretrained:
        set_phase("fit")
        calibrate_batchnorm(model, loader)
        set_phase("idle")
    if config.freeze_backbone:
        for name, param in model.named_parameters():
            if not name.startswith("fc."):
                param.requires_grad = False
        model.eval()
        model.fc.train()
    else:
        model.train()
    trainable = [p for p in model.parameters() if p.requires_grad]
    optimizer = torch.optim.SGD(trainable, lr=min_lr, momentum=0.9)
    loss_fn = nn.CrossEntropyLoss()

    growth = (max_lr / min_lr) ** (1.0 / (num_steps - 1))
    rates: list[float] = []
    smoothed: list[float] = []
    average = 0.0
    best = math.inf

    set_phase("fit")
    batches = cycle(loader) if len(loader) < num_steps else iter(loader)
    for step in range(num_steps):
        lr = min_lr * growth**step
        for group in optimizer.param_groups:
            group["lr"] = lr
        batch, labels = next(batches)
        optimizer.zero_grad()
        loss = loss_fn(model(batch), labels)
        loss.backward()
        optimizer.step()

        average = SMOOTHING * average + (1 - SMOOTHING) * loss.item()
        corrected = average / (1 - SMOOTHING ** (step + 1))
        rates.append(lr)
        smoothed.append(corrected)
        best = min(best, corrected)
        if corrected > DIVERGENCE_FACTOR * best and step >= 4:
            break
    set_phase("idle")

    return LrFindResult(rates=rates, losses=smoothed, suggestion=_suggest(rates, smoothed))


def _suggest(rates: list[float], losses: list[float]) -> float:
    if len(losses) < 3:
        return rates[len(losses) // 2]
    # steepest descent of the smoothed curve, preferring interior points
    drops = [losses[i + 1] - losses[i] for i in range(len(losses) - 1)]
    candidates = range(1, len(drops) - 1) if len(drops) > 2 else range(len(drops))
    best_i = min(candidates, key=lambda i: drops[i])
    if drops[best_i] >= 0:
        # never descended: fall back to a tenth of the best-loss rate
        return rates[losses.index(min(losses))] / 10.0
    return rates[best_i]
