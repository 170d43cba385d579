"""Residual-CNN trainer for pcapvis image datasets."""

from .errors import ManifestError, SchemeMismatch, SingleClassTrainSet, TrainerError
from .lr_finder import LrFindResult, lr_find
from .predict import predict
from .train import EpochLog, TrainerConfig, train

__version__ = "0.1.0"

__all__ = [
    "ManifestError", "SchemeMismatch", "SingleClassTrainSet", "TrainerError",
    "LrFindResult", "lr_find", "predict", "EpochLog", "TrainerConfig", "train",
]
