class TrainerError(Exception):
    """Base class for trainer failures."""


class ManifestError(TrainerError):
    """Dataset manifest unreadable or malformed."""


class SingleClassTrainSet(TrainerError):
    """The train split does not contain both labels."""


class SchemeMismatch(TrainerError):
    """Prediction images were encoded under a different palette than training."""
