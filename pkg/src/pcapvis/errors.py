"""Exception taxonomy for the whole pipeline.

Grouped by how the CLI maps them to exit codes: input-format problems
(bad capture files, unreadable manifests) versus evaluation contract
violations (prediction/manifest join failures).
"""


class PcapVisError(Exception):
    """Base class for all errors raised by this package."""


class InputFormatError(PcapVisError):
    """Malformed input file (capture, manifest, predictions, config)."""


class BadMagic(InputFormatError):
    """The capture file does not start with a known pcap magic value."""


class PcapngUnsupported(InputFormatError):
    """The file is a pcapng capture, which this parser does not read."""


class Truncated(InputFormatError):
    """The capture stream ended inside a header or record body."""


class OversizeRecord(InputFormatError):
    """A record claims more captured bytes than the file's snaplen."""


class InvalidHeader(InputFormatError):
    """Global header fields violate the format (e.g. snaplen of zero)."""


class ManifestFormatError(InputFormatError):
    """A dataset manifest line is not a valid entry."""


class PredictionFormatError(InputFormatError):
    """A prediction line is not a valid record or is self-inconsistent."""


class IndexOutOfRange(PcapVisError, IndexError):
    """A 1D curve index or window falls outside the layout's capacity."""


class OversizeData(PcapVisError):
    """Data is too long for the largest supported grid."""


class ChunkTooLarge(PcapVisError):
    """A chunk does not fit the capacity of the requested layout."""


class EmptyCorpus(PcapVisError):
    """A dataset root directory contains no readable capture files."""


class EmptyManifest(PcapVisError):
    """An operation that needs manifest rows received none."""


class EvaluationContractError(PcapVisError):
    """Prediction set and manifest test split do not line up."""


class MissingPrediction(EvaluationContractError):
    """A test-split image has no prediction."""


class UnknownImage(EvaluationContractError):
    """A prediction references an image not in the test split."""


class DuplicatePrediction(EvaluationContractError):
    """More than one prediction for the same image."""


class EmptyConfusion(PcapVisError):
    """All four confusion counts are zero."""
