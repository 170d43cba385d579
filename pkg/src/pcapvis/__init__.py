"""pcapvis: space-filling-curve images from pcap traffic, dataset
building for malware/normal classification, and metric evaluation."""

from .colormap import ByteClass, ColorScheme, classify_byte, color_of
from .curves import CurveLayout, hilbert_d_to_xy, locality_score, scanline_d_to_xy
from .dataset import ManifestEntry, build_dataset, read_manifest, summarize
from .encoder import EncodedImage, choose_order, encode_chunk, read_png, write_png
from .metrics import MetricsReport, PredictionRecord, confusion, consistency_check, metrics
from .pcap import Chunk, PcapHeader, PcapRecord, chunk_stream, parse_pcap

__version__ = "0.1.0"

__all__ = [
    "ByteClass", "ColorScheme", "classify_byte", "color_of",
    "CurveLayout", "hilbert_d_to_xy", "locality_score", "scanline_d_to_xy",
    "ManifestEntry", "build_dataset", "read_manifest", "summarize",
    "EncodedImage", "choose_order", "encode_chunk", "read_png", "write_png",
    "MetricsReport", "PredictionRecord", "confusion", "consistency_check", "metrics",
    "Chunk", "PcapHeader", "PcapRecord", "chunk_stream", "parse_pcap",
]
