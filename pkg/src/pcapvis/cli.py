"""Command-line entry point.

Subcommands: encode, inspect, curve-dump, build-dataset, eval.
Exit codes are stable: 0 success, 1 usage error, 2 input-format error,
3 evaluation contract error. Config precedence is CLI flags over
--config file over defaults; the effective config is echoed into every
output directory as run-config.json.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import colormap, curves, dataset
from .metrics import (DEFAULT_THRESHOLD, confusion, format_report, load_predictions, metrics as compute_metrics)
from .config import PipelineConfig, merge_config
from .encoder import choose_order, encode_chunk, image_filename, write_png
from .errors import EvaluationContractError, InputFormatError, PcapVisError
from .pcap import chunk_stream, parse_pcap

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_CONTRACT = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags; the documented usage code is 1
    def error(self, message):
        raise UsageError(message)


def _config_options(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="JSON config file (lowest-precedence overrides)")
    sub.add_argument("--chunk-size", type=int, dest="chunk_size")
    sub.add_argument("--layout", choices=[curves.KIND_HILBERT, curves.KIND_SCANLINE],
                     dest="layout_kind")
    sub.add_argument("--order", type=int, help="fixed curve order (default: auto per chunk)")
    sub.add_argument("--shading", choices=[colormap.SHADING_VALUE_SCALED, colormap.SHADING_FLAT])
    sub.add_argument("--seed", type=int)
    sub.add_argument("--train-ratio", type=float, dest="train_ratio")
    sub.add_argument("--jobs", type=int, help="parallel workers (default: all cores)")


def _build_config(args: argparse.Namespace) -> PipelineConfig:
    file_values = {}
    if getattr(args, "config", None):
        try:
            file_values = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InputFormatError(f"cannot read config {args.config}: {exc}") from exc
    keys = ("chunk_size", "layout_kind", "order", "shading", "seed",
            "train_ratio", "split_by_source", "jobs", "output_dir")
    cli_values = {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}
    try:
        config = merge_config(file_values=file_values, cli_values=cli_values)
    except (ValueError, TypeError) as exc:
        raise UsageError(str(exc)) from exc
    if getattr(args, "jobs", None) is None and "jobs" not in file_values:
        config.jobs = os.cpu_count() or 1
    return config


def _parse_with_context(pcap_path):
    try:
        return parse_pcap(pcap_path)
    except InputFormatError as exc:
        raise type(exc)(f"{pcap_path}: {exc}") from exc


def cmd_encode(args) -> int:
    config = _build_config(args)
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    scheme = colormap.ColorScheme(shading=config.shading)

    _header, records = _parse_with_context(args.pcap)
    source_id = Path(args.pcap).stem
    payload = sum(len(r.data) for r in records)
    empty_records = sum(1 for r in records if not r.data)
    written = 0
    for chunk in chunk_stream(records, config.chunk_size, source_id=source_id):
        order = config.order if config.order is not None else choose_order(len(chunk.data))
        layout = curves.CurveLayout(kind=config.layout_kind, order=order)
        image = encode_chunk(chunk, layout, scheme)
        write_png(image, out_dir / image_filename(source_id, chunk.index, layout))
        written += 1
    config.write_echo(out_dir)

    print(f"{args.pcap}: {len(records)} records, {payload} payload bytes")
    print(f"  chunks encoded : {written}")
    print(f"  images written : {written} -> {out_dir}")
    print(f"  records without payload: {empty_records}")
    return EXIT_OK


def cmd_inspect(args) -> int:
    _header, records = _parse_with_context(args.pcap)
    payload = b"".join(r.data for r in records)
    counts = np.bincount(np.frombuffer(payload, dtype=np.uint8), minlength=256)
    by_class = {klass: 0 for klass in colormap.ByteClass}
    for value in range(256):
        by_class[colormap.classify_byte(value)] += int(counts[value])
    total = int(counts.sum())

    print(f"{args.pcap}: {len(records)} records, {total} payload bytes")
    for klass in colormap.ByteClass:
        n = by_class[klass]
        frac = n / total if total else 0.0
        print(f"  {klass.value:<18} {n:>10}  {frac:8.4f}")
    if total:
        bw = int(counts[0x00] + counts[0xFF])
        print(f"  black+white fraction: {bw / total:.6f}")
    else:
        print("  black+white fraction: undefined (no payload bytes)")
    return EXIT_OK


def cmd_curve_dump(args) -> int:
    if not 1 <= args.order <= curves.MAX_ORDER:
        raise UsageError(f"order must be in 1..{curves.MAX_ORDER}")
    for line in curves.curve_dump_lines(args.kind, args.order):
        print(line)
    return EXIT_OK


def cmd_build_dataset(args) -> int:
    config = _build_config(args)
    _manifest, summary = dataset.build_dataset(args.normal, args.malware, config)
    config.write_echo(config.output_dir)
    print(dataset.format_summary(summary))
    print(f"manifest: {Path(config.output_dir) / dataset.MANIFEST_NAME}")
    return EXIT_OK


def cmd_eval(args) -> int:
    manifest = dataset.read_manifest(args.manifest)
    predictions = load_predictions(args.predictions, threshold=args.threshold)

    malware_counts = confusion(manifest, predictions, positive_label="malware")
    normal_counts = confusion(manifest, predictions, positive_label="normal")
    malware_view = compute_metrics(*malware_counts)
    normal_view = compute_metrics(*normal_counts)

    print(format_eval_header(args))
    print(format_report(malware_view, normal_view))
    if args.json_out:
        Path(args.json_out).write_text(json.dumps(malware_view.to_dict(), indent=2) + "\n")
    return EXIT_OK


def format_eval_header(args) -> str:
    return f"eval: manifest={args.manifest} predictions={args.predictions} threshold={args.threshold}"


def build_parser() -> _Parser:
    parser = _Parser(prog="pcapvis", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_encode = sub.add_parser("encode", help="render a pcap's chunks as PNG images")
    p_encode.add_argument("pcap")
    p_encode.add_argument("-o", "--output-dir", dest="output_dir", default=None)
    _config_options(p_encode)
    p_encode.set_defaults(func=cmd_encode)

    p_inspect = sub.add_parser("inspect", help="byte-class histogram of a pcap's payload")
    p_inspect.add_argument("pcap")
    p_inspect.set_defaults(func=cmd_inspect)

    p_dump = sub.add_parser("curve-dump", help="print 'd x y' lines for a layout")
    p_dump.add_argument("kind", choices=[curves.KIND_HILBERT, curves.KIND_SCANLINE])
    p_dump.add_argument("order", type=int)
    p_dump.set_defaults(func=cmd_curve_dump)

    p_build = sub.add_parser("build-dataset", help="encode labeled corpora into an image dataset")
    p_build.add_argument("--normal", required=True, help="directory of normal-traffic pcaps")
    p_build.add_argument("--malware", required=True, help="directory of malware-traffic pcaps")
    p_build.add_argument("-o", "--output-dir", dest="output_dir", default=None)
    p_build.add_argument("--split-by-source", action="store_true", default=None,
                         dest="split_by_source",
                         help="keep all chunks of one capture in the same split")
    _config_options(p_build)
    p_build.set_defaults(func=cmd_build_dataset)

    p_eval = sub.add_parser("eval", help="score predictions against a manifest's test split")
    p_eval.add_argument("--manifest", required=True)
    p_eval.add_argument("--predictions", required=True)
    p_eval.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    p_eval.add_argument("--json-out", dest="json_out", help="write the metrics report as JSON")
    p_eval.set_defaults(func=cmd_eval)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except EvaluationContractError as exc:
        print(f"evaluation contract error: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    except (PcapVisError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
