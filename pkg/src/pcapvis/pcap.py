"""Classic pcap parsing and byte-stream chunking.

Only the classic on-disk format is read: a 24-byte global header
(magic u32, version u16+u16, thiszone i32, sigfigs u32, snaplen u32,
linktype u32) followed by 16-byte record headers (ts_sec u32,
ts_frac u32, incl_len u32, orig_len u32), each with incl_len payload
bytes. pcapng files are rejected with a distinct error.

Chunking concatenates the raw captured frame bytes of all records, in
file order, and slices the stream into fixed-size windows. Per-record
pcap headers are file metadata and are never part of the stream.
"""

from __future__ import annotations

import io
import os
import struct
from dataclasses import dataclass
from typing import BinaryIO, Iterable, Iterator

from .errors import (
    BadMagic,
    InvalidHeader,
    OversizeRecord,
    PcapngUnsupported,
    Truncated,
)

MAGIC_MICROS = 0xA1B2C3D4
MAGIC_NANOS = 0xA1B23C4D
PCAPNG_BLOCK_MAGIC = 0x0A0D0D0A

GLOBAL_HEADER_LEN = 24
RECORD_HEADER_LEN = 16

DEFAULT_CHUNK_SIZE = 65536


@dataclass(frozen=True)
class PcapHeader:
    magic: int
    version_major: int
    version_minor: int
    snaplen: int
    linktype: int
    byte_order: str  # "native" | "swapped" relative to this host

    @property
    def ts_resolution(self) -> str:
        return "nano" if self.magic == MAGIC_NANOS else "micro"


@dataclass(frozen=True)
class PcapRecord:
    ts_sec: int
    ts_frac: int  # micro- or nanoseconds, per the file magic
    incl_len: int
    orig_len: int
    data: bytes


@dataclass(frozen=True)
class Chunk:
    """A contiguous window of the concatenated packet byte stream."""

    source_id: str
    index: int
    offset: int
    data: bytes

    def __len__(self) -> int:
        return len(self.data)


def _read_exact(stream: BinaryIO, n: int, what: str) -> bytes:
    buf = stream.read(n)
    if len(buf) != n:
        raise Truncated(f"stream ended inside {what}: wanted {n} bytes, got {len(buf)}")
    return buf


def _resolve_byte_order(magic_bytes: bytes) -> tuple[str, str, int]:
    """Return (struct prefix, byte_order tag, magic) for the 4 magic bytes."""
    (native,) = struct.unpack("=I", magic_bytes)
    if native in (MAGIC_MICROS, MAGIC_NANOS):
        return "=", "native", native

    swapped_prefix = ">" if struct.pack("=H", 1) == struct.pack("<H", 1) else "<"
    (swapped,) = struct.unpack(swapped_prefix + "I", magic_bytes)
    if swapped in (MAGIC_MICROS, MAGIC_NANOS):
        return swapped_prefix, "swapped", swapped

    if native == PCAPNG_BLOCK_MAGIC or swapped == PCAPNG_BLOCK_MAGIC:
        raise PcapngUnsupported("pcapng capture detected; only classic pcap is supported")
    raise BadMagic(f"unknown capture magic 0x{native:08X}")


def parse_pcap(source: BinaryIO | bytes | str | os.PathLike) -> tuple[PcapHeader, list[PcapRecord]]:
    """Parse a classic pcap stream into its header and packet records.

    ``source`` may be a binary file object, raw bytes, or a path.
    Raises BadMagic / PcapngUnsupported / InvalidHeader / Truncated /
    OversizeRecord per the format rules.
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            return parse_pcap(fh)
    if isinstance(source, (bytes, bytearray)):
        return parse_pcap(io.BytesIO(source))

    header_bytes = _read_exact(source, GLOBAL_HEADER_LEN, "global header")
    prefix, byte_order, magic = _resolve_byte_order(header_bytes[:4])
    vmaj, vmin, _thiszone, _sigfigs, snaplen, linktype = struct.unpack(
        prefix + "HHiIII", header_bytes[4:]
    )
    if snaplen == 0:
        raise InvalidHeader("snaplen must be positive")
    header = PcapHeader(
        magic=magic,
        version_major=vmaj,
        version_minor=vmin,
        snaplen=snaplen,
        linktype=linktype,
        byte_order=byte_order,
    )

    rec_fmt = prefix + "IIII"
    records = []
    while True:
        rec_header = source.read(RECORD_HEADER_LEN)
        if len(rec_header) == 0:
            break
        if len(rec_header) != RECORD_HEADER_LEN:
            raise Truncated(
                f"stream ended inside record header: got {len(rec_header)} of {RECORD_HEADER_LEN} bytes"
            )
        ts_sec, ts_frac, incl_len, orig_len = struct.unpack(rec_fmt, rec_header)
        if incl_len > snaplen:
            raise OversizeRecord(
                f"record {len(records)} claims {incl_len} bytes, snaplen is {snaplen}"
            )
        data = _read_exact(source, incl_len, f"record {len(records)} body")
        records.append(
            PcapRecord(ts_sec=ts_sec, ts_frac=ts_frac, incl_len=incl_len, orig_len=orig_len, data=data)
        )
    return header, records


def chunk_stream(
    records: Iterable[PcapRecord],
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    source_id: str = "",
) -> Iterator[Chunk]:
    """Slice the concatenation of all record payloads into fixed windows.

    Every chunk except possibly the last has exactly ``chunk_size``
    bytes; no byte is dropped or duplicated. Empty input yields nothing.
    """
    if chunk_size < 1:
        raise ValueError(f"chunk_size must be >= 1, got {chunk_size}")
    stream = b"".join(rec.data for rec in records)
    n_chunks = (len(stream) + chunk_size - 1) // chunk_size
    for index in range(n_chunks):
        offset = index * chunk_size
        yield Chunk(
            source_id=source_id,
            index=index,
            offset=offset,
            data=stream[offset : offset + chunk_size],
        )
