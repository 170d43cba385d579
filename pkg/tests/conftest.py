import struct
from pathlib import Path

import pytest

MAGIC_MICROS = 0xA1B2C3D4
MAGIC_NANOS = 0xA1B23C4D


def make_pcap(payloads, byte_order="<", magic=MAGIC_MICROS, snaplen=65535,
              linktype=1, orig_lens=None):
    """Serialize a classic pcap capture with the given record payloads."""
    out = bytearray()
    out += struct.pack(byte_order + "IHHiIII", magic, 2, 4, 0, 0, snaplen, linktype)
    for i, payload in enumerate(payloads):
        orig = orig_lens[i] if orig_lens else len(payload)
        out += struct.pack(byte_order + "IIII", 1600000000 + i, i, len(payload), orig)
        out += payload
    return bytes(out)


@pytest.fixture
def pcap_file(tmp_path):
    def write(name, payloads, **kwargs):
        path = tmp_path / name
        path.write_bytes(make_pcap(payloads, **kwargs))
        return path
    return write


def write_corpus(root: Path, spec: dict) -> None:
    """spec maps relative pcap path -> list of record payloads."""
    for rel, payloads in spec.items():
        path = root / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(make_pcap(payloads))
