import random

import numpy as np
import pytest
from PIL import Image

from pcapvis.colormap import ColorScheme, color_of
from pcapvis.curves import CurveLayout
from pcapvis.encoder import (
    EncodedImage,
    choose_order,
    encode_chunk,
    image_filename,
    read_png,
    write_png,
)
from pcapvis.errors import ChunkTooLarge, OversizeData
from pcapvis.pcap import Chunk


def make_chunk(data, index=0, source="src"):
    return Chunk(source_id=source, index=index, offset=index * len(data), data=data)


@pytest.mark.parametrize("length,expected", [
    (1, 1), (4, 1), (5, 2), (4096, 6), (4097, 7), (65536, 8),
])
def test_choose_order(length, expected):
    assert choose_order(length) == expected


def test_choose_order_bounds():
    with pytest.raises(OversizeData):
        choose_order(65537)
    with pytest.raises(ValueError):
        choose_order(0)


def test_four_byte_chunk_renders_along_the_curve():
    chunk = make_chunk(bytes([0x00, 0xFF, 0x41, 0x9C]))
    image = encode_chunk(chunk, CurveLayout(kind="hilbert", order=1))
    assert image.width == image.height == 2
    # traversal (0,0) (0,1) (1,1) (1,0); pixels indexed [y, x]
    assert tuple(image.pixels[0, 0]) == (0, 0, 0)
    assert tuple(image.pixels[1, 0]) == (255, 255, 255)
    assert tuple(image.pixels[1, 1]) == (0, 0, 131)    # 0x41, printable blue
    assert tuple(image.pixels[0, 1]) == (106, 0, 0)    # 0x9C, extended red


def test_short_chunk_gets_padding():
    scheme = ColorScheme()
    image = encode_chunk(make_chunk(b"\x00\x00\x00"), CurveLayout(kind="hilbert", order=1), scheme)
    assert tuple(image.pixels[0, 0]) == (0, 0, 0)
    assert tuple(image.pixels[1, 0]) == (0, 0, 0)
    assert tuple(image.pixels[1, 1]) == (0, 0, 0)
    assert tuple(image.pixels[0, 1]) == scheme.padding_color


def test_empty_chunk_rejected():
    with pytest.raises(ValueError):
        encode_chunk(make_chunk(b""), CurveLayout(kind="hilbert", order=1))


def test_chunk_too_large():
    with pytest.raises(ChunkTooLarge):
        encode_chunk(make_chunk(bytes(5)), CurveLayout(kind="hilbert", order=1))


def test_meta_carries_provenance():
    chunk = make_chunk(b"abcd", index=7, source="cap01")
    scheme = ColorScheme()
    image = encode_chunk(chunk, CurveLayout(kind="hilbert", order=1), scheme)
    assert image.meta == {
        "source": "cap01",
        "chunk": "7",
        "layout": "hilbert:o1",
        "scheme": scheme.digest(),
    }


def test_byte_accounting_random_chunks():
    rng = random.Random(99)
    scheme = ColorScheme()
    padding = np.array(scheme.padding_color, dtype=np.uint8)
    for _ in range(10):
        order = rng.randint(1, 6)
        n = rng.randint(1, 4**order)
        data = rng.randbytes(n)
        image = encode_chunk(make_chunk(data), CurveLayout(kind="hilbert", order=order), scheme)
        flat = image.pixels.reshape(-1, 3)
        non_padding = int(np.sum(~np.all(flat == padding, axis=1)))
        assert non_padding == n
        black = int(np.sum(np.all(flat == 0, axis=1)))
        white = int(np.sum(np.all(flat == 255, axis=1)))
        assert black == data.count(0x00)
        assert white == data.count(0xFF)


def test_hilbert_and_scanline_render_same_color_multiset():
    rng = random.Random(7)
    data = rng.randbytes(700)
    chunk = make_chunk(data)
    a = encode_chunk(chunk, CurveLayout(kind="hilbert", order=5))
    b = encode_chunk(chunk, CurveLayout(kind="scanline", order=5))
    sort_a = np.sort(a.pixels.reshape(-1, 3).view("u1,u1,u1").ravel())
    sort_b = np.sort(b.pixels.reshape(-1, 3).view("u1,u1,u1").ravel())
    assert np.array_equal(sort_a, sort_b)


def test_png_round_trip_and_metadata(tmp_path):
    chunk = make_chunk(bytes(range(256)), index=3, source="cap")
    image = encode_chunk(chunk, CurveLayout(kind="hilbert", order=4))
    path = tmp_path / image_filename("cap", 3, CurveLayout(kind="hilbert", order=4))
    write_png(image, path)
    back = read_png(path)
    assert np.array_equal(back.pixels, image.pixels)
    assert back.meta["source"] == "cap"
    assert back.meta["chunk"] == "3"
    assert back.meta["layout"] == "hilbert:o4"
    assert back.meta["scheme"] == ColorScheme().digest()


def test_png_bytes_are_deterministic(tmp_path):
    chunk = make_chunk(random.Random(5).randbytes(1000))
    image = encode_chunk(chunk, CurveLayout(kind="hilbert", order=5))
    p1, p2 = tmp_path / "a.png", tmp_path / "b.png"
    write_png(image, p1)
    write_png(image, p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_independent_decode_of_2x2_example(tmp_path):
    chunk = make_chunk(bytes([0x00, 0xFF, 0x41, 0x9C]))
    image = encode_chunk(chunk, CurveLayout(kind="hilbert", order=1))
    path = tmp_path / "tiny.png"
    write_png(image, path)
    with Image.open(path) as pil:
        assert pil.size == (2, 2)
        assert pil.getpixel((0, 0)) == (0, 0, 0)
        assert pil.getpixel((0, 1)) == (255, 255, 255)
        assert pil.getpixel((1, 1)) == (0, 0, 131)
        assert pil.getpixel((1, 0)) == (106, 0, 0)


def test_filename_convention():
    layout = CurveLayout(kind="scanline", order=8)
    assert image_filename("capA", 12, layout) == "capA__12__scanline__o8.png"
