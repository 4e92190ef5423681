import struct

import numpy as np
import pytest

from thetanorm.cache import (
    CacheError,
    cache_path,
    checksum,
    decode,
    encode,
    load_or_build,
)


def sample():
    return np.array([[1, -1, 0], [0, 1, -1]], dtype=np.int8)


def test_round_trip():
    blob = encode(3, "last-full", sample())
    assert blob[:7] == b"THNORM1"
    out = decode(blob, 3, "last-full")
    assert out.dtype == np.int8
    assert np.array_equal(out, sample())


def test_header_layout():
    blob = encode(2, "mid", sample())
    magic, version, n, kind, rows, cols = struct.unpack_from("<7sHB16sII", blob)
    assert (magic, version, n, kind.rstrip(b"\0"), rows, cols) == (b"THNORM1", 1, 2, b"mid", 2, 3)
    h = struct.calcsize("<7sHB16sII")
    assert h == 34
    payload = blob[h:h + 6]
    assert payload == sample().tobytes()
    assert struct.unpack("<Q", blob[h + 6:])[0] == checksum(payload)
    assert len(blob) == h + 6 + 8


@pytest.mark.parametrize("offset", [34, 36, 39])
def test_corrupt_payload_detected(offset):
    blob = bytearray(encode(3, "k", sample()))
    blob[offset] ^= 0x01
    with pytest.raises(CacheError):
        decode(bytes(blob))


def test_version_mismatch_rejected():
    blob = bytearray(encode(3, "k", sample()))
    struct.pack_into("<H", blob, 7, 99)
    with pytest.raises(CacheError):
        decode(bytes(blob))


def test_wrong_identity_and_truncation():
    blob = encode(3, "k", sample())
    with pytest.raises(CacheError):
        decode(blob, n=2)
    with pytest.raises(CacheError):
        decode(blob, kind="other")
    with pytest.raises(CacheError):
        decode(blob[:-3])


def test_load_or_build_regenerates_corrupt_file(tmp_path):
    calls = []

    def builder():
        calls.append(1)
        return sample()

    first = load_or_build(tmp_path, 3, "k", builder)
    again = load_or_build(tmp_path, 3, "k", builder)
    assert len(calls) == 1
    assert np.array_equal(first, again)

    path = cache_path(tmp_path, 3, "k")
    raw = bytearray(path.read_bytes())
    raw[34] ^= 0x7F
    path.write_bytes(bytes(raw))
    fixed = load_or_build(tmp_path, 3, "k", builder)
    assert len(calls) == 2
    assert np.array_equal(fixed, sample())
    assert decode(path.read_bytes(), 3, "k").tolist() == sample().tolist()
    assert not list(tmp_path.glob("*.tmp*"))
