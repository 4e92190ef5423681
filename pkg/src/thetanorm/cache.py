"""Binary cache for class tables and sign matrices.

Layout, all integers little-endian::

    magic     7 bytes   b"THNORM1"
    version   uint16
    n         uint8
    kind      16 bytes  ASCII, NUL padded
    rows      uint32
    cols      uint32
    payload   rows*cols int8, row-major
    checksum  uint64    blake2b-64 of the payload

A file whose checksum, version or header does not match is treated as
absent and rebuilt. Writes go to a temporary file that is renamed into place.
"""
from __future__ import annotations

import hashlib
import logging
import os
import struct
import tempfile
from pathlib import Path
from typing import Callable

import numpy as np
from filelock import FileLock

log = logging.getLogger(__name__)

MAGIC = b"THNORM1"
FORMAT_VERSION = 1
CACHE_ENV = "THETANORM_CACHE_DIR"
_HEADER = struct.Struct("<7sHB16sII")
_TRAILER = struct.Struct("<Q")


class CacheError(ValueError):
    """Cache file is corrupt, truncated or from another format version."""


def checksum(payload: bytes) -> int:
    return int.from_bytes(hashlib.blake2b(payload, digest_size=8).digest(), "little")


def encode(n: int, kind: str, data: np.ndarray) -> bytes:
    data = np.ascontiguousarray(data, dtype=np.int8)
    if data.ndim != 2:
        raise ValueError("cache payload must be two-dimensional")
    kind_bytes = kind.encode("ascii")
    if len(kind_bytes) > 16:
        raise ValueError(f"kind {kind!r} longer than 16 bytes")
    payload = data.tobytes()
    header = _HEADER.pack(MAGIC, FORMAT_VERSION, n, kind_bytes, data.shape[0], data.shape[1])
    return header + payload + _TRAILER.pack(checksum(payload))


def decode(blob: bytes, n: int | None = None, kind: str | None = None) -> np.ndarray:
    if len(blob) < _HEADER.size + _TRAILER.size:
        raise CacheError("file too short")
    magic, version, file_n, kind_bytes, rows, cols = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise CacheError("bad magic")
    if version != FORMAT_VERSION:
        raise CacheError(f"format version {version}, expected {FORMAT_VERSION}")
    file_kind = kind_bytes.rstrip(b"\0").decode("ascii")
    if n is not None and file_n != n:
        raise CacheError(f"cache holds n={file_n}, expected {n}")
    if kind is not None and file_kind != kind:
        raise CacheError(f"cache holds {file_kind!r}, expected {kind!r}")
    end = _HEADER.size + rows * cols
    if len(blob) != end + _TRAILER.size:
        raise CacheError("payload length does not match header")
    payload = blob[_HEADER.size:end]
    (stored,) = _TRAILER.unpack_from(blob, end)
    if stored != checksum(payload):
        raise CacheError("checksum mismatch")
    return np.frombuffer(payload, dtype=np.int8).reshape(rows, cols).copy()


def cache_path(cache_dir: str | Path, n: int, kind: str) -> Path:
    return Path(cache_dir) / f"n{n}-{kind}.thn"


def write_atomic(path: Path, blob: bytes) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(blob)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_or_build(
    cache_dir: str | Path, n: int, kind: str, builder: Callable[[], np.ndarray]
) -> np.ndarray:
    """Return the cached table, rebuilding and rewriting it if missing or invalid."""
    cache_dir = Path(cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)
    path = cache_path(cache_dir, n, kind)
    with FileLock(str(cache_dir / ".lock")):
        if path.exists():
            try:
                return decode(path.read_bytes(), n, kind)
            except CacheError as exc:
                log.warning("regenerating %s: %s", path, exc)
        data = np.asarray(builder(), dtype=np.int8)
        write_atomic(path, encode(n, kind, data))
        return data


def default_cache_dir() -> str | None:
    return os.environ.get(CACHE_ENV) or None
