"""File formats: PGM label maps (P2/P5) and the raw ``SPSG`` class-field tensor.

SPSG layout (little-endian throughout)::

    bytes 0..3   magic b"SPSG"
    byte  4      version, currently 1
    bytes 5..16  uint32 C, H, W
    then         C*H*W float64 values in (class, row, col) order
"""

from __future__ import annotations

import re
import struct
from pathlib import Path

import numpy as np

from .errors import FormatError
from .segmap import LabelMap

__all__ = ["SPSG_HEADER_SIZE", "load_pgm", "load_tensor", "parse_pgm", "save_pgm", "save_tensor"]

SPSG_MAGIC = b"SPSG"
SPSG_VERSION = 1
SPSG_HEADER_SIZE = 4 + 1 + 12
_HEADER = struct.Struct("<4sBIII")


def _pgm_tokens(data: bytes):
    """Yield (token, end_offset) for the header, skipping ``#`` comments."""
    pos = 0
    pattern = re.compile(rb"\s*(?:#[^\n]*\n\s*)*(\S+)")
    while True:
        m = pattern.match(data, pos)
        if not m:
            return
        yield m.group(1), m.end()
        pos = m.end()


def parse_pgm(data: bytes, num_classes: int | None = None) -> LabelMap:
    tokens = _pgm_tokens(data)
    try:
        magic, _ = next(tokens)
        width, _ = next(tokens)
        height, _ = next(tokens)
        maxval, end = next(tokens)
        width, height, maxval = int(width), int(height), int(maxval)
    except (StopIteration, ValueError) as exc:
        raise FormatError("malformed PGM header") from exc
    if magic not in (b"P2", b"P5"):
        raise FormatError(f"unsupported PGM magic {magic!r}")
    if width < 1 or height < 1 or not 0 < maxval < 65536:
        raise FormatError("invalid PGM dimensions or maxval")
    count = width * height
    if magic == b"P2":
        try:
            values = [int(tok) for tok, _ in _take(tokens, count)]
        except ValueError as exc:
            raise FormatError("non-integer pixel in P2 body") from exc
        if len(values) != count:
            raise FormatError(f"expected {count} pixels, found {len(values)}")
        pixels = np.array(values, dtype=np.int64)
    else:
        # exactly one whitespace byte separates maxval from the raster
        body = data[end + 1:]
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        if len(body) < count * dtype.itemsize:
            raise FormatError("truncated P5 raster")
        pixels = np.frombuffer(body, dtype=dtype, count=count).astype(np.int64)
    if pixels.size and pixels.max() > maxval:
        raise FormatError("pixel value exceeds maxval")
    c = maxval + 1 if num_classes is None else num_classes
    return LabelMap(pixels.reshape(height, width), c)


def _take(it, n):
    for i, item in enumerate(it):
        if i >= n:
            break
        yield item


def load_pgm(path, num_classes: int | None = None) -> LabelMap:
    """Read a P2/P5 PGM; pixel value is the label.

    ``num_classes`` defaults to ``maxval + 1``.
    """
    return parse_pgm(Path(path).read_bytes(), num_classes)


def save_pgm(label_map: LabelMap, path, binary: bool = True) -> None:
    labels = np.atleast_2d(label_map.labels)
    height, width = labels.shape
    maxval = max(1, label_map.num_classes - 1)
    if maxval > 65535:
        raise FormatError("too many classes for PGM")
    if binary:
        header = f"P5\n{width} {height}\n{maxval}\n".encode("ascii")
        dtype = ">u2" if maxval > 255 else "u1"
        Path(path).write_bytes(header + labels.astype(dtype).tobytes())
    else:
        rows = "\n".join(" ".join(str(int(v)) for v in row) for row in labels)
        Path(path).write_text(f"P2\n{width} {height}\n{maxval}\n{rows}\n", encoding="ascii")


def save_tensor(field, path) -> None:
    """Write a ``(C, H, W)`` real field in SPSG format."""
    field = np.asarray(field, dtype=float)
    if field.ndim == 2:
        field = field[:, None, :]
    if field.ndim != 3:
        raise FormatError("SPSG stores (C, H, W) fields")
    c, h, w = field.shape
    header = _HEADER.pack(SPSG_MAGIC, SPSG_VERSION, c, h, w)
    Path(path).write_bytes(header + field.astype("<f8").tobytes())


def load_tensor(path) -> np.ndarray:
    data = Path(path).read_bytes()
    if len(data) < SPSG_HEADER_SIZE:
        raise FormatError("file shorter than SPSG header")
    magic, version, c, h, w = _HEADER.unpack_from(data)
    if magic != SPSG_MAGIC:
        raise FormatError(f"bad magic {magic!r}")
    if version != SPSG_VERSION:
        raise FormatError(f"unsupported SPSG version {version}")
    n = c * h * w
    payload = data[SPSG_HEADER_SIZE:]
    if len(payload) != 8 * n:
        raise FormatError(f"payload has {len(payload)} bytes, expected {8 * n}")
    return np.frombuffer(payload, dtype="<f8").astype(float).reshape(c, h, w)
