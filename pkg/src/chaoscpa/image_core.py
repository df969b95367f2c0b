"""Image containers, modular pixel arithmetic and file formats.

Images are plain 2-D numpy arrays indexed ``img[i, j]`` (row ``i``, column
``j``), 0-based, flattened row-major so that linear index ``k = i*N + j``.

* an *Image* is a ``uint8`` array,
* a *WideImage* is an ``int64`` array whose pixels may leave ``[0, 255]``
  (chosen-plaintext probes put the whole pixel sum into one pixel).
"""

from __future__ import annotations

import os

import numpy as np

from chaoscpa.errors import (
    MalformedHeaderError,
    PixelRangeError,
    TruncatedPayloadError,
    UnsupportedMaxvalError,
    ValidationError,
)

WIDE_MAGIC = "WIDE"


def as_image(img) -> np.ndarray:
    """Validate and return ``img`` as a 2-D ``uint8`` array."""
    arr = np.asarray(img)
    if arr.ndim != 2 or arr.size == 0:
        raise ValidationError(f"expected a non-empty 2-D image, got shape {arr.shape}")
    if arr.dtype == np.uint8:
        return arr
    if not np.issubdtype(arr.dtype, np.integer):
        raise ValidationError(f"image pixels must be integers, got {arr.dtype}")
    if arr.min() < 0 or arr.max() > 255:
        raise PixelRangeError("image pixels must lie in [0, 255]")
    return arr.astype(np.uint8)


def as_wide(img) -> np.ndarray:
    """Return ``img`` as a 2-D ``int64`` array (no range restriction)."""
    arr = np.asarray(img)
    if arr.ndim != 2 or arr.size == 0:
        raise ValidationError(f"expected a non-empty 2-D image, got shape {arr.shape}")
    if not np.issubdtype(arr.dtype, np.integer):
        raise ValidationError(f"image pixels must be integers, got {arr.dtype}")
    return arr.astype(np.int64)


def to_image(wide) -> np.ndarray:
    """Narrow a WideImage to an Image; out-of-range pixels are an error."""
    return as_image(as_wide(wide))


def pixel_sum(img) -> int:
    """Exact integer sum of all pixels."""
    return int(as_wide(img).sum())


def mod256_add(a: int, b: int) -> int:
    # Python's % is floored, so negative sums wrap into [0, 255]
    return (a + b) % 256


def mod256(arr) -> np.ndarray:
    """Entrywise floored ``mod 256`` of an integer array, as ``uint8``."""
    return np.mod(np.asarray(arr, dtype=np.int64), 256).astype(np.uint8)


# --- PGM (binary P5, maxval 255) ------------------------------------------

_WS = b" \t\n\r\v\f"


def _next_token(data: bytes, pos: int) -> tuple[bytes, int]:
    while pos < len(data):
        c = data[pos : pos + 1]
        if c == b"#":
            end = data.find(b"\n", pos)
            if end < 0:
                raise MalformedHeaderError("unterminated comment in PGM header")
            pos = end + 1
        elif c in _WS:
            pos += 1
        else:
            break
    start = pos
    while pos < len(data) and data[pos : pos + 1] not in _WS and data[pos : pos + 1] != b"#":
        pos += 1
    if start == pos:
        raise MalformedHeaderError("PGM header ended early")
    return data[start:pos], pos


def read_pgm(data: bytes) -> np.ndarray:
    """Parse a binary P5 PGM with maxval 255."""
    magic, pos = _next_token(data, 0)
    if magic != b"P5":
        raise MalformedHeaderError(f"not a binary PGM (magic {magic!r})")
    fields = []
    for name in ("width", "height", "maxval"):
        tok, pos = _next_token(data, pos)
        if not tok.isdigit():
            raise MalformedHeaderError(f"bad PGM {name}: {tok!r}")
        fields.append(int(tok))
    width, height, maxval = fields
    if width <= 0 or height <= 0:
        raise MalformedHeaderError(f"bad PGM dimensions {width}x{height}")
    if maxval != 255:
        raise UnsupportedMaxvalError(f"maxval must be 255, got {maxval}")
    if pos >= len(data) or data[pos : pos + 1] not in _WS:
        raise MalformedHeaderError("missing whitespace after PGM maxval")
    payload = data[pos + 1 :]
    need = width * height
    if len(payload) < need:
        raise TruncatedPayloadError(f"expected {need} pixel bytes, got {len(payload)}")
    return np.frombuffer(payload[:need], dtype=np.uint8).reshape(height, width).copy()


def write_pgm(img) -> bytes:
    arr = as_image(img)
    m, n = arr.shape
    return b"P5\n%d %d\n255\n" % (n, m) + arr.tobytes()


def load_pgm(path: str | os.PathLike) -> np.ndarray:
    with open(path, "rb") as f:
        return read_pgm(f.read())


def save_pgm(path: str | os.PathLike, img) -> None:
    with open(path, "wb") as f:
        f.write(write_pgm(img))


# --- WideImage text format --------------------------------------------------


def write_wide(img) -> str:
    """``WIDE M N`` followed by M lines of N space-separated integers."""
    arr = as_wide(img)
    m, n = arr.shape
    lines = [f"{WIDE_MAGIC} {m} {n}"]
    lines.extend(" ".join(str(int(v)) for v in row) for row in arr)
    return "\n".join(lines) + "\n"


def read_wide(text: str) -> np.ndarray:
    lines = text.splitlines()
    if not lines:
        raise MalformedHeaderError("empty WideImage document")
    head = lines[0].split()
    if len(head) != 3 or head[0] != WIDE_MAGIC:
        raise MalformedHeaderError(f"bad WideImage header {lines[0]!r}")
    try:
        m, n = int(head[1]), int(head[2])
    except ValueError as exc:
        raise MalformedHeaderError(f"bad WideImage header {lines[0]!r}") from exc
    if m <= 0 or n <= 0:
        raise MalformedHeaderError(f"bad WideImage dimensions {m}x{n}")
    rows = lines[1 : 1 + m]
    if len(rows) < m:
        raise TruncatedPayloadError(f"expected {m} rows, got {len(rows)}")
    try:
        values = [[int(tok) for tok in row.split()] for row in rows]
    except ValueError as exc:
        raise MalformedHeaderError("non-integer WideImage entry") from exc
    if any(len(row) != n for row in values):
        raise TruncatedPayloadError(f"every row must hold {n} values")
    return np.array(values, dtype=np.int64).reshape(m, n)
