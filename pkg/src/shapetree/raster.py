"""Raster ingestion: PGM files and Moore-neighbour contour tracing."""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from .boundary import SampledBoundary, from_points
from .errors import DegenerateShapeError, ParseError, TraceError

__all__ = ["read_pgm", "write_pgm", "trace_raster_boundary", "FOREGROUND_THRESHOLD"]

FOREGROUND_THRESHOLD = 127

# clockwise on screen (rows grow downward), starting west
_RING = [(0, -1), (-1, -1), (-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1)]


def _pgm_tokens(data: bytes, count: int, pos: int):
    tokens = []
    n = len(data)
    while len(tokens) < count:
        while pos < n and data[pos : pos + 1].isspace():
            pos += 1
        if pos < n and data[pos : pos + 1] == b"#":
            while pos < n and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos : pos + 1].isspace() and data[pos : pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise ParseError("truncated PGM header")
        tokens.append(data[start:pos])
    return tokens, pos


def read_pgm(data: bytes) -> np.ndarray:
    """Decode a P2 (ASCII) or P5 (binary) greymap into an integer array."""
    magic = data[:2]
    if magic not in (b"P2", b"P5"):
        raise ParseError(f"not a PGM file (magic {magic!r})")
    (w, h, maxval), pos = _pgm_tokens(data, 3, 2)
    try:
        width, height, maxval = int(w), int(h), int(maxval)
    except ValueError:
        raise ParseError("non-integer PGM header field") from None
    if width <= 0 or height <= 0 or not 0 < maxval < 65536:
        raise ParseError("invalid PGM dimensions or maxval")
    if magic == b"P2":
        values, _ = _pgm_tokens(data, width * height, pos)
        try:
            img = np.array([int(v) for v in values], dtype=np.int64)
        except ValueError:
            raise ParseError("non-integer PGM pixel value") from None
    else:
        pos += 1  # single whitespace byte after maxval
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        raw = data[pos : pos + width * height * dtype.itemsize]
        if len(raw) < width * height * dtype.itemsize:
            raise ParseError("truncated PGM pixel data")
        img = np.frombuffer(raw, dtype=dtype).astype(np.int64)
    return img.reshape(height, width)


def write_pgm(image) -> bytes:
    img = np.asarray(image)
    if img.dtype == bool:
        img = img.astype(np.uint8) * 255
    img = img.astype(np.uint8)
    h, w = img.shape
    return f"P5\n{w} {h}\n255\n".encode("ascii") + img.tobytes()


def _foreground(image) -> np.ndarray:
    img = np.asarray(image)
    if img.dtype == bool:
        return img
    return img > FOREGROUND_THRESHOLD


def trace_raster_boundary(image) -> SampledBoundary:
    """Trace the outer contour of the single foreground region in ``image``.

    ``image`` is a 2-D array; booleans are used as-is, numbers are
    thresholded at ``> 127``.  One point is emitted per boundary pixel centre
    with ``x = column`` and ``y = height - 1 - row`` so the result is in the
    usual y-up frame.
    """
    fg = _foreground(image)
    if fg.ndim != 2:
        raise TraceError("raster must be two-dimensional")
    if not fg.any():
        raise TraceError("empty image: no foreground pixels")
    _, ncomp = ndimage.label(fg)  # default structure is 4-connectivity
    if ncomp > 1:
        raise TraceError(f"multiple foreground components ({ncomp}), expected exactly one")

    padded = np.pad(fg, 1)
    rows, cols = np.nonzero(padded)
    start = (int(rows[0]), int(cols[0]))
    start_back = (start[0], start[1] - 1)
    cur, back = start, start_back
    contour = [start]
    limit = 4 * int(fg.sum()) + 8
    for _ in range(limit):
        d = _RING.index((back[0] - cur[0], back[1] - cur[1]))
        for k in range(1, 9):
            dr, dc = _RING[(d + k) % 8]
            cand = (cur[0] + dr, cur[1] + dc)
            if padded[cand]:
                pr, pc = _RING[(d + k - 1) % 8]
                back = (cur[0] + pr, cur[1] + pc)
                cur = cand
                break
        else:
            break  # isolated pixel
        if cur == start and back == start_back:
            break
        contour.append(cur)
    else:
        raise TraceError("contour trace did not close")

    if len(contour) < 3:
        raise DegenerateShapeError(f"traced contour has {len(contour)} pixel(s), need at least 3")
    height = fg.shape[0]
    pts = [(c - 1, height - 1 - (r - 1)) for r, c in contour]
    return from_points(pts)
