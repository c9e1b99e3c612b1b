"""Minimal 8-bit PGM (P2/P5) reader and writer.

Only ``maxval <= 255`` is supported; 16-bit files are rejected with a
:class:`~dckit.exceptions.ParseError`.
"""
from __future__ import annotations

import os

import numpy as np

from ..exceptions import ParseError

__all__ = ["pgm_read", "pgm_write", "pgm_parse"]

_WS = b" \t\r\n\v\f"


def _header_tokens(buf, count, pos):
    """Read ``count`` integer tokens starting at ``pos``, skipping comments."""
    out = []
    n = len(buf)
    while len(out) < count:
        while pos < n and (buf[pos] in _WS or buf[pos] == ord("#")):
            if buf[pos] == ord("#"):
                while pos < n and buf[pos] not in b"\r\n":
                    pos += 1
            else:
                pos += 1
        if pos >= n:
            raise ParseError("unexpected end of header", pos)
        start = pos
        while pos < n and buf[pos] not in _WS and buf[pos] != ord("#"):
            pos += 1
        tok = buf[start:pos]
        if not tok.isdigit():
            raise ParseError(f"expected an integer, got {tok[:16]!r}", start)
        out.append((int(tok), start))
    return out, pos


def pgm_parse(buf):
    """Decode PGM bytes into a float array scaled to [0, 1]."""
    if len(buf) < 2 or buf[:2] not in (b"P2", b"P5"):
        raise ParseError("bad magic number, expected P2 or P5", 0)
    binary = buf[:2] == b"P5"
    header, pos = _header_tokens(buf, 3, 2)
    (w, w_at), (h, h_at), (maxval, mv_at) = header
    if w <= 0 or h <= 0:
        raise ParseError("image dimensions must be positive", w_at if w <= 0 else h_at)
    if not 0 < maxval <= 255:
        raise ParseError(f"maxval {maxval} unsupported (8-bit only)", mv_at)
    count = w * h
    if binary:
        if pos >= len(buf) or buf[pos] not in _WS:
            raise ParseError("missing whitespace after maxval", pos)
        pos += 1
        if len(buf) - pos < count:
            raise ParseError(f"truncated raster: need {count} bytes", len(buf))
        data = np.frombuffer(buf, dtype=np.uint8, count=count, offset=pos).astype(float)
    else:
        tokens, _ = _header_tokens(buf, count, pos)
        bad = next(((v, at) for v, at in tokens if v > maxval), None)
        if bad is not None:
            raise ParseError(f"sample {bad[0]} exceeds maxval {maxval}", bad[1])
        data = np.asarray([v for v, _ in tokens], dtype=float)
    if binary and data.max(initial=0) > maxval:
        raise ParseError(f"sample exceeds maxval {maxval}", pos)
    return data.reshape(h, w) / maxval


def pgm_read(path):
    with open(path, "rb") as fh:
        return pgm_parse(fh.read())


def pgm_write(path, X, maxval=255, binary=True):
    """Clamp to [0, 1], quantize to ``round(x * maxval)`` and write."""
    if not 0 < maxval <= 255:
        raise ValueError("maxval must be in 1..255")
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError("PGM export needs a 2-D array")
    q = np.rint(np.clip(X, 0.0, 1.0) * maxval).astype(np.uint8)
    h, w = q.shape
    with open(os.fspath(path), "wb") as fh:
        if binary:
            fh.write(b"P5\n%d %d\n%d\n" % (w, h, maxval))
            fh.write(q.tobytes())
        else:
            fh.write(b"P2\n%d %d\n%d\n" % (w, h, maxval))
            for row in q:
                fh.write(b" ".join(b"%d" % v for v in row) + b"\n")
