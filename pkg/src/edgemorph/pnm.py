"""Minimal PBM/PGM codec (P1, P2, P4, P5).

PBM pixels are 1 for black; that is foreground here.  PGM gray values are
returned as-is with their maxval; callers threshold them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

WHITESPACE = b" \t\n\r\x0b\x0c"


class PNMError(ValueError):
    pass


@dataclass(frozen=True)
class PNMImage:
    kind: str  # "pbm" or "pgm"
    pixels: np.ndarray  # bool for pbm, uint16 for pgm
    maxval: int = 1

    def binary(self, threshold: int = 128) -> np.ndarray:
        """Foreground mask: PBM black, or PGM gray >= ``threshold``."""
        if self.kind == "pbm":
            return self.pixels.astype(bool)
        return self.pixels >= threshold


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def skip_space(self) -> None:
        data = self.data
        while self.pos < len(data):
            ch = data[self.pos : self.pos + 1]
            if ch == b"#":
                nl = data.find(b"\n", self.pos)
                self.pos = len(data) if nl < 0 else nl + 1
            elif ch in WHITESPACE:
                self.pos += 1
            else:
                break

    def token(self) -> bytes:
        self.skip_space()
        start = self.pos
        while self.pos < len(self.data) and self.data[self.pos : self.pos + 1] not in WHITESPACE + b"#":
            self.pos += 1
        if start == self.pos:
            raise PNMError("unexpected end of header")
        return self.data[start : self.pos]

    def integer(self, what: str) -> int:
        tok = self.token()
        try:
            value = int(tok)
        except ValueError:
            raise PNMError(f"bad {what}: {tok!r}") from None
        if value < 0:
            raise PNMError(f"negative {what}")
        return value


def read_pnm(data: bytes) -> PNMImage:
    if len(data) < 2:
        raise PNMError("file too short")
    magic = data[:2]
    if magic not in (b"P1", b"P2", b"P4", b"P5"):
        raise PNMError(f"unsupported magic number {magic!r}")
    rd = _Reader(data)
    rd.pos = 2
    width = rd.integer("width")
    height = rd.integer("height")
    if width < 1 or height < 1:
        raise PNMError("image dimensions must be positive")
    maxval = 1
    if magic in (b"P2", b"P5"):
        maxval = rd.integer("maxval")
        if not 1 <= maxval <= 65535:
            raise PNMError(f"maxval {maxval} out of range")
    count = width * height

    if magic == b"P1":
        bits = []
        while len(bits) < count:
            rd.skip_space()
            ch = data[rd.pos : rd.pos + 1]
            if ch not in (b"0", b"1"):
                raise PNMError("truncated or invalid P1 raster")
            bits.append(ch == b"1")
            rd.pos += 1
        return PNMImage("pbm", np.array(bits, dtype=bool).reshape(height, width), 1)

    if magic == b"P2":
        values = [rd.integer("sample") for _ in range(count)]
        arr = np.array(values, dtype=np.uint16).reshape(height, width)
        if arr.max(initial=0) > maxval:
            raise PNMError("sample exceeds maxval")
        return PNMImage("pgm", arr, maxval)

    # binary rasters: exactly one whitespace byte after the header
    if rd.pos >= len(data) or data[rd.pos : rd.pos + 1] not in WHITESPACE:
        raise PNMError("missing whitespace before raster")
    body = data[rd.pos + 1 :]
    if magic == b"P4":
        row_bytes = (width + 7) // 8
        need = row_bytes * height
        if len(body) < need:
            raise PNMError("truncated P4 raster")
        packed = np.frombuffer(body[:need], dtype=np.uint8).reshape(height, row_bytes)
        bits = np.unpackbits(packed, axis=1)[:, :width]
        return PNMImage("pbm", bits.astype(bool), 1)

    width_bytes = 1 if maxval < 256 else 2
    need = count * width_bytes
    if len(body) < need:
        raise PNMError("truncated P5 raster")
    dtype = np.uint8 if width_bytes == 1 else np.dtype(">u2")
    arr = np.frombuffer(body[:need], dtype=dtype).astype(np.uint16).reshape(height, width)
    if arr.max(initial=0) > maxval:
        raise PNMError("sample exceeds maxval")
    return PNMImage("pgm", arr, maxval)


def write_pbm(img, binary: bool = True) -> bytes:
    img = np.asarray(img, dtype=bool)
    h, w = img.shape
    if binary:
        return b"P4\n%d %d\n" % (w, h) + np.packbits(img, axis=1).tobytes()
    rows = [" ".join("1" if v else "0" for v in row) for row in img]
    return ("P1\n%d %d\n" % (w, h) + "\n".join(rows) + "\n").encode("ascii")


def write_pgm(values, maxval: int = 255, binary: bool = True) -> bytes:
    arr = np.asarray(values)
    if arr.ndim != 2:
        raise ValueError("expected a 2-D array")
    if not 1 <= maxval <= 65535:
        raise ValueError("maxval must be in 1..65535")
    if arr.size and (arr.min() < 0 or arr.max() > maxval):
        raise ValueError("values outside 0..maxval")
    h, w = arr.shape
    header = b"P%d\n%d %d\n%d\n" % (5 if binary else 2, w, h, maxval)
    if binary:
        dtype = np.uint8 if maxval < 256 else np.dtype(">u2")
        return header + arr.astype(dtype).tobytes()
    rows = [" ".join(str(int(v)) for v in row) for row in arr]
    return header + ("\n".join(rows) + "\n").encode("ascii")
