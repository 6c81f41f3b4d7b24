"""8-bit grayscale rasters, binary PGM (P5) I/O and the 8x8 block grid."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

BLOCK = 8
_WHITESPACE = b" \t\r\n\v\f"


class FormatError(ValueError):
    """Malformed PGM input; ``field`` names the offending header field."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class DimensionError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class GrayImage:
    """Immutable 8-bit single-channel image stored row-major as ``(height, width)``."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 2:
            raise DimensionError(f"expected a 2-D raster, got shape {px.shape}")
        if px.dtype != np.uint8:
            if px.size and (px.min() < 0 or px.max() > 255 or not np.all(px == np.round(px))):
                raise ValueError("intensities must be integers in [0, 255]")
            px = px.astype(np.uint8)
        px = px.copy()
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, GrayImage):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and np.array_equal(self.pixels, other.pixels)

    def __repr__(self) -> str:
        return f"GrayImage({self.width}x{self.height})"


def round_half_away(x: np.ndarray) -> np.ndarray:
    """Round to nearest integer, ties away from zero."""
    x = np.asarray(x, dtype=np.float64)
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def to_pixels(values: np.ndarray) -> np.ndarray:
    """Round half away from zero, then clamp to [0, 255], as ``uint8``."""
    return np.clip(round_half_away(values), 0, 255).astype(np.uint8)


# --- PGM ---------------------------------------------------------------------


def _next_token(data: bytes, pos: int, field: str) -> tuple[bytes, int]:
    n = len(data)
    while pos < n:
        c = data[pos]
        if c == 0x23:  # '#': comment runs to end of line
            while pos < n and data[pos] not in b"\r\n":
                pos += 1
        elif c in _WHITESPACE:
            pos += 1
        else:
            break
    start = pos
    while pos < n and data[pos] not in _WHITESPACE and data[pos] != 0x23:
        pos += 1
    if start == pos:
        raise FormatError(field, "missing value")
    return data[start:pos], pos


def _parse_int(token: bytes, field: str) -> int:
    if not token.isdigit():
        raise FormatError(field, f"not a decimal integer: {token!r}")
    return int(token)


def read_pgm(data: bytes) -> GrayImage:
    """Decode a binary P5 PGM with maxval 255."""
    data = bytes(data)
    if data[:2] != b"P5" or (len(data) > 2 and data[2] not in _WHITESPACE + b"#"):
        raise FormatError("magic", f"unsupported magic {data[:2]!r}")
    pos = 2
    tok, pos = _next_token(data, pos, "width")
    width = _parse_int(tok, "width")
    tok, pos = _next_token(data, pos, "height")
    height = _parse_int(tok, "height")
    tok, pos = _next_token(data, pos, "maxval")
    maxval = _parse_int(tok, "maxval")
    if width <= 0:
        raise FormatError("width", f"must be positive, got {width}")
    if height <= 0:
        raise FormatError("height", f"must be positive, got {height}")
    if maxval != 255:
        raise FormatError("maxval", f"only 255 is supported, got {maxval}")
    if pos >= len(data) or data[pos] not in _WHITESPACE:
        raise FormatError("payload", "missing separator after maxval")
    pos += 1
    need = width * height
    payload = data[pos : pos + need]
    if len(payload) < need:
        raise FormatError("payload", f"truncated: expected {need} bytes, got {len(payload)}")
    px = np.frombuffer(payload, dtype=np.uint8).reshape(height, width)
    return GrayImage(px)


def write_pgm(img: GrayImage) -> bytes:
    header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + img.pixels.tobytes()


def load_pgm(path: str | Path) -> GrayImage:
    return read_pgm(Path(path).read_bytes())


def save_pgm(img: GrayImage, path: str | Path) -> None:
    Path(path).write_bytes(write_pgm(img))


# --- block grid --------------------------------------------------------------


@dataclass(frozen=True)
class BlockGrid:
    blocks_x: int
    blocks_y: int
    width: int
    height: int

    @property
    def count(self) -> int:
        return self.blocks_x * self.blocks_y

    def origin(self, bx: int, by: int) -> tuple[int, int]:
        """Pixel origin ``(x, y)`` of block ``(bx, by)``."""
        self.check(bx, by)
        return BLOCK * bx, BLOCK * by

    def contains(self, bx: int, by: int) -> bool:
        return 0 <= bx < self.blocks_x and 0 <= by < self.blocks_y

    def check(self, bx: int, by: int) -> None:
        if not self.contains(bx, by):
            raise IndexError(f"block ({bx}, {by}) outside {self.blocks_x}x{self.blocks_y} grid")

    def coords(self) -> list[tuple[int, int]]:
        """All coordinates in ``by * blocks_x + bx`` order."""
        return [(bx, by) for by in range(self.blocks_y) for bx in range(self.blocks_x)]


def partition(img: GrayImage) -> BlockGrid:
    if img.width % BLOCK or img.height % BLOCK:
        raise DimensionError(
            f"image {img.width}x{img.height} is not a multiple of {BLOCK} in both dimensions"
        )
    return BlockGrid(img.width // BLOCK, img.height // BLOCK, img.width, img.height)


def get_block(img: GrayImage, bx: int, by: int) -> np.ndarray:
    x, y = partition(img).origin(bx, by)
    return img.pixels[y : y + BLOCK, x : x + BLOCK].astype(np.float64)


def set_block(img: GrayImage, bx: int, by: int, block: np.ndarray) -> GrayImage:
    """New image with block ``(bx, by)`` replaced by the rounded, clamped ``block``."""
    return set_blocks(img, [(bx, by)], np.asarray(block, dtype=np.float64)[None])


def block_view(img: GrayImage) -> np.ndarray:
    """All blocks as a read-only ``(blocks_y, blocks_x, 8, 8)`` array."""
    grid = partition(img)
    return img.pixels.reshape(grid.blocks_y, BLOCK, grid.blocks_x, BLOCK).swapaxes(1, 2)


def get_blocks(img: GrayImage, coords: Iterable[Sequence[int]]) -> np.ndarray:
    """Stack of real-valued blocks ``(n, 8, 8)`` in the order of ``coords``."""
    grid = partition(img)
    coords = [tuple(c) for c in coords]
    for bx, by in coords:
        grid.check(bx, by)
    view = block_view(img)
    if not coords:
        return np.empty((0, BLOCK, BLOCK))
    bxs = np.array([c[0] for c in coords])
    bys = np.array([c[1] for c in coords])
    return view[bys, bxs].astype(np.float64)


def set_blocks(img: GrayImage, coords: Iterable[Sequence[int]], blocks: np.ndarray) -> GrayImage:
    grid = partition(img)
    out = img.pixels.copy()
    quantized = to_pixels(blocks)
    for (bx, by), blk in zip(coords, quantized):
        x, y = grid.origin(bx, by)
        out[y : y + BLOCK, x : x + BLOCK] = blk
    return GrayImage(out)
