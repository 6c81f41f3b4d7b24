"""Blind watermarking by repositioning the third singular value of 8x8 blocks.

A block carries one bit.  With ``moy = (s2 + s4) / 2`` a ``1`` places ``s3``
at the midpoint of ``(moy, s2)`` and a ``0`` at the midpoint of ``(s4, moy)``;
the detector only compares ``s3`` with ``moy`` and never needs the original.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import rng
from .image_io import GrayImage, get_blocks, partition, set_blocks, to_pixels
from .metrics import MARK_BITS, Mark
from .svd_core import SvdFactors, reconstruct, reconstruct_batch, svd8, svd8_batch

DEFAULT_GAP = 64.0
KEY_MAGIC = "SVDMARK-KEY"
KEY_VERSION = 1


class CapacityError(RuntimeError):
    def __init__(self, found: int, needed: int):
        super().__init__(f"insufficient eligible blocks: found {found} of {needed}")
        self.found = found
        self.needed = needed


class KeyFormatError(ValueError):
    pass


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class EmbedKey:
    seed: int
    gap_e: float
    block_coords: tuple[tuple[int, int], ...]
    image_width: int
    image_height: int

    def __post_init__(self):
        coords = tuple((int(bx), int(by)) for bx, by in self.block_coords)
        object.__setattr__(self, "block_coords", coords)
        if self.gap_e < 0:
            raise ValueError(f"gap_e must be >= 0, got {self.gap_e}")
        if len(set(coords)) != len(coords):
            raise ValueError("block coordinates must be distinct")
        bw, bh = self.image_width // 8, self.image_height // 8
        for bx, by in coords:
            if not (0 <= bx < bw and 0 <= by < bh):
                raise ValueError(f"block ({bx}, {by}) outside {bw}x{bh} grid")

    @property
    def n_bits(self) -> int:
        return len(self.block_coords)

    def check_geometry(self, img: GrayImage) -> None:
        if (img.width, img.height) != (self.image_width, self.image_height):
            raise GeometryError(
                f"key is for {self.image_width}x{self.image_height}, "
                f"image is {img.width}x{img.height}"
            )


@dataclass(frozen=True)
class GapProfile:
    sigma2: float
    sigma3: float
    sigma4: float

    @property
    def moy(self) -> float:
        return (self.sigma2 + self.sigma4) / 2.0

    def eligible(self, gap_e: float) -> bool:
        return self.sigma2 - self.sigma3 >= gap_e and self.sigma3 - self.sigma4 >= gap_e

    @classmethod
    def of(cls, factors: SvdFactors) -> "GapProfile":
        s = factors.singular_values
        return cls(float(s[1]), float(s[2]), float(s[3]))


# --- key file ----------------------------------------------------------------


def format_key(key: EmbedKey) -> str:
    lines = [
        f"{KEY_MAGIC} {KEY_VERSION}",
        f"{key.image_width} {key.image_height} 8",
        f"{key.seed} {float(key.gap_e)!r} {key.n_bits}",
    ]
    lines += [f"{bx} {by}" for bx, by in key.block_coords]
    return "\n".join(lines) + "\n"


def parse_key(text: str) -> EmbedKey:
    lines = text.splitlines()
    if len(lines) < 3:
        raise KeyFormatError("key file too short")
    head = lines[0].split()
    if len(head) != 2 or head[0] != KEY_MAGIC:
        raise KeyFormatError(f"bad key header {lines[0]!r}")
    if head[1] != str(KEY_VERSION):
        raise KeyFormatError(f"unsupported key version {head[1]!r}")
    try:
        width, height, block = (int(t) for t in lines[1].split())
        seed_t, gap_t, n_t = lines[2].split()
        seed, gap_e, n_bits = int(seed_t), float(gap_t), int(n_t)
    except ValueError as exc:
        raise KeyFormatError(f"malformed key header: {exc}") from None
    if block != 8:
        raise KeyFormatError(f"unsupported block size {block}")
    body = [ln for ln in lines[3:] if ln.strip()]
    if len(body) != n_bits:
        raise KeyFormatError(f"key declares {n_bits} coordinates but lists {len(body)}")
    coords = []
    for ln in body:
        parts = ln.split()
        if len(parts) != 2:
            raise KeyFormatError(f"malformed coordinate line {ln!r}")
        try:
            coords.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise KeyFormatError(f"malformed coordinate line {ln!r}") from None
    try:
        return EmbedKey(seed, gap_e, tuple(coords), width, height)
    except ValueError as exc:
        raise KeyFormatError(str(exc)) from None


def load_key(path: str | Path) -> EmbedKey:
    return parse_key(Path(path).read_text(encoding="ascii"))


def save_key(key: EmbedKey, path: str | Path) -> None:
    Path(path).write_text(format_key(key), encoding="ascii")


# --- bit-level primitives ---------------------------------------------------


def target_sigma3(s: np.ndarray, bits: np.ndarray) -> np.ndarray:
    """New third singular value(s) for ``bits`` given sorted singular values ``s``."""
    s2, s4 = s[..., 1], s[..., 3]
    moy = (s2 + s4) / 2.0
    return np.where(np.asarray(bits) == 1, (moy + s2) / 2.0, (moy + s4) / 2.0)


def embed_bits_batch(u: np.ndarray, s: np.ndarray, v: np.ndarray, bits: Sequence[int]) -> np.ndarray:
    s = s.copy()
    s[:, 2] = target_sigma3(s, np.asarray(bits))
    return reconstruct_batch(u, s, v)


def extract_bits_batch(blocks: np.ndarray) -> np.ndarray:
    s = svd8_batch(blocks)[1]
    return (s[:, 2] > (s[:, 1] + s[:, 3]) / 2.0).astype(np.int64)


def embed_bit(block: np.ndarray, bit: int, factors: SvdFactors | None = None) -> np.ndarray:
    """Real-valued block carrying ``bit``; rounding happens when written back."""
    if factors is None:
        factors = svd8(block)
    new_s3 = float(target_sigma3(factors.singular_values, bit))
    return reconstruct(factors.with_sigma(2, new_s3))


def extract_bit(block: np.ndarray) -> int:
    s = svd8(block).singular_values
    return int(s[2] > (s[1] + s[3]) / 2.0)


# --- key generation and image-level embedding --------------------------------


def eligible_mask(blocks: np.ndarray, gap_e: float) -> np.ndarray:
    """Gap condition plus the round-trip check for both bit values."""
    u, s, v = svd8_batch(blocks)
    ok = (s[:, 1] - s[:, 2] >= gap_e) & (s[:, 2] - s[:, 3] >= gap_e)
    idx = np.flatnonzero(ok)
    if idx.size:
        for bit in (0, 1):
            marked = embed_bits_batch(u[idx], s[idx], v[idx], np.full(idx.size, bit))
            back = extract_bits_batch(to_pixels(marked).astype(np.float64))
            ok[idx[back != bit]] = False
    return ok


def generate_key(img: GrayImage, seed: int, gap_e: float = DEFAULT_GAP, n_bits: int = MARK_BITS) -> EmbedKey:
    """Select ``n_bits`` blocks in seeded shuffled order that satisfy the gap condition."""
    if gap_e < 0:
        raise ValueError(f"gap_e must be >= 0, got {gap_e}")
    grid = partition(img)
    order = rng.shuffle(grid.coords(), seed)
    ok = eligible_mask(get_blocks(img, order), gap_e)
    accepted = [order[i] for i in np.flatnonzero(ok)]
    if len(accepted) < n_bits:
        raise CapacityError(len(accepted), n_bits)
    return EmbedKey(seed, float(gap_e), tuple(accepted[:n_bits]), img.width, img.height)


def embed(img: GrayImage, mark: Mark, key: EmbedKey) -> GrayImage:
    key.check_geometry(img)
    if len(mark.bits) != key.n_bits:
        raise ValueError(f"mark has {len(mark.bits)} bits, key carries {key.n_bits}")
    u, s, v = svd8_batch(get_blocks(img, key.block_coords))
    marked = embed_bits_batch(u, s, v, mark.bits)
    return set_blocks(img, key.block_coords, marked)


def extract(img: GrayImage, key: EmbedKey) -> Mark:
    """Blind extraction: only the (possibly attacked) image and the key are used."""
    key.check_geometry(img)
    bits = extract_bits_batch(get_blocks(img, key.block_coords))
    return Mark(tuple(int(b) for b in bits))
