"""Fidelity (EQM / PSNR) and mark similarity measurements."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from .image_io import GrayImage

MARK_BITS = 64


class DegenerateCorrelation(ValueError):
    """Correlation is undefined because one mark has zero variance."""


@dataclass(frozen=True)
class Mark:
    """64-bit binary mark, row-major 8x8."""

    bits: tuple[int, ...]

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if len(bits) != MARK_BITS:
            raise ValueError(f"mark must have {MARK_BITS} bits, got {len(bits)}")
        if any(b not in (0, 1) for b in bits):
            raise ValueError("mark bits must be 0 or 1")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def from_string(cls, text: str) -> "Mark":
        text = text[:-1] if text.endswith("\n") else text
        if len(text) != MARK_BITS or set(text) - {"0", "1"}:
            raise ValueError(
                f"mark text must be exactly {MARK_BITS} characters from {{0,1}}, got {len(text)}"
            )
        return cls(tuple(int(c) for c in text))

    def to_string(self) -> str:
        return "".join(str(b) for b in self.bits)

    def as_array(self) -> np.ndarray:
        return np.array(self.bits, dtype=np.int64)

    def as_image(self) -> np.ndarray:
        return self.as_array().reshape(8, 8)

    def __len__(self) -> int:
        return MARK_BITS

    def __iter__(self):
        return iter(self.bits)


def load_mark(path: str | Path) -> Mark:
    return Mark.from_string(Path(path).read_text(encoding="ascii"))


def save_mark(mark: Mark, path: str | Path) -> None:
    Path(path).write_text(mark.to_string() + "\n", encoding="ascii")


@dataclass(frozen=True)
class FidelityReport:
    eqm: float
    psnr: float  # math.inf when the images are identical
    peak: float


def _pair(a: GrayImage, b: GrayImage) -> tuple[np.ndarray, np.ndarray]:
    if a.pixels.shape != b.pixels.shape:
        raise ValueError(
            f"dimension mismatch: {a.width}x{a.height} vs {b.width}x{b.height}"
        )
    return a.pixels.astype(np.float64), b.pixels.astype(np.float64)


def eqm(a: GrayImage, b: GrayImage) -> float:
    """Mean squared error between two equally sized images."""
    x, y = _pair(a, b)
    return float(np.mean((x - y) ** 2))


def psnr(original: GrayImage, modified: GrayImage) -> FidelityReport:
    """PSNR in dB with the peak taken as the maximum of ``original``."""
    x, _ = _pair(original, modified)
    err = eqm(original, modified)
    peak = float(x.max())
    if err == 0.0:
        value = math.inf
    elif peak == 0.0:
        value = -math.inf
    else:
        value = 10.0 * math.log10(peak * peak / err)
    return FidelityReport(eqm=err, psnr=value, peak=peak)


def _bits(m: Mark | Iterable[int]) -> np.ndarray:
    return np.asarray(m.bits if isinstance(m, Mark) else list(m), dtype=np.float64)


def correlation(w: Mark | Iterable[int], w_prime: Mark | Iterable[int]) -> float:
    """Normalized (Pearson) correlation between an original and an extracted mark."""
    a, b = _bits(w), _bits(w_prime)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.size} vs {b.size}")
    da, db = a - a.mean(), b - b.mean()
    na, nb = math.sqrt(float(da @ da)), math.sqrt(float(db @ db))
    if na == 0.0 or nb == 0.0:
        raise DegenerateCorrelation("correlation undefined for a constant mark")
    r = float(da @ db) / (na * nb)
    return max(-1.0, min(1.0, r))


def bit_error_rate(w: Mark | Iterable[int], w_prime: Mark | Iterable[int]) -> float:
    a, b = _bits(w), _bits(w_prime)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.size} vs {b.size}")
    return float(np.mean(a != b))
