"""Signal-processing attacks used to probe watermark robustness.

All attacks are pure functions of their inputs; the noisy ones draw from a
splitmix64 stream indexed by pixel position, so results do not depend on
evaluation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .image_io import BLOCK, GrayImage, partition, round_half_away, to_pixels
from .rng import splitmix64_block, to_unit

# standard JPEG luminance quantization table (ITU-T T.81, Annex K)
LUMA_QUANT = np.array(
    [
        [16, 11, 10, 16, 24, 40, 51, 61],
        [12, 12, 14, 19, 26, 58, 60, 55],
        [14, 13, 16, 24, 40, 57, 69, 56],
        [14, 17, 22, 29, 51, 87, 80, 62],
        [18, 22, 37, 56, 68, 109, 103, 77],
        [24, 35, 55, 64, 81, 104, 113, 92],
        [49, 64, 78, 87, 103, 121, 120, 101],
        [72, 92, 95, 98, 112, 100, 103, 99],
    ],
    dtype=np.int64,
)


class AttackError(ValueError):
    pass


def dct_matrix(n: int = BLOCK) -> np.ndarray:
    """Orthonormal DCT-II matrix ``C`` so that ``C @ x`` transforms a column."""
    k = np.arange(n)[:, None]
    i = np.arange(n)[None, :]
    c = np.cos(np.pi * (2 * i + 1) * k / (2 * n)) * math.sqrt(2.0 / n)
    c[0, :] = math.sqrt(1.0 / n)
    return c


_DCT = dct_matrix()


def quant_table(quality: int) -> np.ndarray:
    """Luminance table scaled by the usual quality convention."""
    if not 1 <= quality <= 100:
        raise AttackError(f"quality must be in 1..100, got {quality}")
    scale = 5000 // quality if quality < 50 else 200 - 2 * quality
    return np.clip((LUMA_QUANT * scale + 50) // 100, 1, 255)


def jpeg_attack(img: GrayImage, quality: int) -> GrayImage:
    """Blockwise DCT quantization round trip at the given quality."""
    q = quant_table(quality).astype(np.float64)
    try:
        grid = partition(img)
    except ValueError as exc:
        raise AttackError(str(exc)) from None
    x = img.pixels.astype(np.float64) - 128.0
    blocks = x.reshape(grid.blocks_y, BLOCK, grid.blocks_x, BLOCK).swapaxes(1, 2)
    coef = _DCT @ blocks @ _DCT.T
    coef = round_half_away(coef / q) * q
    rec = _DCT.T @ coef @ _DCT
    out = rec.swapaxes(1, 2).reshape(img.height, img.width) + 128.0
    return GrayImage(to_pixels(out))


def histogram_stretch(img: GrayImage) -> GrayImage:
    """Affine map of the intensity range onto [0, 255]."""
    px = img.pixels.astype(np.float64)
    lo, hi = px.min(), px.max()
    if lo == hi:
        raise AttackError("histogram stretch needs at least two distinct intensities")
    return GrayImage(to_pixels((px - lo) * 255.0 / (hi - lo)))


def level_reduce(img: GrayImage, levels: int = 32) -> GrayImage:
    """Uniform reduction to ``levels`` gray levels (palette-style color reduction)."""
    if not 2 <= levels <= 256:
        raise AttackError(f"levels must be in 2..256, got {levels}")
    step = levels - 1
    idx = round_half_away(img.pixels.astype(np.float64) * step / 255.0)
    return GrayImage(to_pixels(idx * 255.0 / step))


def median3(img: GrayImage) -> GrayImage:
    """3x3 median filter with replicated borders."""
    padded = np.pad(img.pixels, 1, mode="edge")
    h, w = img.height, img.width
    stack = np.stack([padded[dy : dy + h, dx : dx + w] for dy in range(3) for dx in range(3)])
    return GrayImage(np.median(stack, axis=0).astype(np.uint8))


def salt_pepper(img: GrayImage, density: float = 0.01, seed: int = 0) -> GrayImage:
    """Replace each pixel with probability ``density`` by 0 or 255 (equiprobable)."""
    if not 0.0 <= density <= 1.0:
        raise AttackError(f"density must be in [0, 1], got {density}")
    n = img.pixels.size
    draws = splitmix64_block(seed, 2 * n).reshape(n, 2)
    hit = to_unit(draws[:, 0]) < density
    salt = (draws[:, 1] >> np.uint64(63)).astype(bool)
    out = img.pixels.reshape(-1).copy()
    out[hit & salt] = 255
    out[hit & ~salt] = 0
    return GrayImage(out.reshape(img.pixels.shape))


def gaussian_samples(n: int, sigma: float, seed: int) -> np.ndarray:
    """``n`` normal deviates; sample ``i`` uses stream outputs ``2i`` and ``2i+1``."""
    draws = splitmix64_block(seed, 2 * n).reshape(n, 2)
    u1 = 1.0 - to_unit(draws[:, 0])  # (0, 1]
    u2 = to_unit(draws[:, 1])
    return sigma * np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)


def gaussian_noise(img: GrayImage, sigma: float = 3.0, seed: int = 0) -> GrayImage:
    if sigma < 0:
        raise AttackError(f"sigma must be >= 0, got {sigma}")
    if sigma == 0:
        return img
    noise = gaussian_samples(img.pixels.size, sigma, seed).reshape(img.pixels.shape)
    return GrayImage(to_pixels(img.pixels.astype(np.float64) + noise))


def identity(img: GrayImage) -> GrayImage:
    return img


# --- attack specifications -----------------------------------------------------

ATTACKS: dict[str, Callable[..., GrayImage]] = {
    "none": identity,
    "jpeg": jpeg_attack,
    "histogram_stretch": histogram_stretch,
    "level_reduce": level_reduce,
    "median3": median3,
    "salt_pepper": salt_pepper,
    "gaussian_noise": gaussian_noise,
}

_PARAMS: dict[str, dict[str, Any]] = {
    "none": {},
    "jpeg": {"quality": 75},
    "histogram_stretch": {},
    "level_reduce": {"levels": 32},
    "median3": {},
    "salt_pepper": {"density": 0.01},
    "gaussian_noise": {"sigma": 3.0},
}
_SEEDED = {"salt_pepper", "gaussian_noise"}


@dataclass(frozen=True)
class AttackSpec:
    kind: str
    params: dict[str, Any] = field(default_factory=dict)
    noise_seed: int = 0

    def __post_init__(self):
        if self.kind not in ATTACKS:
            raise AttackError(f"unknown attack {self.kind!r}; expected one of {sorted(ATTACKS)}")
        unknown = set(self.params) - set(_PARAMS[self.kind])
        if unknown:
            raise AttackError(f"{self.kind}: unexpected parameters {sorted(unknown)}")
        merged = {**_PARAMS[self.kind], **self.params}
        if self.kind == "jpeg":
            merged["quality"] = int(merged["quality"])
            if not 1 <= merged["quality"] <= 100:
                raise AttackError(f"quality must be in 1..100, got {merged['quality']}")
        elif self.kind == "level_reduce":
            merged["levels"] = int(merged["levels"])
            if not 2 <= merged["levels"] <= 256:
                raise AttackError(f"levels must be in 2..256, got {merged['levels']}")
        elif self.kind == "salt_pepper":
            merged["density"] = float(merged["density"])
            if not 0 <= merged["density"] <= 1:
                raise AttackError(f"density must be in [0, 1], got {merged['density']}")
        elif self.kind == "gaussian_noise":
            merged["sigma"] = float(merged["sigma"])
            if merged["sigma"] < 0:
                raise AttackError(f"sigma must be >= 0, got {merged['sigma']}")
        object.__setattr__(self, "params", merged)

    def apply(self, img: GrayImage) -> GrayImage:
        fn = ATTACKS[self.kind]
        if self.kind in _SEEDED:
            return fn(img, seed=self.noise_seed, **self.params)
        return fn(img, **self.params)

    def describe(self) -> str:
        """Compact ``key=value`` rendering used in reports."""
        items = [f"{k}={v:g}" if isinstance(v, float) else f"{k}={v}" for k, v in self.params.items()]
        if self.kind in _SEEDED:
            items.append(f"seed={self.noise_seed}")
        return ";".join(items)
