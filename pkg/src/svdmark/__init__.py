"""Blind watermarking of 8-bit grayscale images in the singular value domain."""

from .codec import (
    CapacityError,
    EmbedKey,
    embed,
    extract,
    generate_key,
    load_key,
    save_key,
)
from .image_io import GrayImage, load_pgm, read_pgm, save_pgm, write_pgm
from .metrics import Mark, correlation, eqm, load_mark, psnr
from .svd_core import SvdFactors, reconstruct, svd8

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "EmbedKey",
    "GrayImage",
    "Mark",
    "SvdFactors",
    "correlation",
    "embed",
    "eqm",
    "extract",
    "generate_key",
    "load_key",
    "load_mark",
    "load_pgm",
    "psnr",
    "read_pgm",
    "reconstruct",
    "save_key",
    "save_pgm",
    "svd8",
    "write_pgm",
]
