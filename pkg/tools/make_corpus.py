"""Regenerate the 512x512 grayscale test corpus from sample images bundled
with matplotlib and scikit-image.

    python tools/make_corpus.py tests/data
"""

import sys
from pathlib import Path

import matplotlib
import numpy as np
from PIL import Image
from skimage import color, data

from svdmark.image_io import GrayImage, save_pgm, to_pixels


def hopper() -> np.ndarray:
    path = Path(matplotlib.get_data_path()) / "sample_data" / "grace_hopper.jpg"
    gray = to_pixels(color.rgb2gray(np.asarray(Image.open(path))) * 255.0)
    y0 = (gray.shape[0] - 512) // 2
    return gray[y0 : y0 + 512, :512]


SOURCES = {
    "hopper": hopper,  # portrait
    "grass": data.grass,  # dense texture
    "camera": data.camera,  # too few high-gap blocks for E=64
}


def main(out_dir: str) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, make in SOURCES.items():
        px = np.asarray(make(), dtype=np.uint8)
        save_pgm(GrayImage(px), out / f"{name}.pgm")
        print(f"wrote {out / f'{name}.pgm'} {px.shape[1]}x{px.shape[0]}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "tests/data")
