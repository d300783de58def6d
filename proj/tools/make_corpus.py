#!/usr/bin/env python3
"""Regenerate the test corpus under tests/data.

corpus/    512x512 grayscale natural photographs saved at quality 95
           (standard Huffman tables).
textures/  512x512 grayscale texture images, same settings.
extra/   odd-sized, color, optimized-table and restart-marker variants used by
         codec tests.

Source rasters come from the scikit-image sample data set, which ships several
of the classic USC-SIPI style test images.
"""
import argparse
import pathlib

import numpy as np
from PIL import Image
from skimage import color, data


def gray(name, size=None):
    img = getattr(data, name)()
    if img.ndim == 3:
        img = (color.rgb2gray(img) * 255.0 + 0.5).astype(np.uint8)
    out = Image.fromarray(img, mode="L")
    if size is not None:
        out = out.resize(size, Image.LANCZOS)
    return out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "tests" / "data"))
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    (out / "corpus").mkdir(parents=True, exist_ok=True)
    (out / "textures").mkdir(parents=True, exist_ok=True)
    (out / "extra").mkdir(parents=True, exist_ok=True)

    for name in ["camera", "moon", "astronaut"]:
        gray(name).save(out / "corpus" / f"{name}.jpg", quality=95)
    for name in ["coffee", "chelsea", "rocket"]:
        gray(name, (512, 512)).save(out / "corpus" / f"{name}.jpg", quality=95)
    for name in ["brick", "grass", "gravel"]:
        gray(name).save(out / "textures" / f"{name}.jpg", quality=95)

    Image.fromarray(data.astronaut()).save(out / "extra" / "astronaut_color_420.jpg", quality=95)
    Image.fromarray(data.chelsea()).save(out / "extra" / "chelsea_color_444.jpg", quality=90, subsampling=0)
    gray("coins").save(out / "extra" / "coins_optimized.jpg", quality=95, optimize=True)
    gray("text").save(out / "extra" / "text_restart.jpg", quality=85, restart_marker_blocks=7)
    gray("page").save(out / "extra" / "page_comment.jpg", quality=75, comment=b"qimsteg test comment")


if __name__ == "__main__":
    main()
