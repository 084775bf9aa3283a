"""8-bit image I/O: PNG and PGM/PPM, with [0, 1] float arrays in memory."""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image


def load_image(path: str | Path) -> np.ndarray:
    """Read an 8-bit image as float64 in [0, 1].

    Grayscale images come back as (H, W); color images as (H, W, 3).
    Palette and alpha variants are flattened to RGB.
    """
    with Image.open(path) as img:
        if img.mode in ("1", "L", "I", "I;16"):
            img = img.convert("L")
        elif img.mode != "RGB":
            img = img.convert("RGB")
        arr = np.asarray(img, dtype=np.float64)
    return arr / 255.0


def save_image(path: str | Path, arr: np.ndarray) -> None:
    """Write a float image, clamped to [0, 1] and quantized round-to-nearest."""
    arr = np.asarray(arr, dtype=np.float64)
    if arr.ndim not in (2, 3):
        raise ValueError(f"expected a 2-D or 3-D image, got shape {arr.shape}")
    data = np.rint(np.clip(arr, 0.0, 1.0) * 255.0).astype(np.uint8)
    Image.fromarray(data, mode="L" if arr.ndim == 2 else "RGB").save(path)
