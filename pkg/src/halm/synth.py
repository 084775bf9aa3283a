"""Deterministic synthetic ground-truth images for experiments and tests."""

from __future__ import annotations

from enum import Enum

import numpy as np


class SynthKind(str, Enum):
    DISK = "disk"
    SHADING = "shading"
    CHECKER = "checker"
    CIRCLE = "circle"


def _radius_grid(height: int, width: int) -> np.ndarray:
    cy = (height - 1) / 2.0
    cx = (width - 1) / 2.0
    yy, xx = np.mgrid[0:height, 0:width]
    return np.hypot(yy - cy, xx - cx)


def synth_image(kind: SynthKind | str, height: int, width: int) -> np.ndarray:
    """Generate a [0, 1] test image of the requested kind.

    disk     filled bright circle on black, 2-pixel smoothstep edge
    shading  smooth radial intensity ramp
    checker  8x8 grid of alternating cells
    circle   binary ring
    """
    kind = SynthKind(kind)
    if height < 2 or width < 2:
        raise ValueError(f"image must be at least 2x2, got {height}x{width}")
    r = _radius_grid(height, width)

    if kind == SynthKind.DISK:
        radius = 0.35 * min(height, width)
        t = np.clip((radius + 1.0 - r) / 2.0, 0.0, 1.0)
        return t * t * (3.0 - 2.0 * t)

    if kind == SynthKind.SHADING:
        rmax = float(r.max())
        return 0.1 + 0.8 * (1.0 - (r / rmax) ** 2)

    if kind == SynthKind.CHECKER:
        yy, xx = np.mgrid[0:height, 0:width]
        return (((yy * 8 // height) + (xx * 8 // width)) % 2).astype(np.float64)

    inner = 0.25 * min(height, width)
    outer = 0.38 * min(height, width)
    return ((r >= inner) & (r <= outer)).astype(np.float64)
