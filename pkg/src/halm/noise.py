"""Seeded noise generators and the log/exp transform pair for speckle.

Noise is added before any clamping; trimming to [0, 1] is an output-stage
choice made by the writer, not here.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np


class NoiseKind(str, Enum):
    GAUSSIAN = "gaussian"
    SPECKLE = "speckle"


@dataclass(frozen=True)
class NoiseSpec:
    """Noise model, variance, and the seed of the generator."""

    kind: NoiseKind
    variance: float
    seed: int = 0

    def __post_init__(self):
        if self.variance <= 0:
            raise ValueError(f"variance must be positive, got {self.variance}")


def add_noise(u: np.ndarray, spec: NoiseSpec) -> np.ndarray:
    """Degrade ``u`` with i.i.d. noise from a deterministic seeded generator.

    Gaussian noise is additive, ``u + eta``; speckle is multiplicative,
    ``u * (1 + eta)``; in both cases ``eta ~ N(0, variance)`` per pixel.
    """
    u = np.asarray(u, dtype=np.float64)
    rng = np.random.default_rng(spec.seed)
    eta = rng.standard_normal(u.shape) * np.sqrt(spec.variance)
    if spec.kind == NoiseKind.GAUSSIAN:
        return u + eta
    return u * (1.0 + eta)


@dataclass(frozen=True)
class LogScale:
    """Affine coefficients recorded by :func:`log_compress` for inversion."""

    lo: float
    span: float
    eps: float


def log_compress(f: np.ndarray, eps: float = 1e-6) -> tuple[np.ndarray, LogScale]:
    """Logarithmic compression of a nonnegative image, rescaled to [0, 1].

    Returns the compressed image together with the affine coefficients
    needed by :func:`exp_expand` to undo the rescale.  Constant inputs
    map to zero with unit span so the round trip stays exact.
    """
    f = np.asarray(f, dtype=np.float64)
    if np.any(f < 0):
        raise ValueError("log_compress requires a nonnegative image")
    raw = np.log(f + eps)
    lo = float(raw.min())
    hi = float(raw.max())
    span = hi - lo if hi > lo else 1.0
    return (raw - lo) / span, LogScale(lo, span, eps)


def exp_expand(g: np.ndarray, scale: LogScale) -> np.ndarray:
    """Invert :func:`log_compress`: undo the rescale, exponentiate, shift."""
    g = np.asarray(g, dtype=np.float64)
    return np.exp(g * scale.span + scale.lo) - scale.eps
