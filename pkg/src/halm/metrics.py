"""Restoration quality metrics: PSNR and SSIM on [0, 1] images."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import gaussian_filter

# 11x11 Gaussian window, sigma 1.5, stabilizers for dynamic range 1.
_SSIM_SIGMA = 1.5
_SSIM_TRUNCATE = 3.5
_SSIM_C1 = 0.01**2
_SSIM_C2 = 0.03**2


@dataclass(frozen=True)
class MetricReport:
    psnr_db: float
    ssim: float


def _check_pair(u, u_ref):
    u = np.asarray(u, dtype=np.float64)
    u_ref = np.asarray(u_ref, dtype=np.float64)
    if u.shape != u_ref.shape:
        raise ValueError(f"shape mismatch: {u.shape} vs {u_ref.shape}")
    return u, u_ref


def psnr(u, u_ref) -> float:
    """Peak signal-to-noise ratio in dB, dynamic range [0, 1].

    ``10 * log10(P / ||u - u_ref||^2)`` with P the pixel count; identical
    inputs return ``inf``.
    """
    u, u_ref = _check_pair(u, u_ref)
    err = float(np.sum((u - u_ref) ** 2))
    if err == 0.0:
        return float("inf")
    return float(10.0 * np.log10(u.size / err))


def _window_mean(x):
    return gaussian_filter(x, _SSIM_SIGMA, mode="reflect", truncate=_SSIM_TRUNCATE)


def ssim_map(u, u_ref) -> np.ndarray:
    """Pointwise structural-similarity map with Gaussian-window statistics.

    Local means, variances, and covariance come from an 11x11 Gaussian
    window (sigma 1.5) with symmetric boundary padding.
    """
    u, u_ref = _check_pair(u, u_ref)
    mu_u = _window_mean(u)
    mu_v = _window_mean(u_ref)
    var_u = _window_mean(u * u) - mu_u * mu_u
    var_v = _window_mean(u_ref * u_ref) - mu_v * mu_v
    cov = _window_mean(u * u_ref) - mu_u * mu_v
    num = (2.0 * mu_u * mu_v + _SSIM_C1) * (2.0 * cov + _SSIM_C2)
    den = (mu_u * mu_u + mu_v * mu_v + _SSIM_C1) * (var_u + var_v + _SSIM_C2)
    return num / den


def ssim(u, u_ref) -> float:
    """Mean structural similarity between two [0, 1] images."""
    return float(np.mean(ssim_map(u, u_ref)))


def evaluate(u, u_ref) -> MetricReport:
    """PSNR and SSIM of ``u`` against the reference.

    Color images are scored channel by channel and averaged.
    """
    u, u_ref = _check_pair(u, u_ref)
    if u.ndim == 2:
        return MetricReport(psnr(u, u_ref), ssim(u, u_ref))
    if u.ndim == 3:
        psnrs = [psnr(u[..., c], u_ref[..., c]) for c in range(u.shape[-1])]
        ssims = [ssim(u[..., c], u_ref[..., c]) for c in range(u.shape[-1])]
        return MetricReport(float(np.mean(psnrs)), float(np.mean(ssims)))
    raise ValueError(f"expected a 2-D or 3-D image, got shape {u.shape}")
