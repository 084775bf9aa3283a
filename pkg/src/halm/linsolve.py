"""Solvers for the screened-Poisson system of the image update step.

The system matrix is ``A = I + alpha * (Dx+^T Dx+ + Dy+^T Dy+)``, i.e. the
identity plus ``alpha`` times the (negative) divergence of the gradient
under the grid's boundary condition.  ``A`` is symmetric positive definite
with smallest eigenvalue >= 1 for any ``alpha >= 0``.

Under periodic boundaries ``A`` is block circulant with circulant blocks
and is diagonalized exactly by the 2-D DFT; :func:`solve_fft` divides by
the symbol ``1 + alpha * (4 sin^2(pi k / W) + 4 sin^2(pi l / H))``, which
is >= 1 everywhere.  Under either boundary condition :func:`solve_cg`
applies conjugate gradients to the matrix-free operator.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import Boundary, GridShape, as_field, div, grad


@dataclass(frozen=True)
class ScreenedPoissonSystem:
    """Right-hand side and coefficients of ``(I + alpha*L) u = rhs``."""

    shape: GridShape
    alpha: float
    rhs: np.ndarray

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError(f"alpha must be nonnegative, got {self.alpha}")
        as_field(self.rhs, self.shape)


@dataclass
class CGResult:
    """Conjugate-gradient iterate plus convergence diagnostics."""

    u: np.ndarray
    converged: bool
    n_iter: int
    rel_residual: float
    residuals: list[float] = field(default_factory=list)


def apply_screened(u: np.ndarray, alpha: float, bc: Boundary) -> np.ndarray:
    """Matrix-free application of ``A u = u - alpha * div(grad(u))``."""
    g1, g2 = grad(u, bc)
    return u - alpha * div(g1, g2, bc)


def _fft_symbol(height: int, width: int, alpha: float) -> np.ndarray:
    sx = 4.0 * np.sin(np.pi * np.arange(width) / width) ** 2
    sy = 4.0 * np.sin(np.pi * np.arange(height) / height) ** 2
    return 1.0 + alpha * (sy[:, None] + sx[None, :])


def solve_fft(sys: ScreenedPoissonSystem) -> np.ndarray:
    """Exact spectral solve of the periodic screened-Poisson system."""
    if sys.shape.boundary != Boundary.PERIODIC:
        raise ValueError("solve_fft requires periodic boundaries; use solve_cg")
    rhs = as_field(sys.rhs, sys.shape)
    if sys.alpha == 0.0:
        return rhs.copy()
    symbol = _fft_symbol(sys.shape.height, sys.shape.width, sys.alpha)
    return np.fft.ifft2(np.fft.fft2(rhs) / symbol).real


def solve_cg(
    sys: ScreenedPoissonSystem,
    tol: float = 1e-10,
    max_iter: int = 1000,
    callback=None,
) -> CGResult:
    """Conjugate-gradient solve of the screened-Poisson system.

    Works for either boundary condition.  Terminates when the residual
    2-norm drops below ``tol * ||rhs||`` or after ``max_iter`` iterations;
    the iterate is returned either way, with the per-iteration residual
    norms recorded in the result.  ``callback``, if given, is invoked with
    a copy of each iterate (used by diagnostics and tests).
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if max_iter < 1:
        raise ValueError(f"max_iter must be at least 1, got {max_iter}")
    rhs = as_field(sys.rhs, sys.shape)
    bc = sys.shape.boundary
    alpha = sys.alpha

    x = np.zeros_like(rhs)
    r = rhs.copy()
    norm_b = float(np.linalg.norm(rhs))
    threshold = tol * norm_b
    residuals: list[float] = []
    rs = float(np.sum(r * r))
    if np.sqrt(rs) <= threshold:
        return CGResult(x, True, 0, 0.0, residuals)

    d = r.copy()
    converged = False
    k = 0
    for k in range(1, max_iter + 1):
        ad = apply_screened(d, alpha, bc)
        step = rs / float(np.sum(d * ad))
        x += step * d
        r -= step * ad
        rs_new = float(np.sum(r * r))
        res = float(np.sqrt(rs_new))
        residuals.append(res)
        if callback is not None:
            callback(x.copy())
        if res <= threshold:
            converged = True
            break
        d = r + (rs_new / rs) * d
        rs = rs_new

    rel = residuals[-1] / norm_b if norm_b > 0 else residuals[-1]
    return CGResult(x, converged, k, rel, residuals)
