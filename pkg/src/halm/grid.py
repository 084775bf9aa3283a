"""Grid fields and discrete differential operators.

Images are plain float64 arrays of shape ``(H, W)``; axis 0 runs down the
rows (the y direction, wrap length H) and axis 1 across the columns (the
x direction, wrap length W).  Vector fields are pairs ``(p1, p2)`` of such
arrays.  The mesh size is 1 in both directions.

Two boundary conditions are supported.  Periodic differences wrap around
the far edge; Neumann differences are zero across the far edge (reflective,
zero normal derivative), and the matching backward operators are defined as
the negative adjoints of the forward ones so that

    <grad(u), p> + <u, div(p)> = 0

holds exactly under either boundary condition.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np


class Boundary(str, Enum):
    """Boundary handling for the difference operators."""

    PERIODIC = "periodic"
    NEUMANN = "neumann"


@dataclass(frozen=True)
class GridShape:
    """Dimensions and boundary condition of a rectangular pixel grid."""

    height: int
    width: int
    boundary: Boundary = Boundary.PERIODIC

    def __post_init__(self):
        if self.height < 2 or self.width < 2:
            raise ValueError(
                f"grid must be at least 2x2, got {self.height}x{self.width}"
            )

    @property
    def size(self) -> int:
        return self.height * self.width


def as_field(values, shape: GridShape | None = None) -> np.ndarray:
    """Coerce ``values`` to a float64 (H, W) array, checking against ``shape``."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"scalar field must be 2-D, got shape {arr.shape}")
    if shape is not None and arr.shape != (shape.height, shape.width):
        raise ValueError(
            f"field shape {arr.shape} does not match grid "
            f"{shape.height}x{shape.width}"
        )
    return arr


def dx_forward(u: np.ndarray, bc: Boundary) -> np.ndarray:
    """Forward difference along x (axis 1): u[i, j+1] - u[i, j]."""
    if bc == Boundary.PERIODIC:
        return np.roll(u, -1, axis=1) - u
    out = np.zeros_like(u)
    out[:, :-1] = u[:, 1:] - u[:, :-1]
    return out


def dy_forward(u: np.ndarray, bc: Boundary) -> np.ndarray:
    """Forward difference along y (axis 0): u[i+1, j] - u[i, j]."""
    if bc == Boundary.PERIODIC:
        return np.roll(u, -1, axis=0) - u
    out = np.zeros_like(u)
    out[:-1, :] = u[1:, :] - u[:-1, :]
    return out


def dx_backward(p: np.ndarray, bc: Boundary) -> np.ndarray:
    """Backward difference along x, the negative adjoint of :func:`dx_forward`."""
    if bc == Boundary.PERIODIC:
        return p - np.roll(p, 1, axis=1)
    out = np.empty_like(p)
    out[:, 0] = p[:, 0]
    out[:, 1:-1] = p[:, 1:-1] - p[:, :-2]
    out[:, -1] = -p[:, -2]
    return out


def dy_backward(p: np.ndarray, bc: Boundary) -> np.ndarray:
    """Backward difference along y, the negative adjoint of :func:`dy_forward`."""
    if bc == Boundary.PERIODIC:
        return p - np.roll(p, 1, axis=0)
    out = np.empty_like(p)
    out[0, :] = p[0, :]
    out[1:-1, :] = p[1:-1, :] - p[:-2, :]
    out[-1, :] = -p[-2, :]
    return out


def grad(u: np.ndarray, bc: Boundary = Boundary.PERIODIC) -> tuple[np.ndarray, np.ndarray]:
    """Discrete gradient of a scalar field, forward differences.

    Returns the pair ``(du/dx, du/dy)``.
    """
    return dx_forward(u, bc), dy_forward(u, bc)


def div(p1: np.ndarray, p2: np.ndarray, bc: Boundary = Boundary.PERIODIC) -> np.ndarray:
    """Discrete divergence of a vector field, backward differences.

    Defined so that ``div`` is the negative adjoint of :func:`grad`:
    ``<grad(u), p> = -<u, div(p)>`` exactly, for either boundary condition.
    """
    return dx_backward(p1, bc) + dy_backward(p2, bc)


def project_sphere(
    p1: np.ndarray,
    p2: np.ndarray,
    fallback: tuple[float, float] = (1.0, 0.0),
) -> tuple[np.ndarray, np.ndarray]:
    """Pointwise projection of a vector field onto the unit sphere.

    Each pixel vector is scaled to unit length; pixels where the vector is
    exactly zero (projection undefined) receive ``fallback``, which must be
    a unit vector.
    """
    r = np.hypot(p1, p2)
    zero = r == 0.0
    r_safe = np.where(zero, 1.0, r)
    n1 = np.where(zero, fallback[0], p1 / r_safe)
    n2 = np.where(zero, fallback[1], p2 / r_safe)
    return n1, n2


def inner(a: np.ndarray, b: np.ndarray) -> float:
    """Euclidean inner product of two fields, summed over all pixels."""
    return float(np.sum(a * b))


def norm2(*fields: np.ndarray) -> float:
    """Euclidean norm of one or more stacked fields."""
    return float(np.sqrt(sum(np.sum(f * f) for f in fields)))
