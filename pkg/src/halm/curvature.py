"""General curvature penalties and the corresponding solver variant.

The elastica regularizer weighs level curves by ``a + b * kappa^2``; this
module generalizes that integrand to a family ``phi(kappa)``:

  TSC   a + b * kappa^2        (total square curvature, the elastica case)
  TRV   sqrt(a + b * kappa^2)  (total rotation variation)
  TAC   a + b * |kappa|        (total absolute curvature, evaluation only)

TSC and TRV are smooth in the normal field and run through the same
three-step alternating scheme as the elastica solver, with the n-gradient
and the q-threshold coefficient swapped for the penalty's own.  TAC is
nonsmooth, so its energy can be evaluated but no solver is offered.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .grid import Boundary, div, dx_forward, dy_forward
from .solver import (
    ElasticaParams,
    HalmResult,
    _feasible,
    _lipschitz_estimate,
    _penalized_energy,
    _run_halm,
    _threshold_q,
    halm_solve,
)


class PenaltyKind(str, Enum):
    TSC = "tsc"
    TRV = "trv"
    TAC = "tac"


class UnsupportedPenaltyError(ValueError):
    """Raised when a solver is requested for a penalty it cannot handle."""


@dataclass(frozen=True)
class CurvaturePenalty:
    """A curvature integrand ``phi`` with weights ``a`` and ``b``."""

    kind: PenaltyKind
    a: float
    b: float

    def __post_init__(self):
        if self.a <= 0 or self.b <= 0:
            raise ValueError(f"penalty weights must be positive, got a={self.a}, b={self.b}")

    @classmethod
    def tsc(cls, a: float, b: float) -> "CurvaturePenalty":
        return cls(PenaltyKind.TSC, a, b)

    @classmethod
    def trv(cls, a: float, b: float) -> "CurvaturePenalty":
        return cls(PenaltyKind.TRV, a, b)

    @classmethod
    def tac(cls, a: float, b: float) -> "CurvaturePenalty":
        return cls(PenaltyKind.TAC, a, b)

    def phi(self, kappa):
        """Evaluate the penalty integrand at curvature ``kappa`` (vectorized)."""
        if self.kind == PenaltyKind.TSC:
            return self.a + self.b * np.square(kappa)
        if self.kind == PenaltyKind.TRV:
            return np.sqrt(self.a + self.b * np.square(kappa))
        return self.a + self.b * np.abs(kappa)

    def phi_prime(self, kappa):
        """Derivative of the integrand; undefined for the nonsmooth TAC."""
        if self.kind == PenaltyKind.TSC:
            return 2.0 * self.b * np.asarray(kappa, dtype=np.float64)
        if self.kind == PenaltyKind.TRV:
            kappa = np.asarray(kappa, dtype=np.float64)
            return self.b * kappa / np.sqrt(self.a + self.b * np.square(kappa))
        raise UnsupportedPenaltyError("TAC is nonsmooth; phi_prime is undefined at 0")


def energy_general(
    u: np.ndarray,
    n1: np.ndarray,
    n2: np.ndarray,
    q: np.ndarray,
    f: np.ndarray,
    penalty: CurvaturePenalty,
    alpha: float,
    bc: Boundary = Boundary.PERIODIC,
) -> float:
    """Penalized energy with a general curvature integrand.

    Identical to the elastica energy except that the coefficient of ``q``
    is ``phi(div(n))``; for TSC the two coincide.
    """
    assert _feasible(n1, n2, q), "energy evaluated at grossly infeasible (n, q)"
    coeff = penalty.phi(div(n1, n2, bc))
    return _penalized_energy(u, n1, n2, q, f, alpha, coeff, bc)


def grad_n_trv(
    u: np.ndarray,
    n1: np.ndarray,
    n2: np.ndarray,
    q: np.ndarray,
    a: float,
    b: float,
    alpha: float,
    bc: Boundary = Boundary.PERIODIC,
) -> tuple[np.ndarray, np.ndarray]:
    """Gradient of the TRV energy with respect to the normal field.

    The curvature term contributes the forward difference of
    ``q * kappa / sqrt(a + b * kappa^2)`` (the transposed backward
    operator equals the negated forward one).
    """
    kappa = div(n1, n2, bc)
    w = q * kappa / np.sqrt(a + b * np.square(kappa))
    g1 = -b * dx_forward(w, bc) + alpha * q * (q * n1 - dx_forward(u, bc))
    g2 = -b * dy_forward(w, bc) + alpha * q * (q * n2 - dy_forward(u, bc))
    return g1, g2


def update_q_general(
    u_next: np.ndarray,
    n1: np.ndarray,
    n2: np.ndarray,
    penalty: CurvaturePenalty,
    alpha: float,
    bc: Boundary = Boundary.PERIODIC,
) -> np.ndarray:
    """Closed-form q-update with the coefficient ``phi(div(n))``."""
    assert _feasible(n1, n2), "q-update requires a unit normal field"
    coeff = penalty.phi(div(n1, n2, bc))
    return _threshold_q(u_next, n1, n2, coeff, alpha, bc)


def lipschitz_n_trv(
    q: np.ndarray,
    penalty: CurvaturePenalty,
    alpha: float,
    bc: Boundary = Boundary.PERIODIC,
    n_iter: int = 50,
) -> float:
    """Upper Lipschitz bound for the TRV n-gradient at ``q``."""
    bound, _ = _trv_lipschitz_estimate(q, penalty.a, penalty.b, alpha, bc, n_iter, None)
    return bound


def _trv_lipschitz_estimate(q, a, b, alpha, bc, n_iter, v0):
    """Power-iterated bound on the quadratic part plus the curvature modulus.

    The quadratic contribution ``alpha * q^2`` is estimated by the same
    power iteration as the elastica case with the curvature block turned
    off.  The curvature term's derivative has slope at most ``b/sqrt(a)``,
    composed with difference operators of norm at most 4 on each side;
    the ``8 * qmax`` branch keeps the bound valid if q ever exceeds 2.
    """
    quad, v = _lipschitz_estimate(q, 0.0, alpha, bc, n_iter, v0)
    qmax = float(np.max(q)) if q.size else 0.0
    curvature = (b / np.sqrt(a)) * max(16.0, 8.0 * qmax)
    return quad + curvature, v


def halm_solve_general(
    f: np.ndarray,
    penalty: CurvaturePenalty,
    params: ElasticaParams,
    bc: Boundary = Boundary.PERIODIC,
    cg_tol: float = 1e-10,
    cg_max_iter: int = 1000,
) -> HalmResult:
    """Denoise ``f`` with a general smooth curvature penalty.

    The penalty's ``a``/``b`` take precedence over the ones in ``params``.
    The TSC path delegates to :func:`halm_solve` and therefore produces a
    trace identical to it; TAC is rejected as nonsmooth.
    """
    if penalty.kind == PenaltyKind.TAC:
        raise UnsupportedPenaltyError(
            "no solver for the nonsmooth TAC penalty (energy evaluation only)"
        )
    params = replace(params, a=penalty.a, b=penalty.b)
    if penalty.kind == PenaltyKind.TSC:
        return halm_solve(f, params, bc, cg_tol, cg_max_iter)

    a, b, alpha = penalty.a, penalty.b, params.alpha

    def coeff_fn(kappa):
        return np.sqrt(a + b * np.square(kappa))

    def grad_fn(u, n1, n2, q):
        return grad_n_trv(u, n1, n2, q, a, b, alpha, bc)

    def lips_fn(q, v0, n_iter):
        return _trv_lipschitz_estimate(q, a, b, alpha, bc, n_iter, v0)

    return _run_halm(f, params, bc, coeff_fn, grad_fn, lips_fn, cg_tol, cg_max_iter)
