"""Finite-difference verification of the analytic n-gradients.

Backs the ``gradcheck`` command and the gradient-fidelity tests: every
component of the energy gradient with respect to the normal field is
compared against a central difference of the energy itself.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curvature import CurvaturePenalty, energy_general, grad_n_trv
from .grid import Boundary, norm2, project_sphere
from .solver import ElasticaParams, elastica_energy, grad_n

FD_STEP = 1e-6


def finite_diff_grad_n(energy_at, n1: np.ndarray, n2: np.ndarray, h: float = FD_STEP):
    """Central-difference gradient of ``energy_at(n1, n2)`` in both components."""
    g1 = np.zeros_like(n1)
    g2 = np.zeros_like(n2)
    for idx in np.ndindex(n1.shape):
        for comp, out in ((0, g1), (1, g2)):
            p1, p2 = n1.copy(), n2.copy()
            m1, m2 = n1.copy(), n2.copy()
            (p1 if comp == 0 else p2)[idx] += h
            (m1 if comp == 0 else m2)[idx] -= h
            out[idx] = (energy_at(p1, p2) - energy_at(m1, m2)) / (2.0 * h)
    return g1, g2


def _random_instance(seed: int, height: int, width: int):
    rng = np.random.default_rng(seed)
    u = rng.uniform(0.0, 1.0, (height, width))
    f = rng.uniform(0.0, 1.0, (height, width))
    n1, n2 = project_sphere(
        rng.standard_normal((height, width)), rng.standard_normal((height, width))
    )
    q = rng.uniform(0.2, 1.5, (height, width))
    a = rng.uniform(0.01, 1.0)
    b = rng.uniform(0.01, 0.5)
    alpha = rng.uniform(1.0, 6.0)
    return u, f, n1, n2, q, a, b, alpha


def _relative_error(ga1, ga2, gn1, gn2) -> float:
    denom = norm2(gn1, gn2)
    return norm2(ga1 - gn1, ga2 - gn2) / max(denom, 1e-30)


def grad_check_ee(seed: int, height: int = 6, width: int = 6, bc: Boundary = Boundary.PERIODIC) -> float:
    """Relative FD error of the elastica n-gradient on one seeded instance."""
    u, f, n1, n2, q, a, b, alpha = _random_instance(seed, height, width)
    params = ElasticaParams(a=a, b=b, alpha=alpha)
    ga1, ga2 = grad_n(u, n1, n2, q, params, bc)
    gn1, gn2 = finite_diff_grad_n(
        lambda p1, p2: elastica_energy(u, p1, p2, q, f, params, bc), n1, n2
    )
    return _relative_error(ga1, ga2, gn1, gn2)


def grad_check_trv(seed: int, height: int = 6, width: int = 6, bc: Boundary = Boundary.PERIODIC) -> float:
    """Relative FD error of the TRV n-gradient on one seeded instance."""
    u, f, n1, n2, q, a, b, alpha = _random_instance(seed, height, width)
    penalty = CurvaturePenalty.trv(a, b)
    ga1, ga2 = grad_n_trv(u, n1, n2, q, a, b, alpha, bc)
    gn1, gn2 = finite_diff_grad_n(
        lambda p1, p2: energy_general(u, p1, p2, q, f, penalty, alpha, bc), n1, n2
    )
    return _relative_error(ga1, ga2, gn1, gn2)


@dataclass(frozen=True)
class GradCheckReport:
    max_err_elastica: float
    max_err_trv: float

    @property
    def max_err(self) -> float:
        return max(self.max_err_elastica, self.max_err_trv)


def run_gradcheck(seed: int = 0, instances: int = 5) -> GradCheckReport:
    """FD-check both analytic gradients over several seeded instances."""
    seeds = range(seed, seed + instances)
    return GradCheckReport(
        max_err_elastica=max(grad_check_ee(s) for s in seeds),
        max_err_trv=max(grad_check_trv(s) for s in seeds),
    )
