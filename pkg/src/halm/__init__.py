"""Curvature-regularized image denoising by hybrid alternating minimization."""

from .curvature import (
    CurvaturePenalty,
    PenaltyKind,
    UnsupportedPenaltyError,
    energy_general,
    grad_n_trv,
    halm_solve_general,
    lipschitz_n_trv,
    update_q_general,
)
from .grid import Boundary, GridShape, div, grad, project_sphere
from .linsolve import CGResult, ScreenedPoissonSystem, apply_screened, solve_cg, solve_fft
from .metrics import MetricReport, evaluate, psnr, ssim
from .noise import LogScale, NoiseKind, NoiseSpec, add_noise, exp_expand, log_compress
from .solver import (
    ElasticaParams,
    HalmResult,
    IterRecord,
    apply_n_hessian,
    elastica_energy,
    grad_n,
    halm_init,
    halm_solve,
    lipschitz_analytic_bound,
    lipschitz_n,
    update_n,
    update_q,
    update_u,
)
from .synth import SynthKind, synth_image

__version__ = "0.1.0"

__all__ = [
    "Boundary",
    "CGResult",
    "CurvaturePenalty",
    "ElasticaParams",
    "GridShape",
    "HalmResult",
    "IterRecord",
    "LogScale",
    "MetricReport",
    "NoiseKind",
    "NoiseSpec",
    "PenaltyKind",
    "ScreenedPoissonSystem",
    "SynthKind",
    "UnsupportedPenaltyError",
    "add_noise",
    "apply_n_hessian",
    "apply_screened",
    "div",
    "elastica_energy",
    "energy_general",
    "evaluate",
    "exp_expand",
    "grad",
    "grad_n",
    "grad_n_trv",
    "halm_init",
    "halm_solve",
    "halm_solve_general",
    "lipschitz_analytic_bound",
    "lipschitz_n",
    "lipschitz_n_trv",
    "log_compress",
    "project_sphere",
    "psnr",
    "solve_cg",
    "solve_fft",
    "ssim",
    "synth_image",
    "update_n",
    "update_q",
    "update_q_general",
    "update_u",
]
