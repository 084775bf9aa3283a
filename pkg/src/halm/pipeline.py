"""Denoising pipelines shared by the command-line front end.

Grayscale images run through a single solve; RGB images are split into
channels that solve concurrently and recombine.  The speckle pipeline
wraps the solve in the log/exp transform pair.  Traces are emitted as CSV
with one row per completed outer iteration.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .curvature import CurvaturePenalty, PenaltyKind, halm_solve_general
from .grid import Boundary
from .noise import exp_expand, log_compress
from .solver import ElasticaParams, HalmResult, IterRecord

TRACE_HEADER = "iter,energy,rel_err,tau,time_ms"


@dataclass
class RunConfig:
    """One denoising run: model choice, parameters, and I/O locations."""

    model: PenaltyKind = PenaltyKind.TSC
    params: ElasticaParams = field(default_factory=ElasticaParams)
    boundary: Boundary = Boundary.PERIODIC
    input: Path | None = None
    output: Path | None = None
    ref: Path | None = None
    trace: Path | None = None
    seed: int | None = None

    @property
    def penalty(self) -> CurvaturePenalty:
        return CurvaturePenalty(self.model, self.params.a, self.params.b)


@dataclass
class PipelineResult:
    """Denoised image plus the traces of every channel solve."""

    image: np.ndarray
    channel_results: list[HalmResult]

    @property
    def converged(self) -> bool:
        return all(r.converged for r in self.channel_results)


def denoise_array(img: np.ndarray, cfg: RunConfig) -> PipelineResult:
    """Denoise a [0, 1] image array, channel by channel for color inputs."""
    penalty = cfg.penalty

    def run(channel: np.ndarray) -> HalmResult:
        return halm_solve_general(channel, penalty, cfg.params, cfg.boundary)

    if img.ndim == 2:
        result = run(img)
        return PipelineResult(result.u, [result])
    if img.ndim != 3:
        raise ValueError(f"expected a 2-D or 3-D image, got shape {img.shape}")

    channels = [np.ascontiguousarray(img[..., c]) for c in range(img.shape[-1])]
    with ThreadPoolExecutor(max_workers=len(channels)) as pool:
        results = list(pool.map(run, channels))
    out = np.stack([r.u for r in results], axis=-1)
    return PipelineResult(out, results)


def speckle_denoise_array(img: np.ndarray, cfg: RunConfig) -> PipelineResult:
    """Log-compress, denoise with the elastica model, exponentiate back."""
    if img.ndim != 2:
        raise ValueError("the speckle pipeline operates on grayscale images")
    compressed, scale = log_compress(img)
    result = denoise_array(compressed, cfg)
    return PipelineResult(exp_expand(result.image, scale), result.channel_results)


def format_trace(records: list[IterRecord]) -> str:
    """Render a trace as CSV text, 12+ significant digits on the statistics."""
    lines = [TRACE_HEADER]
    for r in records:
        lines.append(
            f"{r.k},{r.energy:.12e},{r.rel_err:.12e},{r.tau:.12e},{r.time_ms:.3f}"
        )
    return "\n".join(lines) + "\n"


def write_trace(path: str | Path, records: list[IterRecord]) -> None:
    Path(path).write_text(format_trace(records))


def trace_paths(base: str | Path, n_channels: int) -> list[Path]:
    """Trace file per channel: the base path alone for grayscale, suffixed
    ``.r/.g/.b`` before the extension for color."""
    base = Path(base)
    if n_channels == 1:
        return [base]
    tags = ["r", "g", "b"] if n_channels == 3 else [str(i) for i in range(n_channels)]
    return [base.with_suffix(f".{tag}{base.suffix}") for tag in tags[:n_channels]]


def read_config_file(path: str | Path) -> dict[str, str]:
    """Parse a flat ``key=value`` configuration file.

    Keys mirror the command-line flag names (without leading dashes);
    blank lines and ``#`` comments are ignored.
    """
    values: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return values
