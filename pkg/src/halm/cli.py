"""Command-line front end.

Exit codes: 0 success, 2 usage error, 3 I/O error, 4 solver finished
without reaching the relative-change tolerance (output is still written).

Solver commands accept ``--config FILE`` with flat ``key=value`` lines
mirroring the flag names; explicit flags override the file, which
overrides built-in defaults.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click
from click.core import ParameterSource

from .curvature import PenaltyKind
from .diagnostics import run_gradcheck
from .grid import Boundary
from .imgio import load_image, save_image
from .metrics import evaluate
from .noise import NoiseKind, NoiseSpec, add_noise
from .pipeline import (
    RunConfig,
    denoise_array,
    read_config_file,
    speckle_denoise_array,
    trace_paths,
    write_trace,
)
from .solver import ElasticaParams
from .synth import synth_image

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_NO_CONVERGENCE = 4

_MODEL_KINDS = {"ee": PenaltyKind.TSC, "trv": PenaltyKind.TRV}
_TRUTHY = {"1", "true", "yes", "on"}
_FALSY = {"0", "false", "no", "off"}


def _fail_usage(message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(EXIT_USAGE)


def _fail_io(message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(EXIT_IO)


def _load(path):
    try:
        return load_image(path)
    except (OSError, ValueError) as exc:
        _fail_io(f"cannot read image {path}: {exc}")


def _save(path, arr):
    try:
        save_image(path, arr)
    except OSError as exc:
        _fail_io(f"cannot write image {path}: {exc}")


def _parse_bool(raw: str, key: str) -> bool:
    lowered = raw.lower()
    if lowered in _TRUTHY:
        return True
    if lowered in _FALSY:
        return False
    _fail_usage(f"config value for {key} must be boolean, got {raw!r}")


def _merged(ctx, config: dict[str, str]):
    """Resolve every parameter with precedence flags > config file > defaults."""
    known = {name.replace("_", "-") for name in ctx.params} - {"config-path"}
    unknown = set(config) - known
    if unknown:
        _fail_usage(f"unknown config keys: {', '.join(sorted(unknown))}")
    casts = {
        "a": float, "b": float, "alpha": float, "tau": float,
        "tol": float, "max_iter": int, "seed": int,
    }
    out = {}
    for name, value in ctx.params.items():
        key = name.replace("_", "-")
        if ctx.get_parameter_source(name) != ParameterSource.COMMANDLINE and key in config:
            raw = config[key]
            try:
                if name == "adaptive_tau":
                    value = _parse_bool(raw, key)
                elif name in casts:
                    value = casts[name](raw)
                else:
                    value = raw
            except ValueError:
                _fail_usage(f"config value for {key} is not valid: {raw!r}")
        out[name] = value
    return out


def _build_run_config(opts, model_kind: PenaltyKind) -> RunConfig:
    try:
        params = ElasticaParams(
            a=opts["a"],
            b=opts["b"],
            alpha=opts["alpha"],
            tau=opts["tau"],
            adaptive=opts["adaptive_tau"],
            tol=opts["tol"],
            max_iter=opts["max_iter"],
        )
        boundary = Boundary(opts["boundary"])
    except ValueError as exc:
        _fail_usage(str(exc))
    return RunConfig(
        model=model_kind,
        params=params,
        boundary=boundary,
        input=Path(opts["input"]) if opts["input"] else None,
        output=Path(opts["output"]) if opts["output"] else None,
        ref=Path(opts["ref"]) if opts["ref"] else None,
        trace=Path(opts["trace"]) if opts["trace"] else None,
    )


def _read_config_option(path):
    if path is None:
        return {}
    try:
        return read_config_file(path)
    except OSError as exc:
        _fail_io(f"cannot read config {path}: {exc}")
    except ValueError as exc:
        _fail_usage(str(exc))


def _solver_options(with_model: bool):
    options = [
        click.option("--input", type=click.Path(), default=None, help="Input image (8-bit PNG/PGM/PPM)."),
        click.option("--output", type=click.Path(), default=None, help="Destination for the denoised image."),
        click.option("--ref", type=click.Path(), default=None, help="Ground-truth image; prints PSNR/SSIM when given."),
        click.option("--trace", type=click.Path(), default=None, help="Write the per-iteration CSV trace here."),
        click.option("--a", type=float, default=0.015, show_default=True, help="Length weight."),
        click.option("--b", type=float, default=0.005, show_default=True, help="Curvature weight."),
        click.option("--alpha", type=float, default=4.0, show_default=True, help="Constraint penalty."),
        click.option("--tau", type=float, default=0.1, show_default=True, help="Fixed step size for the normal update."),
        click.option("--adaptive-tau", is_flag=True, default=False, help="Derive the step from the Lipschitz estimate each iteration."),
        click.option("--tol", type=float, default=1e-5, show_default=True, help="Relative-change stopping tolerance."),
        click.option("--max-iter", type=int, default=500, show_default=True, help="Iteration cap."),
        click.option("--boundary", type=click.Choice([b.value for b in Boundary]), default=Boundary.PERIODIC.value, show_default=True),
        click.option("--config", "config_path", type=click.Path(), default=None, help="key=value config file (flags take precedence)."),
    ]
    if with_model:
        options.insert(4, click.option("--model", type=click.Choice(sorted(_MODEL_KINDS)), default="ee", show_default=True))

    def apply(fn):
        for opt in reversed(options):
            fn = opt(fn)
        return fn

    return apply


def _report_metrics(out_img, ref_path):
    ref = _load(ref_path)
    try:
        report = evaluate(out_img, ref)
    except ValueError as exc:
        _fail_usage(str(exc))
    click.echo(f"PSNR={report.psnr_db:.4f} SSIM={report.ssim:.4f}")


def _write_traces(trace_path, channel_results):
    try:
        for path, result in zip(trace_paths(trace_path, len(channel_results)), channel_results):
            write_trace(path, result.records)
    except OSError as exc:
        _fail_io(f"cannot write trace {trace_path}: {exc}")


def _check_destinations(cfg: RunConfig):
    """Fail before solving if an output location cannot possibly be written."""
    for path in (cfg.output, cfg.trace):
        if path is not None and not path.parent.exists():
            _fail_io(f"destination directory does not exist: {path.parent}")


def _finish_solver_command(cfg: RunConfig, result):
    _save(cfg.output, result.image)
    if cfg.ref is not None:
        _report_metrics(result.image, cfg.ref)
    if cfg.trace is not None:
        _write_traces(cfg.trace, result.channel_results)
    if not result.converged:
        iters = max(r.iterations for r in result.channel_results)
        click.echo(f"warning: tolerance not reached within {iters} iterations", err=True)
        sys.exit(EXIT_NO_CONVERGENCE)


@click.group()
def main():
    """Curvature-regularized image denoising by alternating minimization."""


@main.command()
@_solver_options(with_model=True)
@click.pass_context
def denoise(ctx, **_kwargs):
    """Denoise an image with the elastica (ee) or rotation-variation (trv) model."""
    opts = _merged(ctx, _read_config_option(ctx.params["config_path"]))
    if opts["model"] not in _MODEL_KINDS:
        _fail_usage(f"unknown model {opts['model']!r}; choose from {sorted(_MODEL_KINDS)}")
    cfg = _build_run_config(opts, _MODEL_KINDS[opts["model"]])
    if cfg.input is None or cfg.output is None:
        _fail_usage("denoise requires --input and --output")
    _check_destinations(cfg)
    img = _load(cfg.input)
    result = denoise_array(img, cfg)
    _finish_solver_command(cfg, result)


@main.command(name="speckle-denoise")
@_solver_options(with_model=False)
@click.pass_context
def speckle_denoise(ctx, **_kwargs):
    """Despeckle a grayscale image: log-compress, denoise, exponentiate."""
    opts = _merged(ctx, _read_config_option(ctx.params["config_path"]))
    cfg = _build_run_config(opts, PenaltyKind.TSC)
    if cfg.input is None or cfg.output is None:
        _fail_usage("speckle-denoise requires --input and --output")
    _check_destinations(cfg)
    img = _load(cfg.input)
    if img.ndim != 2:
        _fail_usage("speckle-denoise expects a grayscale image")
    result = speckle_denoise_array(img, cfg)
    _finish_solver_command(cfg, result)


@main.command(name="add-noise")
@click.option("--input", "input_path", type=click.Path(), required=True)
@click.option("--output", "output_path", type=click.Path(), required=True)
@click.option("--type", "kind", type=click.Choice([k.value for k in NoiseKind]), default="gaussian", show_default=True)
@click.option("--var", type=float, default=0.0015, show_default=True, help="Noise variance.")
@click.option("--seed", type=int, default=0, show_default=True)
def add_noise_cmd(input_path, output_path, kind, var, seed):
    """Degrade an image with seeded Gaussian or speckle noise."""
    img = _load(input_path)
    try:
        spec = NoiseSpec(NoiseKind(kind), var, seed)
    except ValueError as exc:
        _fail_usage(str(exc))
    _save(output_path, add_noise(img, spec))


@main.command()
@click.option("--ref", "ref_path", type=click.Path(), required=True)
@click.option("--test", "test_path", type=click.Path(), required=True)
def metrics(ref_path, test_path):
    """Print PSNR and SSIM of a test image against a reference."""
    test = _load(test_path)
    ref = _load(ref_path)
    try:
        report = evaluate(test, ref)
    except ValueError as exc:
        _fail_usage(str(exc))
    click.echo(f"PSNR={report.psnr_db:.4f} SSIM={report.ssim:.4f}")


@main.command()
@click.option("--shape", type=click.Choice(["disk", "shading", "checker", "circle"]), required=True)
@click.option("--size", default="60x60", show_default=True, help="HEIGHTxWIDTH, e.g. 60x60.")
@click.option("--output", "output_path", type=click.Path(), required=True)
def synth(shape, size, output_path):
    """Write a synthetic ground-truth image."""
    try:
        h_str, _, w_str = size.lower().partition("x")
        height, width = int(h_str), int(w_str)
        img = synth_image(shape, height, width)
    except ValueError as exc:
        _fail_usage(f"invalid --size {size!r}: {exc}")
    _save(output_path, img)


@main.command()
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--instances", type=int, default=5, show_default=True)
def gradcheck(seed, instances):
    """Finite-difference check of the analytic gradients; nonzero exit above 1e-4."""
    report = run_gradcheck(seed, instances)
    click.echo(f"elastica n-gradient max relative error: {report.max_err_elastica:.3e}")
    click.echo(f"trv n-gradient max relative error:      {report.max_err_trv:.3e}")
    if report.max_err > 1e-4:
        click.echo("gradcheck FAILED", err=True)
        sys.exit(1)
    click.echo("gradcheck OK")


if __name__ == "__main__":
    main()
