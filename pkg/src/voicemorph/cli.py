"""Command-line front end: analysis, synthesis, morphing, and the HTTP server.

Exit codes: 0 success, 2 usage or data error (diagnostics on stderr),
1 unexpected internal failure.
"""
from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click
import numpy as np

from .audio import read_wav, write_wav
from .errors import InvalidWeights, VoiceMorphError
from .morph import Attribute, WeightMatrix, continuum, morph, rate_to_weights
from .persistence import read_morph_object, read_vocp, write_vocp
from .vocoder import AnalysisConfig, analyze, synthesize


def _reporting_errors(fn):
    """Map domain errors to exit code 2 and anything unexpected to 1."""
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (click.ClickException, click.Abort):
            raise
        except (VoiceMorphError, OSError, json.JSONDecodeError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)
        except Exception as exc:  # pragma: no cover - defensive
            click.echo(f"internal error: {type(exc).__name__}: {exc}", err=True)
            sys.exit(1)
    return wrapper


@click.group()
@click.option("--seed", type=int, default=0, show_default=True,
              help="Seed for the synthesis noise generator.")
@click.option("--verbose", is_flag=True, help="Print progress details to stderr.")
@click.pass_context
def main(ctx, seed, verbose):
    """Voice morphing toolkit built on a classical vocoder."""
    ctx.ensure_object(dict)
    ctx.obj["seed"] = seed
    ctx.obj["verbose"] = verbose


def _note(ctx, message):
    if ctx.obj.get("verbose"):
        click.echo(message, err=True)


@main.command("analyze")
@click.argument("wav_path", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", required=True, type=click.Path(dir_okay=False),
              help="Destination .vocp file.")
@click.option("--frame-period", type=float, default=0.005, show_default=True)
@click.option("--fo-floor", type=float, default=60.0, show_default=True)
@click.option("--fo-ceil", type=float, default=600.0, show_default=True)
@click.option("--fft-size", type=int, default=None)
@click.pass_context
@_reporting_errors
def analyze_cmd(ctx, wav_path, output, frame_period, fo_floor, fo_ceil, fft_size):
    """Decompose a WAV file into vocoder parameters."""
    audio = read_wav(wav_path)
    config = AnalysisConfig(frame_period=frame_period, fo_floor=fo_floor,
                            fo_ceil=fo_ceil, fft_size=fft_size)
    params = analyze(audio, config)
    _note(ctx, f"analyzed {wav_path}: {params.frame_count} frames "
               f"at {params.sample_rate} Hz, fft_size={params.fft_size}")
    write_vocp(output, params)


@main.command("synth")
@click.argument("vocp_path", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", required=True, type=click.Path(dir_okay=False),
              help="Destination WAV file.")
@click.pass_context
@_reporting_errors
def synth_cmd(ctx, vocp_path, output):
    """Resynthesize audio from a parameter file."""
    params = read_vocp(vocp_path)
    audio = synthesize(params, seed=ctx.obj["seed"])
    _note(ctx, f"synthesized {audio.duration:.3f} s from {vocp_path}")
    write_wav(output, audio)


def _load_weight_rows(path, k):
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise InvalidWeights("weights file must be a JSON object of per-attribute rows")
    rows = {}
    for attr in Attribute:
        if attr.value not in doc:
            raise InvalidWeights(f"missing weight row for '{attr.value}'")
        row = np.asarray(doc[attr.value], dtype=np.float64)
        if row.size != k:
            raise InvalidWeights(
                f"row '{attr.value}' has {row.size} entries, expected {k}")
        s = float(np.sum(row))
        if abs(s - 1.0) > 1e-9:
            raise InvalidWeights(f"row '{attr.value}' sums to {s!r}, expected 1")
        rows[attr] = row
    return WeightMatrix(rows=rows)


@main.command("morph")
@click.argument("morb_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--rate", "rate", type=float, default=None,
              help="Scalar morphing rate shared by all attributes (two instances).")
@click.option("--weights", "weights_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="JSON file with one weight row per attribute.")
@click.option("-o", "--output", required=True, type=click.Path(dir_okay=False),
              help="Destination WAV file.")
@click.pass_context
@_reporting_errors
def morph_cmd(ctx, morb_path, rate, weights_path, output):
    """Render one morph from a saved morphing object."""
    if (rate is None) == (weights_path is None):
        raise click.UsageError("provide exactly one of --rate or --weights")
    obj = read_morph_object(morb_path)
    if rate is not None:
        if obj.k != 2:
            click.echo(f"error: --rate needs a two-instance object, got {obj.k}",
                       err=True)
            sys.exit(2)
        w = rate_to_weights(rate)
    else:
        w = _load_weight_rows(weights_path, obj.k)
    audio = synthesize(morph(obj, w), seed=ctx.obj["seed"])
    _note(ctx, f"morphed {morb_path} -> {audio.duration:.3f} s")
    write_wav(output, audio)


@main.command("continuum")
@click.argument("morb_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--steps", type=int, required=True,
              help="Number of evenly spaced rates (at least 2).")
@click.option("--from", "rate_from", type=float, default=0.0, show_default=True)
@click.option("--to", "rate_to", type=float, default=1.0, show_default=True)
@click.option("-o", "--output-dir", required=True, type=click.Path(file_okay=False),
              help="Directory for the rendered WAV series.")
@click.pass_context
@_reporting_errors
def continuum_cmd(ctx, morb_path, steps, rate_from, rate_to, output_dir):
    """Render an evenly spaced stimulus continuum between two instances."""
    if steps < 2:
        raise click.UsageError(f"--steps must be at least 2, got {steps}")
    obj = read_morph_object(morb_path)
    if obj.k != 2:
        click.echo(f"error: a continuum needs a two-instance object, got {obj.k}",
                   err=True)
        sys.exit(2)
    rates = np.linspace(rate_from, rate_to, steps)
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    for i, (rate, audio) in enumerate(
            zip(rates, continuum(obj, rates, seed=ctx.obj["seed"]))):
        path = out / f"{i:03d}_rate{rate:+.3f}.wav"
        write_wav(path, audio)
        _note(ctx, f"wrote {path}")


@main.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8765, show_default=True)
@_reporting_errors
def serve_cmd(host, port):
    """Run the interactive morphing HTTP service."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
