"""Command-line surface: render, animate, bench, bake, validate, metrics,
fixture, serve."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import numpy as np

from .assets import (generate_synthetic_fixture, load_asset, load_head_model,
                     regularizer_metrics, save_asset, validate_asset)
from .benchmark import run_bench
from .compose import (activate_opacity, activate_position, build_cloud,
                      make_identity_cache)
from .errors import HeadSplatError
from .geomcue import (bake_conditioning_map, expression_displacement,
                      render_cue, shape_displacement)
from .headmodel import ExpressionState
from .rasterizer import ACTIVE_BACKEND, Camera, render
from .tracks import TrackError, camera_from_dict, load_track

EXIT_USAGE = 2
EXIT_TRACK = 3


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _load_asset_or_exit(path):
    if not Path(path).exists():
        _fail(EXIT_USAGE, f"asset not found: {path}")
    try:
        return load_asset(path)
    except HeadSplatError as exc:
        _fail(EXIT_USAGE, f"cannot load asset: {exc}")


def _parse_size(size: str):
    try:
        w, h = size.lower().split("x")
        return int(w), int(h)
    except ValueError:
        _fail(EXIT_USAGE, f"bad --size {size!r}, expected WxH")


def _state_from_params(asset, params: dict) -> ExpressionState:
    model = asset.model
    psi = np.asarray(params.get("psi", np.zeros(model.expression_dim)),
                     dtype=np.float64)
    jaw = np.asarray(params.get("jaw", np.zeros(3)), dtype=np.float64)
    if psi.shape != (model.expression_dim,):
        raise TrackError(0, f"psi must have length {model.expression_dim}")
    pose = np.zeros((model.num_joints, 3))
    pose[model.jaw_joint] = jaw
    return ExpressionState(shape=np.zeros(model.shape_dim), expression=psi,
                           pose=pose)


@click.group()
def main():
    """CPU head-avatar runtime: splatting, baking, benchmarking, serving."""


@main.command("render")
@click.option("--asset", "asset_path", required=True)
@click.option("--params", "params_path", default=None,
              help="JSON file with psi/jaw/camera; defaults to neutral")
@click.option("--size", default="512x512", show_default=True)
@click.option("--threads", default=1, show_default=True)
@click.option("--out", "out_path", required=True)
def cmd_render(asset_path, params_path, size, threads, out_path):
    """Render a single frame to PNG."""
    asset = _load_asset_or_exit(asset_path)
    width, height = _parse_size(size)
    params = {}
    if params_path is not None:
        if not Path(params_path).exists():
            _fail(EXIT_USAGE, f"params file not found: {params_path}")
        with open(params_path) as fh:
            params = json.load(fh)
    try:
        state = _state_from_params(asset, params)
    except TrackError as exc:
        _fail(EXIT_TRACK, str(exc))
    cam = (camera_from_dict(params["camera"]) if "camera" in params
           else Camera.front(width, height))
    cloud = build_cloud(asset, state)
    fb = render(cloud, cam, threads=threads)
    fb.save_png(out_path)
    click.echo(f"wrote {out_path}")


@main.command("animate")
@click.option("--asset", "asset_path", required=True)
@click.option("--track", "track_path", required=True)
@click.option("--threads", default=1, show_default=True)
@click.option("--out", "out_dir", required=True)
def cmd_animate(asset_path, track_path, threads, out_dir):
    """Render one numbered PNG per track record; the identity cache is
    built once for the whole sequence."""
    asset = _load_asset_or_exit(asset_path)
    if not Path(track_path).exists():
        _fail(EXIT_USAGE, f"track not found: {track_path}")
    try:
        records = load_track(track_path)
    except TrackError as exc:
        _fail(EXIT_TRACK, str(exc))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cache = make_identity_cache(asset)
    provider = asset.default_provider()
    for i, rec in enumerate(records):
        try:
            state = _state_from_params(asset, {"psi": rec.psi, "jaw": rec.jaw})
        except TrackError as exc:
            _fail(EXIT_TRACK, str(exc))
        cloud = build_cloud(asset, state, provider=provider, cache=cache)
        fb = render(cloud, rec.camera, threads=threads)
        fb.save_png(out / f"frame_{i:05d}.png")
    click.echo(f"wrote {len(records)} frames to {out}")


@main.command("bench")
@click.option("--asset", "asset_path", required=True)
@click.option("--size", default="256x256", show_default=True)
@click.option("--threads", default=1, show_default=True)
@click.option("--frames", default=60, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--backend", default=None,
              type=click.Choice(["ext", "python"]),
              help="kernel backend; default is the active one")
def cmd_bench(asset_path, size, threads, frames, seed, backend):
    """Stage-timed benchmark; machine-readable JSON on stdout."""
    asset = _load_asset_or_exit(asset_path)
    width, height = _parse_size(size)
    if frames <= 0:
        _fail(EXIT_USAGE, "frames must be positive")
    result = run_bench(asset, width, height, threads=threads, frames=frames,
                       seed=seed, backend=backend)
    click.echo(json.dumps(result, indent=2))


@main.command("bake")
@click.option("--model", "model_path", required=True, help=".aghm head model")
@click.option("--params", "params_path", default=None,
              help="JSON file with psi/jaw/beta; defaults to neutral")
@click.option("--resolution", default=256, show_default=True)
@click.option("--size", default="512x512", show_default=True,
              help="cue image size")
@click.option("--encoding-scale", default=0.1, show_default=True)
@click.option("--out", "out_dir", required=True)
def cmd_bake(model_path, params_path, resolution, size, encoding_scale, out_dir):
    """Bake the shape conditioning map and the expression cue image."""
    if not Path(model_path).exists():
        _fail(EXIT_USAGE, f"model not found: {model_path}")
    try:
        model = load_head_model(model_path)
    except HeadSplatError as exc:
        _fail(EXIT_USAGE, f"cannot load model: {exc}")
    params = {}
    if params_path is not None:
        with open(params_path) as fh:
            params = json.load(fh)
    psi = np.asarray(params.get("psi", np.zeros(model.expression_dim)))
    jaw = np.asarray(params.get("jaw", np.zeros(3)))
    beta = np.asarray(params.get("beta", np.zeros(model.shape_dim)))
    width, height = _parse_size(size)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cond = bake_conditioning_map(model, shape_displacement(model, beta),
                                 resolution)
    cond.save_raw(out / "conditioning_map.f32",
                  sidecar_path=out / "conditioning_map.json")

    pose = np.zeros((model.num_joints, 3))
    pose[model.jaw_joint] = jaw
    state = ExpressionState(shape=beta, expression=psi, pose=pose)
    cue = render_cue(model, state, Camera.front(width, height),
                     encoding_scale=encoding_scale)
    cue.save_png(out / "cue.png")
    click.echo(f"wrote conditioning map and cue to {out}")
    if not cond.normalized:
        click.echo("note: zero-variance field, map left unnormalized")


@main.command("validate")
@click.option("--asset", "asset_path", required=True)
@click.option("--json", "as_json", is_flag=True, help="JSON report on stdout")
def cmd_validate(asset_path, as_json):
    """Check every asset invariant; exit code reflects violations."""
    if not Path(asset_path).exists():
        _fail(EXIT_USAGE, f"asset not found: {asset_path}")
    try:
        asset = load_asset(asset_path)
    except HeadSplatError as exc:
        report = {"schema": "headsplat.validate/1", "loaded": False,
                  "violations": [{"check": "load", "message": str(exc)}]}
        click.echo(json.dumps(report, indent=2))
        sys.exit(1)
    violations = validate_asset(asset)
    report = {
        "schema": "headsplat.validate/1",
        "loaded": True,
        "gaussian_count": asset.num_gaussians,
        "resolution": asset.resolution,
        "violations": [{"check": v.check, "message": v.message}
                       for v in violations],
    }
    if as_json:
        click.echo(json.dumps(report, indent=2))
    else:
        if violations:
            for v in violations:
                click.echo(f"FAIL {v.check}: {v.message}")
        else:
            click.echo(f"ok: {asset.num_gaussians} gaussians at "
                       f"{asset.resolution}x{asset.resolution}, no violations")
    sys.exit(1 if violations else 0)


@main.command("metrics")
@click.option("--asset", "asset_path", required=True)
@click.option("--psi", default=None, help="comma-separated expression values")
@click.option("--jaw", default=None, help="comma-separated jaw axis-angle")
def cmd_metrics(asset_path, psi, jaw):
    """Print the regularizer-style quality report for an asset."""
    asset = _load_asset_or_exit(asset_path)
    cache = make_identity_cache(asset)
    model = asset.model
    psi_v = (np.array([float(x) for x in psi.split(",")])
             if psi else np.zeros(model.expression_dim))
    jaw_v = (np.array([float(x) for x in jaw.split(",")])
             if jaw else np.zeros(3))
    residuals = asset.default_provider().residuals(psi_v, jaw_v)
    report = regularizer_metrics(
        position_offsets=activate_position(cache.canonical["position_offset"],
                                           asset.config),
        log_scales=cache.canonical["log_scale"],
        opacities=activate_opacity(cache.canonical["opacity_logit"][:, 0]),
        residual_positions=residuals.d_mu,
        residual_log_scales=residuals.d_log_scale,
    )
    out = {"schema": "headsplat.metrics/1"}
    out.update(report.as_dict())
    click.echo(json.dumps(out, indent=2))


@main.command("fixture")
@click.option("--seed", default=7, show_default=True)
@click.option("--resolution", default=256, show_default=True)
@click.option("--out", "out_path", required=True, help="output .agav path")
def cmd_fixture(seed, resolution, out_path):
    """Generate the deterministic synthetic head asset."""
    try:
        _, asset = generate_synthetic_fixture(seed, resolution)
    except HeadSplatError as exc:
        _fail(EXIT_USAGE, str(exc))
    save_asset(out_path, asset)
    click.echo(f"wrote {out_path} ({asset.num_gaussians} gaussians, "
               f"backend={ACTIVE_BACKEND})")


@main.command("serve")
@click.option("--asset", "asset_path", required=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8787, show_default=True)
@click.option("--threads", default=1, show_default=True)
def cmd_serve(asset_path, host, port, threads):
    """Run the live frame-streaming service."""
    import uvicorn

    from .service import create_app

    asset = _load_asset_or_exit(asset_path)
    app = create_app(asset, threads=threads)
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
