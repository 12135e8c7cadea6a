"""Stage-timed benchmark over the full per-frame animation path."""

from __future__ import annotations

import time

import numpy as np

from .compose import GaussianCloud, lift, make_identity_cache
from .errors import ParameterError
from .headmodel import ExpressionState, articulate
from .rasterizer import bin_splats, project
from .rasterizer.backend import ACTIVE_BACKEND, get_blend_tiles
from .rasterizer.camera import Camera
from .rasterizer.render import _gather_fragments
from .uvatlas import surface_interpolate

BENCH_SCHEMA = "headsplat.bench/1"
PAPER_CPU_FPS_REFERENCE = 9.0  # published CPU-only figure, reported informatively

STAGES = ("articulate", "residuals", "compose_lift", "project", "sort_bin",
          "blend")


def run_bench(asset, width: int, height: int, threads: int = 1,
              frames: int = 60, seed: int = 0, warmup: int = 10,
              backend: str | None = None) -> dict:
    """Render `frames` randomized-expression frames and report stage timings.

    The first `warmup` frames (at least 10) are excluded from the averages.
    """
    if frames <= 0:
        raise ParameterError("frames must be positive")
    warmup = max(warmup, 10)
    rng = np.random.default_rng(seed)
    cam = Camera.front(width, height)
    cache = make_identity_cache(asset)
    provider = asset.default_provider()
    blend_tiles = get_blend_tiles(backend)
    bg = np.zeros(3, dtype=np.float32)
    model = asset.model
    jaw_joint = model.jaw_joint

    totals = {name: 0.0 for name in STAGES}
    total_ms = 0.0
    measured = 0

    for frame in range(frames + warmup):
        psi = rng.normal(0.0, 0.7, size=model.expression_dim)
        jaw = np.array([0.15 * abs(rng.normal()), 0.0, 0.0])
        pose = np.zeros((model.num_joints, 3))
        pose[jaw_joint] = jaw
        state = ExpressionState(shape=np.zeros(model.shape_dim),
                                expression=psi, pose=pose)

        t0 = time.perf_counter()
        mesh = articulate(model, state)
        t1 = time.perf_counter()
        residuals = provider.residuals(psi, jaw)
        t2 = time.perf_counter()
        base = surface_interpolate(mesh, cache.grid)
        composed = cache.composed(residuals, asset.config)
        cloud = GaussianCloud(mu=lift(base, composed.offset),
                              scale=composed.scale, rotation=composed.rotation,
                              sh=cache.color, opacity=cache.opacity)
        t3 = time.perf_counter()
        splats = project(cloud, cam)
        t4 = time.perf_counter()
        bins = bin_splats(splats, width, height)
        fr = _gather_fragments(splats, bins)
        t5 = time.perf_counter()
        blend_tiles(fr, bins.tile_starts, bins.tiles_x, bins.tiles_y,
                    width, height, bg, int(threads))
        t6 = time.perf_counter()

        if frame >= warmup:
            totals["articulate"] += t1 - t0
            totals["residuals"] += t2 - t1
            totals["compose_lift"] += t3 - t2
            totals["project"] += t4 - t3
            totals["sort_bin"] += t5 - t4
            totals["blend"] += t6 - t5
            total_ms += (t6 - t0)
            measured += 1

    stage_ms = {name: totals[name] * 1e3 / measured for name in STAGES}
    mean_total_ms = total_ms * 1e3 / measured
    fps = 1000.0 / mean_total_ms
    return {
        "schema": BENCH_SCHEMA,
        "backend": backend or ACTIVE_BACKEND,
        "gaussian_count": asset.num_gaussians,
        "image_size": [width, height],
        "threads": threads,
        "frames": measured,
        "warmup_excluded": warmup,
        "stage_ms": stage_ms,
        "mean_total_ms": mean_total_ms,
        "fps": fps,
        "paper_cpu_fps_reference": PAPER_CPU_FPS_REFERENCE,
        "fps_vs_paper_cpu": fps / PAPER_CPU_FPS_REFERENCE,
    }
