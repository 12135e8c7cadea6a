"""Tile-based splat rendering with per-stage timings."""

from __future__ import annotations

import time

import numpy as np

from ..compose import GaussianCloud
from ..errors import ParameterError
from .backend import get_blend_tiles
from .binning import bin_splats
from .camera import Camera
from .framebuffer import FrameBuffer
from .project import project


def _gather_fragments(splats, bins):
    return splats.packed[bins.fragment_splat]


def render(cloud: GaussianCloud, cam: Camera, background=(0.0, 0.0, 0.0),
           threads: int = 1, backend: str | None = None) -> FrameBuffer:
    fb, _ = render_with_stats(cloud, cam, background, threads=threads,
                              backend=backend)
    return fb


def render_with_stats(cloud: GaussianCloud, cam: Camera,
                      background=(0.0, 0.0, 0.0), threads: int = 1,
                      backend: str | None = None):
    """Render and return (FrameBuffer, stage timings in ms)."""
    if cam.width <= 0 or cam.height <= 0:
        raise ParameterError("zero-sized image")
    bg = np.asarray(background, dtype=np.float32)
    blend_tiles = get_blend_tiles(backend)
    stats = {}

    t0 = time.perf_counter()
    splats = project(cloud, cam)
    t1 = time.perf_counter()
    bins = bin_splats(splats, cam.width, cam.height)
    fr = _gather_fragments(splats, bins)
    t2 = time.perf_counter()
    rgba = blend_tiles(fr, bins.tile_starts, bins.tiles_x, bins.tiles_y,
                       cam.width, cam.height, bg, int(threads))
    t3 = time.perf_counter()

    stats["project_ms"] = (t1 - t0) * 1e3
    stats["sort_bin_ms"] = (t2 - t1) * 1e3
    stats["blend_ms"] = (t3 - t2) * 1e3
    stats["culled_near"] = splats.culled_near
    stats["culled_offscreen"] = splats.culled_offscreen
    return FrameBuffer(rgba=rgba, background=bg), stats
