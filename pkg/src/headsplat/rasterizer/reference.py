"""Brute-force splat renderer used as the correctness oracle.

Every projected splat is evaluated at every pixel in global depth order and
blended with the literal front-to-back formula. No tiling, no early
termination; only the shared 1/255 opacity skip. Float64 accumulation keeps
the oracle independent of the tiled kernel's float32 arithmetic.
"""

from __future__ import annotations

import numpy as np

from ..compose import GaussianCloud
from ..errors import ParameterError
from .camera import Camera
from .framebuffer import FrameBuffer
from .project import ALPHA_CEIL, SKIP_ALPHA, project


def blend_pixel(alpha_prime, colors, background=(0.0, 0.0, 0.0),
                early_termination: bool = True) -> np.ndarray:
    """Blend depth-sorted fragments at one pixel.

    `alpha_prime` are the already-modulated (and, in the full pipeline,
    already-ceilinged) opacities; they are used as given. Fragments below the
    1/255 threshold are skipped; accumulation stops once transmittance drops
    below 1e-4 and the remaining transmittance lights the background.
    """
    ap = np.asarray(alpha_prime, dtype=np.float64)
    cols = np.asarray(colors, dtype=np.float64)
    out = np.zeros(3)
    t = 1.0
    for i in range(ap.shape[0]):
        a = ap[i]
        if a < SKIP_ALPHA:
            continue
        out += cols[i] * a * t
        t *= 1.0 - a
        if early_termination and t < 1e-4:
            break
    return out + t * np.asarray(background, dtype=np.float64)


def render_reference(cloud: GaussianCloud, cam: Camera,
                     background=(0.0, 0.0, 0.0)) -> FrameBuffer:
    if cam.width <= 0 or cam.height <= 0:
        raise ParameterError("zero-sized image")
    bg = np.asarray(background, dtype=np.float64)
    splats = project(cloud, cam)

    h, w = cam.height, cam.width
    xs = np.arange(w, dtype=np.float64) + 0.5
    ys = np.arange(h, dtype=np.float64) + 0.5
    px, py = np.meshgrid(xs, ys)

    order = np.lexsort((np.arange(splats.count), splats.depth))
    acc = np.zeros((h, w, 3))
    trans = np.ones((h, w))
    for i in order:
        dx = px - np.float64(splats.mean2d[i, 0])
        dy = py - np.float64(splats.mean2d[i, 1])
        a, b, c = (np.float64(splats.conic[i, 0]), np.float64(splats.conic[i, 1]),
                   np.float64(splats.conic[i, 2]))
        power = -0.5 * (a * dx * dx + c * dy * dy) - b * dx * dy
        ap = np.minimum(np.float64(splats.alpha[i]) * np.exp(power), ALPHA_CEIL)
        mask = ap >= SKIP_ALPHA
        if not mask.any():
            continue
        contrib = np.where(mask, ap * trans, 0.0)
        acc += contrib[:, :, None] * splats.rgb[i].astype(np.float64)
        trans = np.where(mask, trans * (1.0 - ap), trans)

    rgba = np.empty((h, w, 4), dtype=np.float32)
    rgba[:, :, :3] = (acc + trans[:, :, None] * bg).astype(np.float32)
    rgba[:, :, 3] = (1.0 - trans).astype(np.float32)
    return FrameBuffer(rgba=rgba, background=bg.astype(np.float32))
