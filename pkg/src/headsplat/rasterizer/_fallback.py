"""Pure-numpy tile blending, used when the compiled kernel is unavailable.

Same contract and the same per-tile fragment order as the compiled kernel;
float32 arithmetic so results stay within the oracle tolerance.
"""

from __future__ import annotations

import numpy as np

TILE = 16
SKIP_ALPHA = np.float32(1.0 / 255.0)
ALPHA_CEIL = np.float32(0.99)
TERM_T = np.float32(1e-4)


def blend_tiles(fragments, tile_starts,
                tiles_x, tiles_y, width, height, background, num_threads):
    """Fragment columns: mean x, mean y, conic a, b, c, r, g, b, alpha,
    radius; num_threads accepted for signature parity, this path is
    sequential and evaluates whole tiles, relying on the 1/255 skip."""
    fr_mean = fragments[:, 0:2]
    fr_conic = fragments[:, 2:5]
    fr_rgb = fragments[:, 5:8]
    fr_alpha = fragments[:, 8]
    out = np.empty((height, width, 4), dtype=np.float32)
    for tile in range(tiles_x * tiles_y):
        tx, ty = tile % tiles_x, tile // tiles_x
        x0, y0 = tx * TILE, ty * TILE
        x1, y1 = min(x0 + TILE, width), min(y0 + TILE, height)
        s, e = int(tile_starts[tile]), int(tile_starts[tile + 1])

        cols = (np.arange(x0, x1, dtype=np.float32) + np.float32(0.5))[None, :]
        rows = (np.arange(y0, y1, dtype=np.float32) + np.float32(0.5))[:, None]
        t = np.ones((y1 - y0, x1 - x0), dtype=np.float32)
        acc = np.zeros((y1 - y0, x1 - x0, 3), dtype=np.float32)

        for k in range(s, e):
            dx = cols - fr_mean[k, 0]
            dy = rows - fr_mean[k, 1]
            power = (np.float32(-0.5) * (fr_conic[k, 0] * dx * dx
                                         + fr_conic[k, 2] * dy * dy)
                     - fr_conic[k, 1] * dx * dy)
            ap = np.minimum(fr_alpha[k] * np.exp(power), ALPHA_CEIL)
            live = (ap >= SKIP_ALPHA) & (t >= TERM_T)
            if not live.any():
                if (t < TERM_T).all():
                    break
                continue
            w = np.where(live, ap * t, np.float32(0.0))
            acc += w[:, :, None] * fr_rgb[k]
            t = np.where(live, t * (np.float32(1.0) - ap), t)

        out[y0:y1, x0:x1, :3] = acc + t[:, :, None] * background[None, None, :]
        out[y0:y1, x0:x1, 3] = np.float32(1.0) - t
    return out
