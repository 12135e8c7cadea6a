# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Hot tile-blending kernel.

Fragments are walked in per-tile depth order with per-pixel transmittance
state, restricted to each fragment's pixel bounding box; pixels outside the
box are exactly the ones the 1/255 opacity skip would reject, and a tile
stops as soon as every pixel is saturated, so the result is bitwise
identical to the naive per-pixel loop. Tiles are independent, making the
parallel loop bitwise deterministic for any thread count."""

from cython.parallel cimport prange
from libc.math cimport ceilf, expf, floorf

import numpy as np

cimport numpy as cnp

cdef extern from "_row_blend.h":
    int hs_blend_row(const float* frag, float dy, const float* colx,
                     float* trans, float* accr, float* accg, float* accb,
                     int tw) nogil

DEF TILE = 16
DEF TILE_PIXELS = 256
DEF SKIP_ALPHA = 0.00392156862745098  # 1/255
DEF ALPHA_CEIL = 0.99
DEF TERM_T = 1e-4


cdef void _blend_tile(int tile, int tiles_x, int width, int height,
                      const float* frag,
                      const long long[::1] starts, const float[::1] bg,
                      float[:, :, ::1] out) noexcept nogil:
    cdef int tx = tile % tiles_x
    cdef int ty = tile // tiles_x
    cdef int x0 = tx * TILE
    cdef int y0 = ty * TILE
    cdef int x1 = min(x0 + TILE, width)
    cdef int y1 = min(y0 + TILE, height)
    cdef int tw = x1 - x0
    cdef int th = y1 - y0
    cdef long long s = starts[tile]
    cdef long long e = starts[tile + 1]
    cdef long long k
    cdef int px, py, iy0, iy1, idx, ry, j, base, ndead, alive, ni
    cdef float mx, my, r, ca, cb, cc, fr, fg, fb_, al
    cdef float dx, dy, cydy, cbdy, power, ap, t, w, contrib
    cdef float et, g, p
    cdef float colx[TILE]
    cdef float trans[TILE_PIXELS]
    cdef float accr[TILE_PIXELS]
    cdef float accg[TILE_PIXELS]
    cdef float accb[TILE_PIXELS]
    cdef unsigned char rowdead[TILE]

    for idx in range(th * tw):
        trans[idx] = 1.0
        accr[idx] = 0.0
        accg[idx] = 0.0
        accb[idx] = 0.0
    for j in range(tw):
        colx[j] = <float>(x0 + j) + 0.5
    for ry in range(th):
        rowdead[ry] = 0
    ndead = 0

    cdef const float* row
    for k in range(s, e):
        if ndead == th:
            break
        row = frag + 10 * k
        my = row[1]
        r = row[9]
        iy0 = <int>floorf(my - r - 0.5)
        iy1 = <int>ceilf(my + r - 0.5)
        if iy0 < y0:
            iy0 = y0
        if iy1 > y1 - 1:
            iy1 = y1 - 1
        if iy1 < iy0:
            continue
        for py in range(iy0, iy1 + 1):
            ry = py - y0
            if rowdead[ry]:
                continue
            dy = (py + 0.5) - my
            base = ry * tw
            alive = hs_blend_row(row, dy, colx, &trans[base], &accr[base],
                                 &accg[base], &accb[base], tw)
            if alive == 0:
                rowdead[ry] = 1
                ndead = ndead + 1

    for py in range(y0, y1):
        for px in range(x0, x1):
            idx = (py - y0) * tw + (px - x0)
            t = trans[idx]
            out[py, px, 0] = accr[idx] + t * bg[0]
            out[py, px, 1] = accg[idx] + t * bg[1]
            out[py, px, 2] = accb[idx] + t * bg[2]
            out[py, px, 3] = 1.0 - t


def blend_tiles(const float[:, ::1] fragments,
                const long long[::1] tile_starts, int tiles_x, int tiles_y,
                int width, int height, const float[::1] background,
                int num_threads):
    """Blend pre-binned, depth-sorted packed fragments into an RGBA image.

    Fragment columns: mean x, mean y, conic a, b, c, r, g, b, alpha, radius.
    """
    out = np.empty((height, width, 4), dtype=np.float32)
    cdef float[:, :, ::1] ob = out
    cdef int ntiles = tiles_x * tiles_y
    cdef int t
    cdef const float* fp = NULL
    if fragments.shape[0] > 0:
        fp = &fragments[0, 0]
    if num_threads <= 1:
        for t in range(ntiles):
            _blend_tile(t, tiles_x, width, height, fp,
                        tile_starts, background, ob)
    else:
        for t in prange(ntiles, nogil=True, schedule="dynamic",
                        num_threads=num_threads):
            _blend_tile(t, tiles_x, width, height, fp,
                        tile_starts, background, ob)
    return out
