"""Tile binning and deterministic depth ordering of projected splats."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .project import ProjectedSplats

TILE = 16


@dataclass(frozen=True)
class TileBins:
    """Fragments grouped per tile, each group sorted by (depth, splat index)."""

    fragment_splat: np.ndarray  # (P,) index into the projected arrays
    tile_starts: np.ndarray     # (T + 1,) fragment range per tile, row-major
    tiles_x: int
    tiles_y: int


def bin_splats(splats: ProjectedSplats, width: int, height: int) -> TileBins:
    tiles_x = (width + TILE - 1) // TILE
    tiles_y = (height + TILE - 1) // TILE
    num_tiles = tiles_x * tiles_y
    m = splats.count
    if m == 0:
        return TileBins(
            fragment_splat=np.zeros(0, dtype=np.int64),
            tile_starts=np.zeros(num_tiles + 1, dtype=np.int64),
            tiles_x=tiles_x, tiles_y=tiles_y)

    x = np.ascontiguousarray(splats.mean2d[:, 0])
    y = np.ascontiguousarray(splats.mean2d[:, 1])
    r = np.ascontiguousarray(splats.radius)
    inv_tile = np.float32(1.0 / TILE)
    tx0 = np.clip(np.floor((x - r) * inv_tile), 0, tiles_x - 1).astype(np.int64)
    tx1 = np.clip(np.floor((x + r) * inv_tile), 0, tiles_x - 1).astype(np.int64) + 1
    ty0 = np.clip(np.floor((y - r) * inv_tile), 0, tiles_y - 1).astype(np.int64)
    ty1 = np.clip(np.floor((y + r) * inv_tile), 0, tiles_y - 1).astype(np.int64) + 1

    nx = tx1 - tx0
    ny = ty1 - ty0
    counts = nx * ny
    total = int(counts.sum())
    splat_idx = np.repeat(np.arange(m, dtype=np.int64), counts)
    offsets = np.arange(total, dtype=np.int64) - np.repeat(
        np.cumsum(counts) - counts, counts)
    ty_off, tx_off = np.divmod(offsets, nx[splat_idx])
    tx = tx0[splat_idx] + tx_off
    ty = ty0[splat_idx] + ty_off

    # drop corner tiles whose rectangle lies outside the splat's radius
    # circle; every pixel there fails the 1/255 opacity cut anyway
    cx = x[splat_idx]
    cy = y[splat_idx]
    rect_x = (tx * TILE).astype(np.float32)
    rect_y = (ty * TILE).astype(np.float32)
    ddx = np.clip(cx, rect_x, rect_x + TILE) - cx
    ddy = np.clip(cy, rect_y, rect_y + TILE) - cy
    rr = r[splat_idx]
    hit = ddx * ddx + ddy * ddy <= rr * rr
    splat_idx = splat_idx[hit]
    tile_id = ty[hit] * tiles_x + tx[hit]

    # primary key: tile, then depth, then splat index for determinism; depths
    # are positive, so their float32 bit patterns sort like the values, and a
    # stable sort on the packed key keeps generation (= splat index) order
    depth_bits = splats.depth[splat_idx].view(np.uint32).astype(np.uint64)
    key = (tile_id.astype(np.uint64) << np.uint64(32)) | depth_bits
    order = np.argsort(key, kind="stable")
    fragment_splat = splat_idx[order]
    tile_sorted = tile_id[order]
    tile_starts = np.zeros(num_tiles + 1, dtype=np.int64)
    np.cumsum(np.bincount(tile_sorted, minlength=num_tiles), out=tile_starts[1:])
    return TileBins(fragment_splat=fragment_splat, tile_starts=tile_starts,
                    tiles_x=tiles_x, tiles_y=tiles_y)
