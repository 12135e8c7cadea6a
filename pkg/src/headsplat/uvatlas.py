"""UV-grid construction, bilinear sampling and barycentric surface lifting."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import AssetError, ParameterError
from .headmodel import HeadModel, Mesh


@dataclass(frozen=True)
class UvGrid:
    """Texel-center samples covered by the UV atlas.

    Sample i lives at uv[i] = ((col + 0.5) / R, (row + 0.5) / R) inside
    triangle triangle_id[i] with barycentric coordinates bary[i]. Samples are
    ordered row-major over texels, so the grid is deterministic for a model.
    """

    resolution: int
    uv: np.ndarray           # (N, 2) float64
    triangle_id: np.ndarray  # (N,) int32
    bary: np.ndarray         # (N, 3) float64, non-negative, rows sum to 1
    degenerate_skipped: int = 0

    @property
    def num_samples(self) -> int:
        return self.uv.shape[0]

    def texel_indices(self) -> np.ndarray:
        """(N, 2) integer (row, col) texel coordinates of each sample."""
        r = self.resolution
        cols = np.floor(self.uv[:, 0] * r).astype(np.int64)
        rows = np.floor(self.uv[:, 1] * r).astype(np.int64)
        return np.stack([rows, cols], axis=1)


@dataclass(frozen=True)
class AttributeMaps:
    """Raw (pre-activation) per-texel Gaussian attribute planes."""

    position_offset: np.ndarray  # (R, R, 3)
    log_scale: np.ndarray        # (R, R, 3)
    rotation: np.ndarray         # (R, R, 4)
    color: np.ndarray            # (R, R, 3 * (L + 1)**2)
    opacity_logit: np.ndarray    # (R, R, 1)

    def __post_init__(self):
        r = self.position_offset.shape[0]
        for name in ("position_offset", "log_scale", "rotation", "color", "opacity_logit"):
            plane = getattr(self, name)
            if plane.shape[:2] != (r, r):
                raise AssetError(f"attribute plane {name} resolution mismatch")

    @property
    def resolution(self) -> int:
        return self.position_offset.shape[0]

    @property
    def sh_degree(self) -> int:
        n = self.color.shape[2] // 3
        return int(round(np.sqrt(n))) - 1

    def stacked(self) -> np.ndarray:
        return np.concatenate(
            [self.position_offset, self.log_scale, self.rotation,
             self.color, self.opacity_logit], axis=2)

    def channel_slices(self) -> dict:
        sizes = [("position_offset", 3), ("log_scale", 3), ("rotation", 4),
                 ("color", self.color.shape[2]), ("opacity_logit", 1)]
        out, off = {}, 0
        for name, n in sizes:
            out[name] = slice(off, off + n)
            off += n
        return out


def _triangle_bary(points: np.ndarray, a, b, c):
    """Barycentric coords of 2D points w.r.t. triangle (a, b, c), or None."""
    area = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    if abs(area) < 1e-14:
        return None
    w0 = ((b[0] - points[:, 0]) * (c[1] - points[:, 1])
          - (b[1] - points[:, 1]) * (c[0] - points[:, 0])) / area
    w1 = ((c[0] - points[:, 0]) * (a[1] - points[:, 1])
          - (c[1] - points[:, 1]) * (a[0] - points[:, 0])) / area
    w2 = 1.0 - w0 - w1
    return np.stack([w0, w1, w2], axis=1)


def build_uv_grid(model: HeadModel, resolution: int) -> UvGrid:
    """Rasterize the UV atlas over texel centers.

    Texels covered by several triangles keep the lowest triangle index;
    degenerate UV triangles are skipped and counted.
    """
    r = resolution
    if r <= 0:
        raise ParameterError("resolution must be positive")
    owner = np.full((r, r), -1, dtype=np.int64)
    bary_grid = np.zeros((r, r, 3))
    degenerate = 0

    uv = model.uv_coords
    for tri_idx, tri in enumerate(model.uv_triangles):
        a, b, c = uv[tri[0]], uv[tri[1]], uv[tri[2]]
        lo = np.minimum(np.minimum(a, b), c)
        hi = np.maximum(np.maximum(a, b), c)
        c0 = max(int(np.floor(lo[0] * r - 0.5)), 0)
        c1 = min(int(np.ceil(hi[0] * r - 0.5)), r - 1)
        r0 = max(int(np.floor(lo[1] * r - 0.5)), 0)
        r1 = min(int(np.ceil(hi[1] * r - 0.5)), r - 1)
        if c1 < c0 or r1 < r0:
            continue
        cols, rows = np.meshgrid(np.arange(c0, c1 + 1), np.arange(r0, r1 + 1))
        pts = np.stack([(cols.ravel() + 0.5) / r, (rows.ravel() + 0.5) / r], axis=1)
        bary = _triangle_bary(pts, a, b, c)
        if bary is None:
            degenerate += 1
            continue
        inside = np.all(bary >= 0.0, axis=1)
        rr, cc = rows.ravel()[inside], cols.ravel()[inside]
        free = owner[rr, cc] < 0
        rr, cc = rr[free], cc[free]
        owner[rr, cc] = tri_idx
        bary_grid[rr, cc] = bary[inside][free]

    rows, cols = np.nonzero(owner >= 0)
    order = np.lexsort((cols, rows))
    rows, cols = rows[order], cols[order]
    return UvGrid(
        resolution=r,
        uv=np.stack([(cols + 0.5) / r, (rows + 0.5) / r], axis=1),
        triangle_id=owner[rows, cols].astype(np.int32),
        bary=bary_grid[rows, cols],
        degenerate_skipped=degenerate,
    )


def grid_sample(plane: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Bilinear sample of an (R, R, C) plane at uv points in the unit square.

    Texel centers sit at (i + 0.5) / R; queries outside are clamped to the
    edge texels.
    """
    pts = np.asarray(points, dtype=np.float64)
    if not np.all(np.isfinite(pts)):
        raise ParameterError("non-finite uv query")
    r = plane.shape[0]
    x = np.clip(pts[:, 0] * r - 0.5, 0.0, r - 1.0)
    y = np.clip(pts[:, 1] * r - 0.5, 0.0, r - 1.0)
    x0 = np.floor(x).astype(np.int64)
    y0 = np.floor(y).astype(np.int64)
    x1 = np.minimum(x0 + 1, r - 1)
    y1 = np.minimum(y0 + 1, r - 1)
    fx = (x - x0)[:, None]
    fy = (y - y0)[:, None]
    p = plane.astype(np.float64, copy=False)
    top = p[y0, x0] * (1.0 - fx) + p[y0, x1] * fx
    bot = p[y1, x0] * (1.0 - fx) + p[y1, x1] * fx
    return top * (1.0 - fy) + bot * fy


def sample_attribute_maps(maps: AttributeMaps, points: np.ndarray) -> dict:
    """Sample every channel group at the given uv points."""
    rows = grid_sample(maps.stacked(), points)
    return {name: rows[:, sl] for name, sl in maps.channel_slices().items()}


def surface_interpolate(mesh: Mesh, grid: UvGrid) -> np.ndarray:
    """Barycentric 3D positions of the grid samples on an articulated mesh."""
    if grid.num_samples == 0:
        return np.zeros((0, 3))
    if grid.triangle_id.max(initial=-1) >= mesh.triangles.shape[0]:
        raise AssetError("grid triangle id out of range for this mesh")
    tri = mesh.triangles[grid.triangle_id]
    v = mesh.vertices
    return (v[tri[:, 0]] * grid.bary[:, 0:1]
            + v[tri[:, 1]] * grid.bary[:, 1:2]
            + v[tri[:, 2]] * grid.bary[:, 2:3])
