"""Geometry-side conditioning constructions.

Two artifacts: a synthetic rendering of the posed mesh colored by its
expression-isolated vertex displacement, and a UV-baked, variance-normalized
shape displacement map.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np
from PIL import Image

from .headmodel import ExpressionState, HeadModel, articulate
from .rasterizer.camera import Camera
from .uvatlas import UvGrid, build_uv_grid

DEFAULT_ENCODING_SCALE = 0.1  # model units mapped to the full color range


@dataclass(frozen=True)
class DisplacementField:
    values: np.ndarray  # (V, 3)
    provenance: str     # "expression" | "shape"


@dataclass(frozen=True)
class CueImage:
    rgb: np.ndarray  # (H, W, 3) float32 in [0, 1]
    encoding_scale: float

    def save_png(self, path) -> None:
        arr = np.clip(np.rint(self.rgb * 255.0), 0, 255).astype(np.uint8)
        Image.fromarray(arr, mode="RGB").save(path)


@dataclass(frozen=True)
class ConditioningMap:
    planes: np.ndarray  # (R, R, 3)
    normalized: bool    # False when the raw field had zero variance
    scale: float        # the std the planes were divided by (1.0 when flagged)

    @property
    def resolution(self) -> int:
        return self.planes.shape[0]

    def save_raw(self, path, sidecar_path=None) -> None:
        self.planes.astype("<f4").transpose(2, 0, 1).tofile(path)
        if sidecar_path is not None:
            meta = {"resolution": self.resolution, "normalized": self.normalized,
                    "scale": self.scale, "layout": "planar-f4-le"}
            with open(sidecar_path, "w") as fh:
                json.dump(meta, fh, indent=2)


def _neutral_pose_with_jaw(model: HeadModel, jaw) -> np.ndarray:
    pose = np.zeros((model.num_joints, 3))
    pose[model.jaw_joint] = np.asarray(jaw, dtype=np.float64)
    return pose


def expression_displacement(model: HeadModel, psi, jaw=None) -> DisplacementField:
    """Vertex displacement of the neutral-shape head posed by (psi, jaw)."""
    psi = np.asarray(psi, dtype=np.float64)
    jaw = np.zeros(3) if jaw is None else np.asarray(jaw, dtype=np.float64)
    posed = articulate(model, ExpressionState(
        shape=np.zeros(model.shape_dim), expression=psi,
        pose=_neutral_pose_with_jaw(model, jaw)))
    neutral = articulate(model, ExpressionState.neutral(model))
    return DisplacementField(values=posed.vertices - neutral.vertices,
                             provenance="expression")


def shape_displacement(model: HeadModel, beta) -> DisplacementField:
    beta = np.asarray(beta, dtype=np.float64)
    shaped = articulate(model, ExpressionState(
        shape=beta, expression=np.zeros(model.expression_dim),
        pose=np.zeros((model.num_joints, 3))))
    neutral = articulate(model, ExpressionState.neutral(model))
    return DisplacementField(values=shaped.vertices - neutral.vertices,
                             provenance="shape")


def bake_conditioning_map(model: HeadModel, field: DisplacementField,
                          resolution: int,
                          grid: Optional[UvGrid] = None) -> ConditioningMap:
    """Bake a per-vertex field into UV texels and normalize to unit variance.

    The whole map is divided by one scalar: the standard deviation over the
    covered texels and all three channels. A zero-variance field is returned
    unnormalized with the flag cleared.
    """
    if grid is None or grid.resolution != resolution:
        grid = build_uv_grid(model, resolution)
    tri = model.triangles[grid.triangle_id]
    vals = (field.values[tri[:, 0]] * grid.bary[:, 0:1]
            + field.values[tri[:, 1]] * grid.bary[:, 1:2]
            + field.values[tri[:, 2]] * grid.bary[:, 2:3])
    planes = np.zeros((resolution, resolution, 3))
    ij = grid.texel_indices()
    # a spatially constant field (zero variance across texels) cannot be
    # normalized meaningfully and is passed through with the flag cleared
    spatial = float(np.max(np.std(vals, axis=0))) if vals.size else 0.0
    if spatial < 1e-12:
        planes[ij[:, 0], ij[:, 1]] = vals
        return ConditioningMap(planes=planes, normalized=False, scale=1.0)
    std = float(np.std(vals))
    planes[ij[:, 0], ij[:, 1]] = vals / std
    return ConditioningMap(planes=planes, normalized=True, scale=std)


def encode_displacement_colors(disp: np.ndarray, encoding_scale: float) -> np.ndarray:
    """Signed displacement to RGB: zero maps to mid-gray."""
    return np.clip(0.5 + disp / (2.0 * encoding_scale), 0.0, 1.0)


def _project_vertices(cam: Camera, verts: np.ndarray):
    p_cam = verts @ cam.rotation.T + cam.translation
    z = p_cam[:, 2]
    z_safe = np.where(z > 1e-9, z, 1e-9)
    x = cam.fx * p_cam[:, 0] / z_safe + cam.cx
    y = cam.fy * p_cam[:, 1] / z_safe + cam.cy
    return np.stack([x, y], axis=1), z


def rasterize_mesh_colors(cam: Camera, verts: np.ndarray, triangles: np.ndarray,
                          vertex_colors: np.ndarray,
                          background) -> np.ndarray:
    """Z-buffered triangle fill with perspective-correct color interpolation."""
    h, w = cam.height, cam.width
    img = np.empty((h, w, 3), dtype=np.float64)
    img[:] = np.asarray(background, dtype=np.float64)
    zbuf = np.full((h, w), np.inf)

    screen, depth = _project_vertices(cam, verts)
    inv_z = 1.0 / np.where(depth > 1e-9, depth, np.inf)

    for tri in triangles:
        if np.any(depth[tri] <= 1e-6):
            continue
        a, b, c = screen[tri[0]], screen[tri[1]], screen[tri[2]]
        area = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        if abs(area) < 1e-12:
            continue
        x0 = max(int(np.floor(min(a[0], b[0], c[0]) - 0.5)), 0)
        x1 = min(int(np.ceil(max(a[0], b[0], c[0]) + 0.5)), w - 1)
        y0 = max(int(np.floor(min(a[1], b[1], c[1]) - 0.5)), 0)
        y1 = min(int(np.ceil(max(a[1], b[1], c[1]) + 0.5)), h - 1)
        if x1 < x0 or y1 < y0:
            continue
        xs = np.arange(x0, x1 + 1) + 0.5
        ys = np.arange(y0, y1 + 1) + 0.5
        px, py = np.meshgrid(xs, ys)
        w0 = ((b[0] - px) * (c[1] - py) - (b[1] - py) * (c[0] - px)) / area
        w1 = ((c[0] - px) * (a[1] - py) - (c[1] - py) * (a[0] - px)) / area
        w2 = 1.0 - w0 - w1
        inside = (w0 >= 0) & (w1 >= 0) & (w2 >= 0)
        if not inside.any():
            continue
        # perspective-correct weights via 1/z interpolation
        iz = (w0 * inv_z[tri[0]] + w1 * inv_z[tri[1]] + w2 * inv_z[tri[2]])
        z_px = 1.0 / np.where(iz > 0, iz, np.inf)
        rows, cols = np.nonzero(inside)
        yy, xx = rows + y0, cols + x0
        closer = z_px[rows, cols] < zbuf[yy, xx]
        if not closer.any():
            continue
        rows, cols = rows[closer], cols[closer]
        yy, xx = yy[closer], xx[closer]
        pw0 = w0[rows, cols] * inv_z[tri[0]]
        pw1 = w1[rows, cols] * inv_z[tri[1]]
        pw2 = w2[rows, cols] * inv_z[tri[2]]
        denom = pw0 + pw1 + pw2
        col = (pw0[:, None] * vertex_colors[tri[0]]
               + pw1[:, None] * vertex_colors[tri[1]]
               + pw2[:, None] * vertex_colors[tri[2]]) / denom[:, None]
        zbuf[yy, xx] = z_px[rows, cols]
        img[yy, xx] = col
    return img


def render_cue(model: HeadModel, state: ExpressionState, cam: Camera,
               encoding_scale: float = DEFAULT_ENCODING_SCALE) -> CueImage:
    """Posed mesh colored by the expression-isolated displacement.

    The vertex colors ignore the state's shape code entirely: they encode the
    displacement of the neutral-shape head under (psi, jaw) only, so the cue
    carries expression but no identity.
    """
    state.check(model)
    jaw = state.pose[model.jaw_joint]
    disp = expression_displacement(model, state.expression, jaw)
    colors = encode_displacement_colors(disp.values, encoding_scale)
    mesh = articulate(model, state)
    background = encode_displacement_colors(np.zeros((1, 3)), encoding_scale)[0]
    img = rasterize_mesh_colors(cam, mesh.vertices, model.triangles, colors,
                                background)
    return CueImage(rgb=img.astype(np.float32), encoding_scale=encoding_scale)
