"""Deterministic procedural head fixture.

A desk-scale stand-in for licensed head-model data: a UV-sphere-derived head
with lip/cavity labels, smooth shape and localized expression bases, a
4-joint skeleton, smooth canonical attribute maps and a localized linear
deformation basis. Same seed, same bits.
"""

from __future__ import annotations

import numpy as np

from ..compose import ActivationConfig, LinearDeformationBasis
from ..errors import ParameterError
from ..headmodel import (REGION_CAVITY, REGION_LOWER_LIP, REGION_NONE,
                         REGION_UPPER_LIP, HeadModel,
                         derive_mouth_cavity_weights)
from ..rasterizer.sh import SH_C0
from ..uvatlas import AttributeMaps, build_uv_grid
from .container import AvatarAsset

SUPPORTED_RESOLUTIONS = (64, 128, 256, 512)

N_LAT = 63
N_LON = 96
HEAD_RADII = (0.085, 0.11, 0.09)  # x, y, z semi-axes in meters
SHAPE_DIM = 8
EXPR_DIM = 10
CAVITY_RINGS = 4


def _sphere_mesh():
    """Lat-long head shell, seam column duplicated so UVs stay planar."""
    rows = N_LAT + 1
    cols = N_LON + 1
    vrow, vcol = np.meshgrid(np.arange(rows), np.arange(cols), indexing="ij")
    theta = np.pi * vrow / N_LAT
    phi = 2.0 * np.pi * vcol / N_LON - np.pi
    sx, sy, sz = HEAD_RADII
    x = sx * np.sin(theta) * np.sin(phi)
    y = sy * np.cos(theta)
    z = -sz * np.sin(theta) * np.cos(phi)  # face toward -z, seam at the back
    # slight jaw/cranium asymmetry so the head is not a pure ellipsoid
    z = z - 0.015 * np.clip(-y / sy, 0.0, 1.0) ** 2 * np.sin(theta)
    verts = np.stack([x.ravel(), y.ravel(), z.ravel()], axis=1)

    u = 0.02 + 0.96 * vcol / N_LON
    v = 0.12 + 0.86 * vrow / N_LAT
    uvs = np.stack([u.ravel(), v.ravel()], axis=1)

    tris = []
    for i in range(N_LAT):
        for j in range(N_LON):
            a = i * cols + j
            b = a + 1
            c = a + cols
            d = c + 1
            tris.append((a, c, b))
            tris.append((b, c, d))
    return verts, uvs, np.asarray(tris, dtype=np.int32), (rows, cols)


def _lip_vertex_ids(shape):
    rows, cols = shape
    front = np.abs(np.arange(cols) * 2.0 * np.pi / N_LON - np.pi) < 0.40
    lip_cols = np.flatnonzero(front)
    upper_rows = (38, 39)
    lower_rows = (41, 42)
    upper = [r * cols + c for r in upper_rows for c in lip_cols]
    lower = [r * cols + c for r in lower_rows for c in lip_cols]
    return np.asarray(upper), np.asarray(lower), lip_cols


def _build_head(seed: int):
    rng = np.random.default_rng(seed)
    verts, uvs, tris, shape = _sphere_mesh()
    upper, lower, lip_cols = _lip_vertex_ids(shape)
    rows, cols = shape
    nc = lip_cols.size

    labels = np.full(verts.shape[0], REGION_NONE, dtype=np.int32)
    labels[upper] = REGION_UPPER_LIP
    labels[lower] = REGION_LOWER_LIP
    depth = np.zeros(verts.shape[0])

    # cavity: rings of vertices pulled inward from the mouth line
    base = 0.5 * (verts[39 * cols + lip_cols] + verts[41 * cols + lip_cols])
    inward = -base / np.linalg.norm(base, axis=1, keepdims=True)
    cav_verts, cav_uvs = [], []
    v0 = verts.shape[0]
    for ring in range(CAVITY_RINGS):
        t = ring / (CAVITY_RINGS - 1)
        ring_pos = base + (0.005 + 0.030 * t) * inward
        cav_verts.append(ring_pos)
        u = 0.10 + 0.80 * np.arange(nc) / (nc - 1)
        v = np.full(nc, 0.02 + 0.07 * t)
        cav_uvs.append(np.stack([u, v], axis=1))
    cav_verts = np.concatenate(cav_verts)
    cav_uvs = np.concatenate(cav_uvs)

    cav_tris = []
    for ring in range(CAVITY_RINGS - 1):
        for j in range(nc - 1):
            a = v0 + ring * nc + j
            b = a + 1
            c = a + nc
            d = c + 1
            cav_tris.append((a, c, b))
            cav_tris.append((b, c, d))
    verts = np.concatenate([verts, cav_verts])
    uvs = np.concatenate([uvs, cav_uvs])
    tris = np.concatenate([tris, np.asarray(cav_tris, dtype=np.int32)])
    labels = np.concatenate([labels, np.full(cav_verts.shape[0], REGION_CAVITY,
                                             dtype=np.int32)])
    cav_depth = np.repeat(np.arange(CAVITY_RINGS) / (CAVITY_RINGS - 1), nc)
    depth = np.concatenate([depth, cav_depth])

    n_verts = verts.shape[0]
    normals = verts / np.linalg.norm(verts, axis=1, keepdims=True)

    # smooth global shape modes
    shape_basis = np.zeros((n_verts, 3, SHAPE_DIM))
    for d in range(SHAPE_DIM):
        k = rng.uniform(-20.0, 20.0, size=3)
        phase = rng.uniform(0.0, 2.0 * np.pi)
        amp = rng.uniform(0.004, 0.010)
        field = np.sin(verts @ k + phase)
        shape_basis[:, :, d] = amp * field[:, None] * normals

    # localized expression bumps biased toward the face
    expr_basis = np.zeros((n_verts, 3, EXPR_DIM))
    face_ids = np.flatnonzero(verts[:, 2] < -0.02)
    for d in range(EXPR_DIM):
        center = verts[rng.choice(face_ids)]
        sigma = rng.uniform(0.018, 0.032)
        direction = rng.normal(size=3)
        direction /= np.linalg.norm(direction)
        amp = rng.uniform(0.006, 0.012)
        w = np.exp(-np.sum((verts - center) ** 2, axis=1) / (2.0 * sigma ** 2))
        expr_basis[:, :, d] = amp * w[:, None] * direction

    joint_names = ("root", "neck", "jaw", "eyes")
    anchors = np.array([
        [0.0, 0.0, 0.0],
        [0.0, -0.095, 0.0],
        [0.0, -0.045, -0.055],
        [0.0, 0.030, -0.080],
    ])
    joint_parents = np.array([-1, 0, 1, 1], dtype=np.int32)
    sigmas = np.array([0.25, 0.04, 0.04, 0.04])
    regressor = np.zeros((4, n_verts))
    for k in range(4):
        w = np.exp(-np.sum((verts - anchors[k]) ** 2, axis=1) / (2.0 * sigmas[k] ** 2))
        regressor[k] = w / w.sum()

    # smooth region-driven skinning
    def ramp(x):
        return 1.0 / (1.0 + np.exp(-x))

    w_neck = 0.6 * ramp((-0.050 - verts[:, 1]) / 0.012)
    w_jaw = 0.8 * ramp((-0.020 - verts[:, 1]) / 0.010) * ramp((-0.030 - verts[:, 2]) / 0.012)
    eye_d = np.sum((verts - anchors[3]) ** 2, axis=1)
    w_eyes = 0.3 * np.exp(-eye_d / (2.0 * 0.02 ** 2))
    weights = np.stack([np.zeros(n_verts), w_neck, w_jaw, w_eyes], axis=1)
    weights[:, 0] = np.clip(1.0 - weights[:, 1:].sum(axis=1), 0.0, None)
    weights /= weights.sum(axis=1, keepdims=True)

    pose_basis = np.zeros((n_verts, 3, 9 * 3))
    # gentle pose correctives around the jaw so the feature path is exercised
    for col in range(9):
        w = np.exp(-np.sum((verts - anchors[2]) ** 2, axis=1) / (2.0 * 0.03 ** 2))
        direction = rng.normal(size=3)
        direction /= np.linalg.norm(direction)
        pose_basis[:, :, 9 + col] = 0.002 * w[:, None] * direction

    model = HeadModel(
        template_vertices=verts,
        triangles=tris,
        uv_coords=uvs,
        uv_triangles=tris.copy(),
        shape_basis=shape_basis,
        expression_basis=expr_basis,
        pose_corrective_basis=pose_basis,
        joint_regressor=regressor,
        skinning_weights=weights,
        joint_parents=joint_parents,
        joint_names=joint_names,
        region_labels=labels,
        cavity_depth=depth,
    )
    model = derive_mouth_cavity_weights(model)
    model.validate()
    return model, rng


def _smooth_plane(rng, resolution, channels, amplitude, bias=0.0, waves=4):
    r = resolution
    u, v = np.meshgrid((np.arange(r) + 0.5) / r, (np.arange(r) + 0.5) / r)
    plane = np.zeros((r, r, channels))
    for c in range(channels):
        field = np.zeros((r, r))
        for _ in range(waves):
            ku, kv = rng.uniform(-6.0, 6.0, size=2)
            phase = rng.uniform(0.0, 2.0 * np.pi)
            field += rng.uniform(0.3, 1.0) * np.sin(2.0 * np.pi * (ku * u + kv * v) + phase)
        field /= waves
        plane[:, :, c] = bias + amplitude * field
    return plane.astype(np.float32)


def _bump_plane(rng, resolution, channels, amplitude, bumps=6):
    r = resolution
    u, v = np.meshgrid((np.arange(r) + 0.5) / r, (np.arange(r) + 0.5) / r)
    plane = np.zeros((r, r, channels))
    for c in range(channels):
        field = np.zeros((r, r))
        for _ in range(bumps):
            cu, cv = rng.uniform(0.1, 0.9, size=2)
            sigma = rng.uniform(0.03, 0.10)
            field += rng.uniform(-1.0, 1.0) * np.exp(
                -((u - cu) ** 2 + (v - cv) ** 2) / (2.0 * sigma ** 2))
        plane[:, :, c] = amplitude * field
    return plane.astype(np.float32)


def generate_synthetic_fixture(seed: int, resolution: int):
    """Build a (HeadModel, AvatarAsset) pair for tests, demos and benchmarks."""
    if resolution not in SUPPORTED_RESOLUTIONS:
        raise ParameterError(
            f"unsupported resolution {resolution}; choose one of {SUPPORTED_RESOLUTIONS}")
    model, rng = _build_head(seed)
    r = resolution

    skin_tone = np.array([0.72, 0.55, 0.45])
    color = _smooth_plane(rng, r, 3, amplitude=0.12)
    color += skin_tone[None, None, :].astype(np.float32)
    sh0 = ((np.clip(color, 0.05, 0.95) - 0.5) / SH_C0).astype(np.float32)

    maps = AttributeMaps(
        position_offset=_smooth_plane(rng, r, 3, amplitude=0.8),
        log_scale=_smooth_plane(rng, r, 3, amplitude=0.5),
        rotation=(_smooth_plane(rng, r, 4, amplitude=0.2)
                  + np.array([1, 0, 0, 0], dtype=np.float32)),
        color=sh0,
        opacity_logit=_smooth_plane(rng, r, 1, amplitude=1.0, bias=2.0),
    )

    driver_dim = EXPR_DIM + 3
    basis = LinearDeformationBasis(
        position=np.stack([_bump_plane(rng, r, 3, amplitude=0.004)
                           for _ in range(driver_dim)]),
        log_scale=np.stack([_bump_plane(rng, r, 3, amplitude=0.10)
                            for _ in range(driver_dim)]),
        rotation=np.stack([_bump_plane(rng, r, 4, amplitude=0.05)
                           for _ in range(driver_dim)]),
    )

    grid = build_uv_grid(model, r)
    asset = AvatarAsset(
        model=model,
        grid=grid,
        maps=maps,
        config=ActivationConfig(gamma_pos=0.02, s_max=4.0, s_init=6.5),
        basis=basis,
        metadata={"conventions": {"residual_rotation": "left",
                                  "encoding_scale": 0.1}},
    )
    asset.check_consistency()
    return model, asset
