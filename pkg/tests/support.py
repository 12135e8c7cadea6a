"""Shared helpers: small random models and clouds with known properties."""

import numpy as np

from headsplat.compose import GaussianCloud
from headsplat.headmodel import (REGION_CAVITY, REGION_LOWER_LIP, REGION_NONE,
                                 REGION_UPPER_LIP, HeadModel)
from headsplat.rasterizer.sh import SH_C0


def random_model(rng, num_vertices=40, num_joints=3, d_beta=4, d_psi=5):
    """Small valid head model with random bases for oracle tests."""
    v, k = num_vertices, num_joints
    verts = rng.normal(0.0, 0.1, size=(v, 3))
    tris = np.stack([
        np.arange(v - 2), np.arange(1, v - 1), np.arange(2, v),
    ], axis=1).astype(np.int32)
    uvs = rng.uniform(0.05, 0.95, size=(v, 2))
    weights = rng.uniform(0.1, 1.0, size=(v, k))
    weights /= weights.sum(axis=1, keepdims=True)
    regressor = rng.uniform(0.0, 1.0, size=(k, v))
    regressor /= regressor.sum(axis=1, keepdims=True)
    parents = np.concatenate([[-1], np.arange(k - 1)]).astype(np.int32)
    names = tuple(["root", "jaw"] + [f"extra{i}" for i in range(k - 2)])[:k]
    return HeadModel(
        template_vertices=verts,
        triangles=tris,
        uv_coords=uvs,
        uv_triangles=tris.copy(),
        shape_basis=rng.normal(0.0, 0.01, size=(v, 3, d_beta)),
        expression_basis=rng.normal(0.0, 0.01, size=(v, 3, d_psi)),
        pose_corrective_basis=rng.normal(0.0, 0.001, size=(v, 3, 9 * (k - 1))),
        joint_regressor=regressor,
        skinning_weights=weights,
        joint_parents=parents,
        joint_names=names,
        region_labels=np.full(v, REGION_NONE, dtype=np.int32),
        cavity_depth=np.zeros(v),
    )


def lip_model():
    """Four-vertex model with one upper and one lower lip vertex, used to
    pin down the cavity weight derivation exactly."""
    verts = np.array([
        [0.0, 1.0, 0.0],    # upper lip
        [0.0, -1.0, 0.0],   # lower lip
        [0.0, 0.8, 0.0],    # cavity, near the upper lip
        [0.0, -0.1, 0.0],   # cavity apex (equidistant enough to be "deep")
    ])
    labels = np.array([REGION_UPPER_LIP, REGION_LOWER_LIP, REGION_CAVITY,
                       REGION_CAVITY], dtype=np.int32)
    depth = np.array([0.0, 0.0, 0.0, 1.0])
    weights = np.array([
        [0.2, 0.8],
        [0.9, 0.1],
        [1.0, 0.0],
        [1.0, 0.0],
    ])
    rng = np.random.default_rng(0)
    return HeadModel(
        template_vertices=verts,
        triangles=np.array([[0, 1, 2]], dtype=np.int32),
        uv_coords=np.array([[0.1, 0.1], [0.9, 0.1], [0.5, 0.9], [0.5, 0.5]]),
        uv_triangles=np.array([[0, 1, 2]], dtype=np.int32),
        shape_basis=rng.normal(size=(4, 3, 2)),
        expression_basis=rng.normal(size=(4, 3, 2)),
        pose_corrective_basis=rng.normal(size=(4, 3, 9)),
        joint_regressor=np.full((2, 4), 0.25),
        skinning_weights=weights,
        joint_parents=np.array([-1, 0], dtype=np.int32),
        joint_names=("root", "jaw"),
        region_labels=labels,
        cavity_depth=depth,
    )


def random_cloud(rng, n, width_hint=128):
    """Random degree-0 cloud framed by Camera.front(width_hint, ...)."""
    colors = rng.uniform(0.0, 1.0, size=(n, 3))
    quats = rng.normal(size=(n, 4))
    quats /= np.linalg.norm(quats, axis=1, keepdims=True)
    return GaussianCloud(
        mu=rng.uniform(-0.06, 0.06, size=(n, 3)),
        scale=np.exp(rng.uniform(np.log(5e-4), np.log(8e-3), size=(n, 3))),
        rotation=quats,
        sh=(colors - 0.5) / SH_C0,
        opacity=rng.uniform(0.02, 0.98, size=n),
    )
