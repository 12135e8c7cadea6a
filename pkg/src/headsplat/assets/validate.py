"""Structural validation of loaded assets: every type invariant, reported
as entries rather than exceptions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .container import AvatarAsset


@dataclass(frozen=True)
class Violation:
    check: str
    message: str


def validate_asset(asset: AvatarAsset) -> list:
    violations: list[Violation] = []

    def fail(check, message):
        violations.append(Violation(check=check, message=message))

    model = asset.model
    rows = model.skinning_weights.sum(axis=1)
    if np.max(np.abs(rows - 1.0)) > 1e-5:
        fail("skinning_weights.stochastic", "weight rows do not sum to 1")
    if np.any(model.skinning_weights < -1e-8):
        fail("skinning_weights.nonnegative", "negative skinning weight")
    if model.joint_parents[0] != -1 or np.any(
            model.joint_parents[1:] >= np.arange(1, model.num_joints)):
        fail("joint_parents.tree", "joint parents are not a rooted tree")
    if model.triangles.max(initial=-1) >= model.num_vertices:
        fail("triangles.range", "triangle index out of range")
    if np.any(model.uv_coords < -1e-9) or np.any(model.uv_coords > 1 + 1e-9):
        fail("uv_coords.range", "uv coordinates outside the unit square")

    if not asset.config.s_init > asset.config.s_max:
        fail("activation.ordering", "s_init must exceed s_max")
    if not asset.config.gamma_pos > 0:
        fail("activation.gamma_pos", "gamma_pos must be positive")

    if asset.grid.resolution != asset.maps.resolution:
        fail("resolution.grid_vs_maps", "grid and maps disagree on resolution")
    if asset.basis is not None and asset.basis.resolution != asset.maps.resolution:
        fail("resolution.basis", "deformation basis resolution mismatch")

    for name in ("position_offset", "log_scale", "rotation", "color",
                 "opacity_logit"):
        plane = getattr(asset.maps, name)
        if not np.all(np.isfinite(plane)):
            fail(f"finite.map.{name}", f"non-finite values in {name} plane")
    if asset.basis is not None:
        for name in ("position", "log_scale", "rotation"):
            plane = getattr(asset.basis, name)
            if not np.all(np.isfinite(plane)):
                fail(f"finite.basis.{name}", f"non-finite values in basis {name}")

    grid = asset.grid
    if grid.num_samples > grid.resolution ** 2:
        fail("grid.count", "more samples than texels")
    if grid.num_samples and (np.max(np.abs(grid.bary.sum(axis=1) - 1.0)) > 1e-6
                             or np.any(grid.bary < -1e-9)):
        fail("grid.barycentric", "barycentric rows are not convex weights")
    if grid.num_samples and grid.triangle_id.max() >= model.triangles.shape[0]:
        fail("grid.triangle_range", "grid references a missing triangle")

    return violations
