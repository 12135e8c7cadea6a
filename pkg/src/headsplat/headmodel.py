"""Parametric head model: blendshapes, joint regression and linear blend skinning.

The model follows the usual statistical-head-model layout: a template mesh,
linear shape/expression bases, pose-corrective blendshapes driven by the
flattened (R(theta_k) - I) feature of the non-root joints, a joint regressor
and row-stochastic skinning weights over a small joint tree.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import ModelError, ParameterError

# region label codes
REGION_NONE = 0
REGION_UPPER_LIP = 1
REGION_LOWER_LIP = 2
REGION_CAVITY = 3

REGION_NAMES = {
    REGION_NONE: "none",
    REGION_UPPER_LIP: "upper_lip",
    REGION_LOWER_LIP: "lower_lip",
    REGION_CAVITY: "cavity",
}


@dataclass(frozen=True)
class HeadModel:
    template_vertices: np.ndarray  # (V, 3) float64
    triangles: np.ndarray          # (F, 3) int32
    uv_coords: np.ndarray          # (Vt, 2) float64, inside the unit square
    uv_triangles: np.ndarray       # (F, 3) int32, indices into uv_coords
    shape_basis: np.ndarray        # (V, 3, d_beta)
    expression_basis: np.ndarray   # (V, 3, d_psi)
    pose_corrective_basis: np.ndarray  # (V, 3, 9 * (K - 1))
    joint_regressor: np.ndarray    # (K, V)
    skinning_weights: np.ndarray   # (V, K) row-stochastic
    joint_parents: np.ndarray      # (K,) int32, parent of joint 0 is -1
    joint_names: tuple             # length K, contains at least "root" and "jaw"
    region_labels: np.ndarray      # (V,) int32 codes from REGION_*
    cavity_depth: np.ndarray       # (V,) float64 in [0, 1], 0 outside the cavity

    @property
    def num_vertices(self) -> int:
        return self.template_vertices.shape[0]

    @property
    def num_joints(self) -> int:
        return self.joint_regressor.shape[0]

    @property
    def shape_dim(self) -> int:
        return self.shape_basis.shape[2]

    @property
    def expression_dim(self) -> int:
        return self.expression_basis.shape[2]

    @property
    def jaw_joint(self) -> int:
        return self.joint_names.index("jaw")

    def validate(self) -> None:
        v = self.num_vertices
        k = self.num_joints
        if self.skinning_weights.shape != (v, k):
            raise ModelError("skinning_weights shape mismatch")
        if np.any(self.skinning_weights < -1e-8):
            raise ModelError("negative skinning weight")
        row_sums = self.skinning_weights.sum(axis=1)
        if np.max(np.abs(row_sums - 1.0)) > 1e-5:
            raise ModelError("skinning weight rows must sum to 1")
        if self.joint_parents[0] != -1:
            raise ModelError("joint 0 must be the root")
        for j in range(1, k):
            p = self.joint_parents[j]
            if not 0 <= p < j:
                raise ModelError("joint_parents must be topologically ordered with one root")
        if self.triangles.max(initial=-1) >= v:
            raise ModelError("triangle index out of range")
        if self.uv_triangles.max(initial=-1) >= self.uv_coords.shape[0]:
            raise ModelError("uv triangle index out of range")
        if np.any(self.uv_coords < -1e-9) or np.any(self.uv_coords > 1.0 + 1e-9):
            raise ModelError("uv coordinates must lie in the unit square")
        if self.pose_corrective_basis.shape[2] != 9 * (k - 1):
            raise ModelError("pose corrective basis must have 9*(K-1) columns")


@dataclass(frozen=True)
class ExpressionState:
    shape: np.ndarray       # (d_beta,)
    expression: np.ndarray  # (d_psi,)
    pose: np.ndarray        # (K, 3) axis-angle per joint

    @staticmethod
    def neutral(model: HeadModel) -> "ExpressionState":
        return ExpressionState(
            shape=np.zeros(model.shape_dim),
            expression=np.zeros(model.expression_dim),
            pose=np.zeros((model.num_joints, 3)),
        )

    def check(self, model: HeadModel) -> None:
        if self.shape.shape != (model.shape_dim,):
            raise ParameterError(f"shape parameter must have length {model.shape_dim}")
        if self.expression.shape != (model.expression_dim,):
            raise ParameterError(f"expression parameter must have length {model.expression_dim}")
        if self.pose.shape != (model.num_joints, 3):
            raise ParameterError(f"pose must be ({model.num_joints}, 3) axis-angle vectors")
        if not (np.all(np.isfinite(self.shape)) and np.all(np.isfinite(self.expression))
                and np.all(np.isfinite(self.pose))):
            raise ParameterError("non-finite state parameters")


@dataclass(frozen=True)
class Mesh:
    vertices: np.ndarray   # (V, 3)
    triangles: np.ndarray  # (F, 3), shared with the source model


def rodrigues(axis_angle: np.ndarray) -> np.ndarray:
    """Axis-angle 3-vector to rotation matrix, series fallback near zero."""
    aa = np.asarray(axis_angle, dtype=np.float64)
    angle = float(np.linalg.norm(aa))
    kx, ky, kz = aa
    hat = np.array([[0.0, -kz, ky], [kz, 0.0, -kx], [-ky, kx, 0.0]])
    if angle < 1e-8:
        # sin(a)/a ~ 1, (1-cos(a))/a^2 ~ 1/2 to well below fp precision
        return np.eye(3) + hat + 0.5 * (hat @ hat)
    s = np.sin(angle) / angle
    c = (1.0 - np.cos(angle)) / (angle * angle)
    return np.eye(3) + s * hat + c * (hat @ hat)


def pose_feature(pose: np.ndarray) -> np.ndarray:
    """Flattened (R(theta_k) - I) over the non-root joints."""
    feats = [(rodrigues(pose[k]) - np.eye(3)).ravel() for k in range(1, pose.shape[0])]
    if not feats:
        return np.zeros(0)
    return np.concatenate(feats)


def blend_template(model: HeadModel, state: ExpressionState) -> Mesh:
    """Template plus shape, expression and pose-corrective blendshape offsets."""
    state.check(model)
    verts = (
        model.template_vertices
        + model.shape_basis @ state.shape
        + model.expression_basis @ state.expression
        + model.pose_corrective_basis @ pose_feature(state.pose)
    )
    return Mesh(vertices=verts, triangles=model.triangles)


def joint_locations(model: HeadModel, shaped: Mesh) -> np.ndarray:
    if shaped.vertices.shape[0] != model.num_vertices:
        raise ParameterError("mesh vertex count does not match the model")
    return model.joint_regressor @ shaped.vertices


def _joint_transforms(model: HeadModel, joints: np.ndarray, pose: np.ndarray):
    """World rotation/translation per joint; identity pose gives identity maps."""
    k = model.num_joints
    rots = np.empty((k, 3, 3))
    trans = np.empty((k, 3))
    for j in range(k):
        r_local = rodrigues(pose[j])
        if j == 0:
            rots[0] = r_local
            trans[0] = joints[0] - r_local @ joints[0]
        else:
            p = model.joint_parents[j]
            rots[j] = rots[p] @ r_local
            # pivot the local rotation about this joint's rest location
            pivot = rots[p] @ joints[j] + trans[p]
            trans[j] = pivot - rots[j] @ joints[j]
    return rots, trans


def skin(model: HeadModel, rest: Mesh, joints: np.ndarray, pose: np.ndarray) -> Mesh:
    """Linear blend skinning of the rest mesh by the posed joint tree."""
    if not np.all(np.isfinite(pose)):
        raise ParameterError("non-finite pose")
    rots, trans = _joint_transforms(model, joints, pose)
    per_joint = np.einsum("kij,vj->kvi", rots, rest.vertices) + trans[:, None, :]
    out = np.einsum("vk,kvi->vi", model.skinning_weights, per_joint)
    return Mesh(vertices=out, triangles=rest.triangles)


def articulate(model: HeadModel, state: ExpressionState) -> Mesh:
    """Full articulation: blendshapes, shape-only joint regression, skinning."""
    state.check(model)
    blended = blend_template(model, state)
    shaped = Mesh(
        vertices=model.template_vertices + model.shape_basis @ state.shape,
        triangles=model.triangles,
    )
    joints = joint_locations(model, shaped)
    return skin(model, blended, joints, state.pose)


def derive_mouth_cavity_weights(model: HeadModel) -> HeadModel:
    """Blend lip skinning rows into the mouth cavity.

    A cavity vertex at depth t gets (1 - t/2) of its nearer lip's weight row
    and t/2 of the opposite lip's, reaching an even mix at the cavity apex.
    Shape/expression rows are copied from the nearer lip; pose correctives are
    blended with the same coefficients as the weights.
    """
    labels = model.region_labels
    upper = np.flatnonzero(labels == REGION_UPPER_LIP)
    lower = np.flatnonzero(labels == REGION_LOWER_LIP)
    cavity = np.flatnonzero(labels == REGION_CAVITY)
    if upper.size == 0 or lower.size == 0:
        raise ModelError("lip region labels are required to derive cavity weights")
    if cavity.size == 0:
        return model

    verts = model.template_vertices
    weights = model.skinning_weights.copy()
    expr = model.expression_basis.copy()
    shp = model.shape_basis.copy()
    pose_corr = model.pose_corrective_basis.copy()

    for v in cavity:
        d_up = np.linalg.norm(verts[upper] - verts[v], axis=1)
        d_lo = np.linalg.norm(verts[lower] - verts[v], axis=1)
        u_star = upper[int(np.argmin(d_up))]
        l_star = lower[int(np.argmin(d_lo))]
        if d_up.min() <= d_lo.min():
            near, far = u_star, l_star
        else:
            near, far = l_star, u_star
        t = float(model.cavity_depth[v])
        a, b = 1.0 - 0.5 * t, 0.5 * t
        weights[v] = a * model.skinning_weights[near] + b * model.skinning_weights[far]
        pose_corr[v] = a * model.pose_corrective_basis[near] + b * model.pose_corrective_basis[far]
        expr[v] = model.expression_basis[near]
        shp[v] = model.shape_basis[near]

    return replace(
        model,
        skinning_weights=weights,
        expression_basis=expr,
        shape_basis=shp,
        pose_corrective_basis=pose_corr,
    )
