"""EWA-style projection of 3D Gaussians to screen-space splats."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..compose import GaussianCloud
from .camera import Camera
from .sh import eval_sh_colors

NEAR_PLANE = 0.01
DILATION = 0.3          # px^2 added to the projected covariance diagonal
ALPHA_CEIL = 0.99
SKIP_ALPHA = 1.0 / 255.0


@dataclass(frozen=True)
class ProjectedSplats:
    """Surviving splats in one packed float32 block plus named views.

    `packed` columns: mean x, mean y, conic a, b, c, r, g, b, alpha, radius.
    Keeping them interleaved makes the per-fragment gather a single indexed
    copy and keeps each fragment's data on one cache line in the kernel.
    """

    packed: np.ndarray  # (M, 10) float32
    depth: np.ndarray   # (M,) camera-space z
    source_index: np.ndarray  # (M,) index into the input cloud
    culled_near: int = 0
    culled_offscreen: int = 0

    @property
    def count(self) -> int:
        return self.packed.shape[0]

    @property
    def mean2d(self) -> np.ndarray:
        return self.packed[:, 0:2]

    @property
    def conic(self) -> np.ndarray:
        return self.packed[:, 2:5]

    @property
    def rgb(self) -> np.ndarray:
        return self.packed[:, 5:8]

    @property
    def alpha(self) -> np.ndarray:
        return self.packed[:, 8]

    @property
    def radius(self) -> np.ndarray:
        return self.packed[:, 9]


def quat_to_rotmats(q: np.ndarray) -> np.ndarray:
    """Unit (w, x, y, z) quaternion rows to rotation matrices, (N, 3, 3)."""
    w, x, y, z = q[:, 0], q[:, 1], q[:, 2], q[:, 3]
    out = np.empty((q.shape[0], 3, 3))
    out[:, 0, 0] = 1 - 2 * (y * y + z * z)
    out[:, 0, 1] = 2 * (x * y - w * z)
    out[:, 0, 2] = 2 * (x * z + w * y)
    out[:, 1, 0] = 2 * (x * y + w * z)
    out[:, 1, 1] = 1 - 2 * (x * x + z * z)
    out[:, 1, 2] = 2 * (y * z - w * x)
    out[:, 2, 0] = 2 * (x * z - w * y)
    out[:, 2, 1] = 2 * (y * z + w * x)
    out[:, 2, 2] = 1 - 2 * (x * x + y * y)
    return out


def project(cloud: GaussianCloud, cam: Camera) -> ProjectedSplats:
    """Project the cloud, cull near-plane and far-offscreen splats.

    The binning radius covers every pixel where the modulated opacity can
    reach the 1/255 blending threshold (at least 3 sigma), so the tiled
    renderer sees every fragment the brute-force reference would blend.
    """
    n = cloud.count
    if n == 0:
        return ProjectedSplats(packed=np.zeros((0, 10), dtype=np.float32),
                               depth=np.zeros(0, dtype=np.float32),
                               source_index=np.zeros(0, dtype=np.int64))

    r_wc = cam.rotation
    t_wc = cam.translation
    p_cam = cloud.mu @ r_wc.T + t_wc

    in_front = p_cam[:, 2] > NEAR_PLANE
    culled_near = int(n - in_front.sum())

    tx, ty, tz = p_cam[:, 0], p_cam[:, 1], p_cam[:, 2]
    tz_safe = np.where(in_front, tz, 1.0)
    px = cam.fx * tx / tz_safe + cam.cx
    py = cam.fy * ty / tz_safe + cam.cy

    # camera-space covariance via its factor A = R_wc R(q) diag(s); only the
    # six unique entries are formed, as sums over A's scaled columns
    rot = quat_to_rotmats(cloud.rotation)
    am = np.matmul(r_wc[None, :, :], rot)
    s2 = cloud.scale * cloud.scale
    c00 = s2[:, 0] * am[:, 0, 0] ** 2 + s2[:, 1] * am[:, 0, 1] ** 2 + s2[:, 2] * am[:, 0, 2] ** 2
    c11 = s2[:, 0] * am[:, 1, 0] ** 2 + s2[:, 1] * am[:, 1, 1] ** 2 + s2[:, 2] * am[:, 1, 2] ** 2
    c22 = s2[:, 0] * am[:, 2, 0] ** 2 + s2[:, 1] * am[:, 2, 1] ** 2 + s2[:, 2] * am[:, 2, 2] ** 2
    c01 = (s2[:, 0] * am[:, 0, 0] * am[:, 1, 0] + s2[:, 1] * am[:, 0, 1] * am[:, 1, 1]
           + s2[:, 2] * am[:, 0, 2] * am[:, 1, 2])
    c02 = (s2[:, 0] * am[:, 0, 0] * am[:, 2, 0] + s2[:, 1] * am[:, 0, 1] * am[:, 2, 1]
           + s2[:, 2] * am[:, 0, 2] * am[:, 2, 2])
    c12 = (s2[:, 0] * am[:, 1, 0] * am[:, 2, 0] + s2[:, 1] * am[:, 1, 1] * am[:, 2, 1]
           + s2[:, 2] * am[:, 1, 2] * am[:, 2, 2])

    # perspective Jacobian rows are (j00, 0, j02) and (0, j11, j12), so the
    # projected covariance has a short closed form
    inv_z = 1.0 / tz_safe
    inv_z2 = inv_z * inv_z
    j00 = cam.fx * inv_z
    j02 = -cam.fx * tx * inv_z2
    j11 = cam.fy * inv_z
    j12 = -cam.fy * ty * inv_z2
    a = j00 * j00 * c00 + 2.0 * j00 * j02 * c02 + j02 * j02 * c22 + DILATION
    b = j00 * j11 * c01 + j00 * j12 * c02 + j02 * j11 * c12 + j02 * j12 * c22
    c = j11 * j11 * c11 + 2.0 * j11 * j12 * c12 + j12 * j12 * c22 + DILATION
    det = a * c - b * b
    valid = in_front & (det > 0)
    det_safe = np.where(valid, det, 1.0)

    # largest 2D standard deviation and the opacity-aware extent
    mid = 0.5 * (a + c)
    lam_max = mid + np.sqrt(np.maximum(mid * mid - det_safe, 0.0))
    sigma = np.sqrt(np.maximum(lam_max, 0.0))
    alpha = np.minimum(cloud.opacity, ALPHA_CEIL)
    reach = np.sqrt(np.maximum(2.0 * np.log(np.maximum(alpha, SKIP_ALPHA) / SKIP_ALPHA), 0.0))
    radius = sigma * np.maximum(3.0, reach) + 0.3

    on_screen = ((px + radius > 0) & (px - radius < cam.width)
                 & (py + radius > 0) & (py - radius < cam.height))
    keep = valid & on_screen
    culled_offscreen = int(valid.sum() - (valid & on_screen).sum())

    idx = np.flatnonzero(keep)
    if cloud.sh.shape[1] == 1:
        # band-0 colors are view independent; skip the direction math
        directions = np.zeros((idx.size, 3))
    else:
        directions = cloud.mu[idx] - cam.center
        norms = np.linalg.norm(directions, axis=1, keepdims=True)
        directions = directions / np.where(norms < 1e-12, 1.0, norms)
    rgb = eval_sh_colors(cloud.sh[idx], directions)

    packed = np.empty((idx.size, 10), dtype=np.float32)
    inv_det = 1.0 / det_safe[idx]
    packed[:, 0] = px[idx]
    packed[:, 1] = py[idx]
    packed[:, 2] = c[idx] * inv_det
    packed[:, 3] = -b[idx] * inv_det
    packed[:, 4] = a[idx] * inv_det
    packed[:, 5:8] = rgb
    packed[:, 8] = alpha[idx]
    packed[:, 9] = radius[idx]
    return ProjectedSplats(
        packed=packed,
        depth=tz[idx].astype(np.float32),
        source_index=idx,
        culled_near=culled_near,
        culled_offscreen=culled_offscreen,
    )
