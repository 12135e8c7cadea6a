"""Real spherical harmonics color evaluation, degrees 0..3.

Coefficient layout per Gaussian: coefficient-major rgb triplets,
[c0_r, c0_g, c0_b, c1_r, ...].
"""

from __future__ import annotations

import numpy as np

SH_C0 = 0.28209479177387814
SH_C1 = 0.4886025119029199
SH_C2 = (1.0925484305920792, -1.0925484305920792, 0.31539156525252005,
         -1.0925484305920792, 0.5462742152960396)
SH_C3 = (-0.5900435899266435, 2.890611442640554, -0.4570457994644658,
         0.3731763325901154, -0.4570457994644658, 1.445305721320277,
         -0.5900435899266435)


def eval_sh_colors(sh: np.ndarray, directions: np.ndarray) -> np.ndarray:
    """Evaluate per-Gaussian SH along unit view directions; returns (N, 3).

    Uses the usual splatting convention of adding 0.5 after the SH sum and
    clamping negatives to zero.
    """
    n = sh.shape[0]
    num_coeffs = sh.shape[1] // 3
    degree = int(round(np.sqrt(num_coeffs))) - 1
    coeffs = sh.reshape(n, num_coeffs, 3)

    result = SH_C0 * coeffs[:, 0]
    if degree >= 1:
        x, y, z = directions[:, 0:1], directions[:, 1:2], directions[:, 2:3]
        result = result - SH_C1 * y * coeffs[:, 1] + SH_C1 * z * coeffs[:, 2] \
            - SH_C1 * x * coeffs[:, 3]
    if degree >= 2:
        xx, yy, zz = x * x, y * y, z * z
        xy, yz, xz = x * y, y * z, x * z
        result = (result
                  + SH_C2[0] * xy * coeffs[:, 4]
                  + SH_C2[1] * yz * coeffs[:, 5]
                  + SH_C2[2] * (2.0 * zz - xx - yy) * coeffs[:, 6]
                  + SH_C2[3] * xz * coeffs[:, 7]
                  + SH_C2[4] * (xx - yy) * coeffs[:, 8])
    if degree >= 3:
        result = (result
                  + SH_C3[0] * y * (3.0 * xx - yy) * coeffs[:, 9]
                  + SH_C3[1] * xy * z * coeffs[:, 10]
                  + SH_C3[2] * y * (4.0 * zz - xx - yy) * coeffs[:, 11]
                  + SH_C3[3] * z * (2.0 * zz - 3.0 * xx - 3.0 * yy) * coeffs[:, 12]
                  + SH_C3[4] * x * (4.0 * zz - xx - yy) * coeffs[:, 13]
                  + SH_C3[5] * z * (xx - yy) * coeffs[:, 14]
                  + SH_C3[6] * x * (xx - 3.0 * yy) * coeffs[:, 15])
    return np.clip(result + 0.5, 0.0, 1.0)
