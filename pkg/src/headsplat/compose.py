"""Activations, residual composition and lifting into a renderable cloud."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Protocol

import numpy as np

from .errors import ConfigError, ParameterError
from .headmodel import ExpressionState, articulate
from .uvatlas import UvGrid, grid_sample, sample_attribute_maps, surface_interpolate


@dataclass(frozen=True)
class ActivationConfig:
    gamma_pos: float = 0.05  # max position deviation, model units
    s_max: float = 1.0       # max scale is e^{-s_max}
    s_init: float = 5.0      # scale at zero raw input is e^{-s_init}

    def __post_init__(self):
        if not self.gamma_pos > 0:
            raise ConfigError("gamma_pos must be positive")
        if not self.s_init > self.s_max:
            raise ConfigError("s_init must exceed s_max")


@dataclass(frozen=True)
class ResidualAttributes:
    d_mu: np.ndarray         # (N, 3) added after the canonical tanh
    d_log_scale: np.ndarray  # (N, 3)
    d_rot: np.ndarray        # (N, 4) raw, biased by +(1,0,0,0) before normalize

    @property
    def count(self) -> int:
        return self.d_mu.shape[0]

    @staticmethod
    def zeros(n: int) -> "ResidualAttributes":
        return ResidualAttributes(
            d_mu=np.zeros((n, 3)),
            d_log_scale=np.zeros((n, 3)),
            d_rot=np.zeros((n, 4)),
        )


@dataclass(frozen=True)
class GaussianCloud:
    mu: np.ndarray        # (N, 3) world positions
    scale: np.ndarray     # (N, 3) in (0, e^{-s_max}]
    rotation: np.ndarray  # (N, 4) unit quaternions (w, x, y, z)
    sh: np.ndarray        # (N, 3 * (L + 1)**2), coefficient-major rgb triplets
    opacity: np.ndarray   # (N,) in (0, 1)

    @property
    def count(self) -> int:
        return self.mu.shape[0]

    @property
    def sh_degree(self) -> int:
        return int(round(np.sqrt(self.sh.shape[1] // 3))) - 1


class DeformationProvider(Protocol):
    """Per-frame residuals at the UV grid samples for a fixed identity."""

    def residuals(self, psi: np.ndarray, jaw: np.ndarray) -> ResidualAttributes: ...


class ZeroDeformationProvider:
    def __init__(self, num_samples: int):
        self._n = num_samples

    def residuals(self, psi, jaw) -> ResidualAttributes:
        return ResidualAttributes.zeros(self._n)


@dataclass(frozen=True)
class LinearDeformationBasis:
    """One residual plane stack per driver dimension (psi then jaw axis-angle)."""

    position: np.ndarray   # (D, R, R, 3)
    log_scale: np.ndarray  # (D, R, R, 3)
    rotation: np.ndarray   # (D, R, R, 4)

    @property
    def driver_dim(self) -> int:
        return self.position.shape[0]

    @property
    def resolution(self) -> int:
        return self.position.shape[1]


def softplus(x):
    # max(x, 0) + log1p(e^{-|x|}) is the overflow-safe form
    x = np.asarray(x)
    return np.maximum(x, 0.0) + np.log1p(np.exp(-np.abs(x)))


def inv_softplus(y):
    # inverse of log(1 + e^x); valid for y > 0
    return y + np.log(-np.expm1(-y))


# tanh rounds to exactly 1.0 for |x| above ~19; clipping one ulp below keeps
# gamma * tanh strictly inside (-gamma, gamma) for every input
_TANH_CEIL = 1.0 - 2.0 ** -52


def activate_position(raw: np.ndarray, cfg: ActivationConfig) -> np.ndarray:
    return cfg.gamma_pos * np.clip(np.tanh(raw), -_TANH_CEIL, _TANH_CEIL)


def activate_scale(raw_log: np.ndarray, cfg: ActivationConfig) -> np.ndarray:
    """Bounded exponential: sup e^{-s_max}, value e^{-s_init} at zero input.

    The floor keeps extreme inputs from underflowing to exactly zero, so the
    output stays strictly positive for every raw value.
    """
    c0 = inv_softplus(cfg.s_init - cfg.s_max)
    out = np.exp(-(cfg.s_max + softplus(raw_log + c0)))
    return np.maximum(out, np.finfo(np.float64).tiny)


def activate_opacity(raw: np.ndarray) -> np.ndarray:
    # overflow-free logistic via tanh
    sig = 0.5 * (1.0 + np.tanh(0.5 * np.asarray(raw)))
    return np.clip(sig, 1e-4, 1.0 - 1e-4)


def activate_rotation(raw: np.ndarray) -> np.ndarray:
    """Row-normalize quaternions; near-zero rows become the identity."""
    norm = np.sqrt(np.einsum("ij,ij->i", raw, raw))
    small = norm < 1e-8
    out = raw / np.where(small, 1.0, norm)[:, None]
    if small.any():
        out[small] = (1.0, 0.0, 0.0, 0.0)
    return out


def quat_multiply(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Hamilton product of (w, x, y, z) quaternion rows."""
    aw, ax, ay, az = a[:, 0], a[:, 1], a[:, 2], a[:, 3]
    bw, bx, by, bz = b[:, 0], b[:, 1], b[:, 2], b[:, 3]
    return np.stack([
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    ], axis=1)


@dataclass(frozen=True)
class ComposedAttributes:
    """Pre-lift attributes after residual composition."""

    offset: np.ndarray    # (N, 3) bounded canonical offset plus raw residual
    scale: np.ndarray     # (N, 3) activated
    rotation: np.ndarray  # (N, 4) unit
    color_raw: np.ndarray
    opacity_raw: np.ndarray


def _compose_core(act_pos, q_can, log_scale, canonical: dict,
                  residuals: ResidualAttributes,
                  cfg: ActivationConfig) -> ComposedAttributes:
    """Shared composition body over pre-activated canonical pieces."""
    if residuals.count != act_pos.shape[0]:
        raise ParameterError("residual count does not match the grid")
    offset = act_pos + residuals.d_mu
    scale = activate_scale(log_scale + residuals.d_log_scale, cfg)
    q_res = activate_rotation(residuals.d_rot + np.array([1.0, 0.0, 0.0, 0.0]))
    rotation = activate_rotation(quat_multiply(q_res, q_can))
    return ComposedAttributes(
        offset=offset,
        scale=scale,
        rotation=rotation,
        color_raw=canonical["color"],
        opacity_raw=canonical["opacity_logit"][:, 0],
    )


def compose(canonical: dict, residuals: ResidualAttributes,
            cfg: ActivationConfig) -> ComposedAttributes:
    """Compose canonical sampled rows with residuals.

    Means: post-activation summation. Log-scales: summed before the bounded
    exponential. Rotations: residual quaternion applied as the left factor.
    Color and opacity pass through untouched.
    """
    act_pos = activate_position(canonical["position_offset"], cfg)
    q_can = activate_rotation(canonical["rotation"])
    return _compose_core(act_pos, q_can, canonical["log_scale"], canonical,
                         residuals, cfg)


def eval_linear_deformation(basis: LinearDeformationBasis, grid: UvGrid,
                            psi: np.ndarray, jaw: np.ndarray) -> ResidualAttributes:
    """Combine basis planes by the driver vector, then sample at the grid."""
    driver = np.concatenate([np.asarray(psi, dtype=np.float64),
                             np.asarray(jaw, dtype=np.float64)])
    if driver.shape[0] != basis.driver_dim:
        raise ParameterError(
            f"driver dimension {driver.shape[0]} != basis {basis.driver_dim}")
    pos_plane = np.tensordot(driver, basis.position, axes=1)
    scl_plane = np.tensordot(driver, basis.log_scale, axes=1)
    rot_plane = np.tensordot(driver, basis.rotation, axes=1)
    return ResidualAttributes(
        d_mu=grid_sample(pos_plane, grid.uv),
        d_log_scale=grid_sample(scl_plane, grid.uv),
        d_rot=grid_sample(rot_plane, grid.uv),
    )


class LinearDeformationProvider:
    """Grid-sampled linear basis with the sampling hoisted out of the frame loop.

    Bilinear sampling commutes with the linear combination over drivers, so
    the basis is sampled once at construction and per-frame evaluation is a
    single small matrix product.
    """

    def __init__(self, basis: LinearDeformationBasis, grid: UvGrid):
        d = basis.driver_dim
        n = grid.num_samples
        self._basis = basis
        cols = []
        for planes in (basis.position, basis.log_scale, basis.rotation):
            sampled = np.stack([grid_sample(planes[k], grid.uv) for k in range(d)])
            cols.append(sampled.reshape(d, -1))
        self._split = (3 * n, 6 * n)
        self._mat = np.concatenate(cols, axis=1)  # (D, N * 10)
        self._n = n

    @property
    def driver_dim(self) -> int:
        return self._basis.driver_dim

    def residuals(self, psi, jaw) -> ResidualAttributes:
        driver = np.concatenate([np.asarray(psi, dtype=np.float64),
                                 np.asarray(jaw, dtype=np.float64)])
        if driver.shape[0] != self._mat.shape[0]:
            raise ParameterError("driver dimension mismatch")
        flat = driver @ self._mat
        a, b = self._split
        n = self._n
        return ResidualAttributes(
            d_mu=flat[:a].reshape(n, 3),
            d_log_scale=flat[a:b].reshape(n, 3),
            d_rot=flat[b:].reshape(n, 4),
        )


def lift(base_positions: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    if base_positions.shape != offsets.shape:
        raise ParameterError("base/offset shape mismatch")
    return base_positions + offsets


@dataclass(frozen=True)
class IdentityCache:
    """Everything expression-independent: grid, sampled canonical rows, and
    the activations that do not depend on the residuals."""

    grid: UvGrid
    canonical: dict          # sampled raw channel groups at the grid
    color: np.ndarray        # activated (raw, SH coefficients)
    opacity: np.ndarray      # activated
    act_pos: np.ndarray      # bounded canonical position offsets
    q_can: np.ndarray        # normalized canonical rotations

    def composed(self, residuals: ResidualAttributes,
                 cfg: ActivationConfig) -> ComposedAttributes:
        """Same operations as compose(), minus the redundant re-activation."""
        return _compose_core(self.act_pos, self.q_can,
                             self.canonical["log_scale"], self.canonical,
                             residuals, cfg)


def make_identity_cache(asset) -> IdentityCache:
    canonical = sample_attribute_maps(asset.maps, asset.grid.uv)
    return IdentityCache(
        grid=asset.grid,
        canonical=canonical,
        color=canonical["color"],
        opacity=activate_opacity(canonical["opacity_logit"][:, 0]),
        act_pos=activate_position(canonical["position_offset"], asset.config),
        q_can=activate_rotation(canonical["rotation"]),
    )


def build_cloud(asset, state: ExpressionState,
                provider: Optional[DeformationProvider] = None,
                cache: Optional[IdentityCache] = None) -> GaussianCloud:
    """Full per-frame path: articulate, interpolate, compose, lift."""
    if cache is None:
        cache = make_identity_cache(asset)
    if provider is None:
        provider = asset.default_provider()
    mesh = articulate(asset.model, state)
    base = surface_interpolate(mesh, cache.grid)
    jaw = state.pose[asset.model.jaw_joint]
    residuals = provider.residuals(state.expression, jaw)
    composed = cache.composed(residuals, asset.config)
    return GaussianCloud(
        mu=lift(base, composed.offset),
        scale=composed.scale,
        rotation=composed.rotation,
        sh=cache.color,
        opacity=cache.opacity,
    )
