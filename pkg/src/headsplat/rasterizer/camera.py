"""Pinhole camera with a rigid world-to-camera transform (camera looks down +z)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ParameterError


@dataclass(frozen=True)
class Camera:
    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int
    world_to_camera: np.ndarray  # (4, 4)

    def __post_init__(self):
        if not (self.fx > 0 and self.fy > 0):
            raise ParameterError("focal lengths must be positive")
        if self.width <= 0 or self.height <= 0:
            raise ParameterError("image size must be positive")
        w2c = np.asarray(self.world_to_camera, dtype=np.float64)
        if w2c.shape != (4, 4):
            raise ParameterError("world_to_camera must be 4x4")
        r = w2c[:3, :3]
        if np.max(np.abs(r @ r.T - np.eye(3))) > 1e-5:
            raise ParameterError("world_to_camera rotation block must be orthonormal")
        object.__setattr__(self, "world_to_camera", w2c)

    @property
    def rotation(self) -> np.ndarray:
        return self.world_to_camera[:3, :3]

    @property
    def translation(self) -> np.ndarray:
        return self.world_to_camera[:3, 3]

    @property
    def center(self) -> np.ndarray:
        """Camera position in world coordinates."""
        return -self.rotation.T @ self.translation

    @staticmethod
    def front(width: int, height: int, distance: float = 0.35,
              focal_factor: float = 1.4) -> "Camera":
        """Default head-and-shoulders framing: origin-centered head, face
        toward -z, camera on the +z-forward axis at `distance`."""
        w2c = np.eye(4)
        w2c[2, 3] = distance
        return Camera(fx=focal_factor * width, fy=focal_factor * width,
                      cx=width / 2.0, cy=height / 2.0,
                      width=width, height=height, world_to_camera=w2c)

    @staticmethod
    def look_from(position, fx, fy, cx, cy, width, height,
                  rotation=None) -> "Camera":
        """Axis-aligned camera at `position` (optionally pre-rotated)."""
        r = np.eye(3) if rotation is None else np.asarray(rotation, dtype=np.float64)
        w2c = np.eye(4)
        w2c[:3, :3] = r
        w2c[:3, 3] = -r @ np.asarray(position, dtype=np.float64)
        return Camera(fx=fx, fy=fy, cx=cx, cy=cy,
                      width=width, height=height, world_to_camera=w2c)
