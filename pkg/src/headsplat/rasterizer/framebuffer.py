"""Float RGBA accumulation buffer with PNG / raw export."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from PIL import Image


@dataclass(frozen=True)
class FrameBuffer:
    rgba: np.ndarray        # (H, W, 4) float32
    background: np.ndarray  # (3,) float32

    @property
    def width(self) -> int:
        return self.rgba.shape[1]

    @property
    def height(self) -> int:
        return self.rgba.shape[0]

    def rgba8(self) -> np.ndarray:
        """Quantize to 8 bits, round half to even at encode time only."""
        return np.clip(np.rint(self.rgba * 255.0), 0, 255).astype(np.uint8)

    def save_png(self, path) -> None:
        Image.fromarray(self.rgba8(), mode="RGBA").save(path)

    def save_raw(self, path) -> None:
        """Planar float32 dump, little-endian, channel-major (4, H, W)."""
        planar = np.ascontiguousarray(self.rgba.transpose(2, 0, 1))
        planar.astype("<f4").tofile(path)
