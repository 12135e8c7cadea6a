"""CPU-first animatable head-avatar runtime.

Articulates a parametric head model, lifts UV-plane Gaussian attributes onto
the surface, composes per-frame residuals and splats the result with a
tile-based software rasterizer.
"""

from .compose import (ActivationConfig, GaussianCloud, IdentityCache,
                      LinearDeformationBasis, LinearDeformationProvider,
                      ResidualAttributes, ZeroDeformationProvider, build_cloud,
                      make_identity_cache)
from .headmodel import ExpressionState, HeadModel, Mesh, articulate
from .rasterizer import ACTIVE_BACKEND, Camera, FrameBuffer, render, render_reference
from .uvatlas import AttributeMaps, UvGrid, build_uv_grid, grid_sample

__version__ = "0.1.0"

__all__ = [
    "ACTIVE_BACKEND", "ActivationConfig", "AttributeMaps", "Camera",
    "ExpressionState", "FrameBuffer", "GaussianCloud", "HeadModel",
    "IdentityCache", "LinearDeformationBasis", "LinearDeformationProvider",
    "Mesh", "ResidualAttributes", "UvGrid", "ZeroDeformationProvider",
    "articulate", "build_cloud", "build_uv_grid", "grid_sample",
    "make_identity_cache", "render", "render_reference", "__version__",
]
