from .backend import ACTIVE_BACKEND
from .binning import TILE, bin_splats
from .camera import Camera
from .framebuffer import FrameBuffer
from .project import ProjectedSplats, project
from .reference import blend_pixel, render_reference
from .render import render, render_with_stats
from .sh import eval_sh_colors

__all__ = [
    "ACTIVE_BACKEND", "TILE", "Camera", "FrameBuffer", "ProjectedSplats",
    "bin_splats", "blend_pixel", "eval_sh_colors", "project", "render",
    "render_reference", "render_with_stats",
]
