"""Live frame service: loads an asset once, streams rendered frames over a
websocket in response to parameter updates.

Control plane is JSON text; frames are binary: a 24-byte little-endian
header (u32 width, u32 height, u64 frame_id, f32 render_ms, u32 reserved)
followed by RGBA8 rows. Parameter bursts are coalesced latest-wins, so a
slow render never builds an unbounded queue.
"""

from __future__ import annotations

import asyncio
import struct
import time

import numpy as np
from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .compose import build_cloud, make_identity_cache
from .errors import HeadSplatError
from .headmodel import ExpressionState
from .rasterizer import Camera, render
from .tracks import camera_from_dict

FRAME_HEADER = struct.Struct("<IIQfI")
DEFAULT_PORT = 8787


def _pack_frame(fb, frame_id: int, render_ms: float) -> bytes:
    header = FRAME_HEADER.pack(fb.width, fb.height, frame_id, render_ms, 0)
    return header + fb.rgba8().tobytes()


class Session:
    """Per-connection state: latest-wins parameters and a frame counter."""

    def __init__(self):
        self.latest = None
        self.dirty = asyncio.Event()
        self.frame_id = 0


def create_app(asset, threads: int = 1) -> FastAPI:
    app = FastAPI()
    cache = make_identity_cache(asset)
    provider = asset.default_provider()
    model = asset.model

    meta = {
        "d_psi": model.expression_dim,
        "resolution": asset.resolution,
        "gaussian_count": asset.num_gaussians,
        "sh_degree": asset.sh_degree,
        "joint_names": list(model.joint_names),
    }

    def render_frame(psi, jaw, camera: Camera):
        pose = np.zeros((model.num_joints, 3))
        pose[model.jaw_joint] = jaw
        state = ExpressionState(shape=np.zeros(model.shape_dim),
                                expression=psi, pose=pose)
        cloud = build_cloud(asset, state, provider=provider, cache=cache)
        return render(cloud, camera, threads=threads)

    def parse_params(message: dict):
        if message.get("type") != "params":
            raise ValueError(f"unknown message type {message.get('type')!r}")
        psi = np.asarray(message.get("psi", []), dtype=np.float64)
        if psi.shape != (model.expression_dim,):
            raise ValueError(f"psi must have length {model.expression_dim}")
        jaw = np.asarray(message.get("jaw", [0.0, 0.0, 0.0]), dtype=np.float64)
        if jaw.shape != (3,):
            raise ValueError("jaw must have length 3")
        if "camera" in message:
            camera = camera_from_dict(message["camera"])
        else:
            camera = Camera.front(512, 512)
        return psi, jaw, camera

    @app.get("/health")
    def health():
        return {"status": "ok", "asset": meta}

    @app.get("/asset")
    def asset_meta():
        return meta

    @app.websocket("/stream")
    async def stream(ws: WebSocket):
        await ws.accept()
        session = Session()
        loop = asyncio.get_running_loop()

        async def renderer():
            while True:
                await session.dirty.wait()
                session.dirty.clear()
                psi, jaw, camera = session.latest
                t0 = time.perf_counter()
                fb = await loop.run_in_executor(None, render_frame, psi, jaw,
                                                camera)
                render_ms = (time.perf_counter() - t0) * 1e3
                session.frame_id += 1
                await ws.send_bytes(_pack_frame(fb, session.frame_id, render_ms))

        render_task = asyncio.create_task(renderer())
        try:
            while True:
                message = await ws.receive_json()
                try:
                    session.latest = parse_params(message)
                except (ValueError, KeyError, TypeError, HeadSplatError) as exc:
                    await ws.send_json({"type": "error", "message": str(exc)})
                    continue
                session.dirty.set()
        except WebSocketDisconnect:
            pass
        finally:
            render_task.cancel()

    return app
