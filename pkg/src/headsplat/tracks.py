"""Parameter track files: JSON lines, one record per frame."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .rasterizer.camera import Camera


class TrackError(ParameterError):
    def __init__(self, line_number: int, message: str):
        super().__init__(f"track line {line_number}: {message}")
        self.line_number = line_number


@dataclass(frozen=True)
class TrackRecord:
    t: float
    psi: np.ndarray
    jaw: np.ndarray
    camera: Camera


def camera_from_dict(obj: dict) -> Camera:
    w2c = np.asarray(obj["w2c"], dtype=np.float64).reshape(4, 4)
    return Camera(fx=float(obj["fx"]), fy=float(obj["fy"]),
                  cx=float(obj["cx"]), cy=float(obj["cy"]),
                  width=int(obj["width"]), height=int(obj["height"]),
                  world_to_camera=w2c)


def camera_to_dict(cam: Camera) -> dict:
    return {"fx": cam.fx, "fy": cam.fy, "cx": cam.cx, "cy": cam.cy,
            "width": cam.width, "height": cam.height,
            "w2c": [float(x) for x in cam.world_to_camera.reshape(-1)]}


def parse_record(obj: dict, line_number: int = 0) -> TrackRecord:
    try:
        return TrackRecord(
            t=float(obj["t"]),
            psi=np.asarray(obj["psi"], dtype=np.float64),
            jaw=np.asarray(obj["jaw"], dtype=np.float64),
            camera=camera_from_dict(obj["camera"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise TrackError(line_number, str(exc)) from exc


def load_track(path) -> list:
    records = []
    with open(path) as fh:
        for i, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise TrackError(i, f"invalid JSON: {exc}") from exc
            if not isinstance(obj, dict):
                raise TrackError(i, "record must be a JSON object")
            records.append(parse_record(obj, i))
    return records


def save_track(path, records) -> None:
    with open(path, "w") as fh:
        for rec in records:
            fh.write(json.dumps({
                "t": rec.t,
                "psi": [float(x) for x in rec.psi],
                "jaw": [float(x) for x in rec.jaw],
                "camera": camera_to_dict(rec.camera),
            }) + "\n")
