"""Binary containers for head models (.aghm) and avatar assets (.agav).

Layout: 8-byte magic, u32 version, u32 JSON length + JSON metadata, then one
chunk per declared blob: u64 payload length, raw little-endian payload, u32
CRC32. Everything is fixed little-endian so files are portable.
"""

from __future__ import annotations

import json
import struct
import zlib
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from ..compose import ActivationConfig, LinearDeformationBasis, \
    LinearDeformationProvider, ZeroDeformationProvider
from ..errors import (AssetError, FileChecksumError, FileFormatError,
                      FileTruncatedError, FileVersionError)
from ..headmodel import HeadModel
from ..uvatlas import AttributeMaps, UvGrid

HEAD_MAGIC = b"AGHMBIN\x00"
ASSET_MAGIC = b"AGAVBIN\x00"
VERSION = 1


def _write_container(path, magic: bytes, metadata: dict, blobs: list) -> None:
    meta = dict(metadata)
    meta["blobs"] = [{"name": name, "dtype": arr.dtype.str, "shape": list(arr.shape)}
                    for name, arr in blobs]
    meta_bytes = json.dumps(meta).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(magic)
        fh.write(struct.pack("<I", VERSION))
        fh.write(struct.pack("<I", len(meta_bytes)))
        fh.write(meta_bytes)
        for _, arr in blobs:
            payload = np.ascontiguousarray(arr).tobytes()
            fh.write(struct.pack("<Q", len(payload)))
            fh.write(payload)
            fh.write(struct.pack("<I", zlib.crc32(payload)))


def _read_exact(fh, n: int, what: str) -> bytes:
    data = fh.read(n)
    if len(data) != n:
        raise FileTruncatedError(f"truncated {what}: wanted {n} bytes, got {len(data)}")
    return data


def _read_container(path, magic: bytes):
    with open(path, "rb") as fh:
        got = _read_exact(fh, 8, "magic")
        if got != magic:
            raise FileFormatError(f"bad magic {got!r}, expected {magic!r}")
        (version,) = struct.unpack("<I", _read_exact(fh, 4, "version"))
        if version != VERSION:
            raise FileVersionError(f"unsupported container version {version}")
        (meta_len,) = struct.unpack("<I", _read_exact(fh, 4, "metadata length"))
        meta = json.loads(_read_exact(fh, meta_len, "metadata").decode("utf-8"))
        blobs = {}
        for spec in meta["blobs"]:
            (nbytes,) = struct.unpack("<Q", _read_exact(fh, 8, "chunk header"))
            payload = _read_exact(fh, nbytes, f"chunk {spec['name']}")
            (crc,) = struct.unpack("<I", _read_exact(fh, 4, "chunk crc"))
            if zlib.crc32(payload) != crc:
                raise FileChecksumError(f"checksum mismatch in chunk {spec['name']}")
            arr = np.frombuffer(payload, dtype=np.dtype(spec["dtype"]))
            blobs[spec["name"]] = arr.reshape(spec["shape"]).copy()
    return meta, blobs


def save_head_model(path, model: HeadModel) -> None:
    metadata = {
        "kind": "head_model",
        "joint_names": list(model.joint_names),
        "region_codes": {"none": 0, "upper_lip": 1, "lower_lip": 2, "cavity": 3},
    }
    blobs = [
        ("template_vertices", model.template_vertices.astype("<f8")),
        ("triangles", model.triangles.astype("<i4")),
        ("uv_coords", model.uv_coords.astype("<f8")),
        ("uv_triangles", model.uv_triangles.astype("<i4")),
        ("shape_basis", model.shape_basis.astype("<f8")),
        ("expression_basis", model.expression_basis.astype("<f8")),
        ("pose_corrective_basis", model.pose_corrective_basis.astype("<f8")),
        ("joint_regressor", model.joint_regressor.astype("<f8")),
        ("skinning_weights", model.skinning_weights.astype("<f8")),
        ("joint_parents", model.joint_parents.astype("<i4")),
        ("region_labels", model.region_labels.astype("<i4")),
        ("cavity_depth", model.cavity_depth.astype("<f8")),
    ]
    _write_container(path, HEAD_MAGIC, metadata, blobs)


def load_head_model(path) -> HeadModel:
    meta, blobs = _read_container(path, HEAD_MAGIC)
    model = HeadModel(
        template_vertices=blobs["template_vertices"],
        triangles=blobs["triangles"],
        uv_coords=blobs["uv_coords"],
        uv_triangles=blobs["uv_triangles"],
        shape_basis=blobs["shape_basis"],
        expression_basis=blobs["expression_basis"],
        pose_corrective_basis=blobs["pose_corrective_basis"],
        joint_regressor=blobs["joint_regressor"],
        skinning_weights=blobs["skinning_weights"],
        joint_parents=blobs["joint_parents"],
        joint_names=tuple(meta["joint_names"]),
        region_labels=blobs["region_labels"],
        cavity_depth=blobs["cavity_depth"],
    )
    model.validate()
    return model


@dataclass(frozen=True)
class AvatarAsset:
    """On-disk binding of a head model, canonical maps and deformation basis."""

    model: HeadModel
    grid: UvGrid
    maps: AttributeMaps
    config: ActivationConfig
    basis: Optional[LinearDeformationBasis]
    metadata: dict

    @property
    def resolution(self) -> int:
        return self.maps.resolution

    @property
    def num_gaussians(self) -> int:
        return self.grid.num_samples

    @property
    def sh_degree(self) -> int:
        return self.maps.sh_degree

    def default_provider(self):
        if self.basis is not None:
            return LinearDeformationProvider(self.basis, self.grid)
        return ZeroDeformationProvider(self.grid.num_samples)

    def check_consistency(self) -> None:
        if self.grid.resolution != self.maps.resolution:
            raise AssetError("grid and map resolutions differ")
        if self.basis is not None and self.basis.resolution != self.maps.resolution:
            raise AssetError("deformation basis resolution differs from maps")


def save_asset(path, asset: AvatarAsset, model_filename: Optional[str] = None) -> None:
    """Write the asset and (by default) its referenced head model alongside."""
    path = Path(path)
    if model_filename is None:
        model_filename = path.stem + ".aghm"
        save_head_model(path.parent / model_filename, asset.model)
    metadata = {
        "kind": "avatar_asset",
        "model_ref": model_filename,
        "resolution": asset.resolution,
        "sh_degree": asset.sh_degree,
        "num_gaussians": asset.num_gaussians,
        "grid_degenerate_skipped": asset.grid.degenerate_skipped,
        "activation": {"gamma_pos": asset.config.gamma_pos,
                       "s_max": asset.config.s_max,
                       "s_init": asset.config.s_init},
        "conventions": dict(asset.metadata.get("conventions",
                                               {"residual_rotation": "left"})),
        "has_basis": asset.basis is not None,
    }
    blobs = [
        ("grid_uv", asset.grid.uv.astype("<f8")),
        ("grid_triangle_id", asset.grid.triangle_id.astype("<i4")),
        ("grid_bary", asset.grid.bary.astype("<f8")),
        ("map_position_offset", asset.maps.position_offset.astype("<f4")),
        ("map_log_scale", asset.maps.log_scale.astype("<f4")),
        ("map_rotation", asset.maps.rotation.astype("<f4")),
        ("map_color", asset.maps.color.astype("<f4")),
        ("map_opacity_logit", asset.maps.opacity_logit.astype("<f4")),
    ]
    if asset.basis is not None:
        blobs += [
            ("basis_position", asset.basis.position.astype("<f4")),
            ("basis_log_scale", asset.basis.log_scale.astype("<f4")),
            ("basis_rotation", asset.basis.rotation.astype("<f4")),
        ]
    _write_container(path, ASSET_MAGIC, metadata, blobs)


def load_asset(path) -> AvatarAsset:
    path = Path(path)
    meta, blobs = _read_container(path, ASSET_MAGIC)
    model = load_head_model(path.parent / meta["model_ref"])
    grid = UvGrid(
        resolution=int(meta["resolution"]),
        uv=blobs["grid_uv"],
        triangle_id=blobs["grid_triangle_id"],
        bary=blobs["grid_bary"],
        degenerate_skipped=int(meta.get("grid_degenerate_skipped", 0)),
    )
    maps = AttributeMaps(
        position_offset=blobs["map_position_offset"],
        log_scale=blobs["map_log_scale"],
        rotation=blobs["map_rotation"],
        color=blobs["map_color"],
        opacity_logit=blobs["map_opacity_logit"],
    )
    basis = None
    if meta.get("has_basis"):
        basis = LinearDeformationBasis(
            position=blobs["basis_position"],
            log_scale=blobs["basis_log_scale"],
            rotation=blobs["basis_rotation"],
        )
    act = meta["activation"]
    asset = AvatarAsset(
        model=model,
        grid=grid,
        maps=maps,
        config=ActivationConfig(gamma_pos=act["gamma_pos"], s_max=act["s_max"],
                                s_init=act["s_init"]),
        basis=basis,
        metadata={"conventions": meta.get("conventions", {}),
                  "model_ref": meta["model_ref"]},
    )
    asset.check_consistency()
    return asset
