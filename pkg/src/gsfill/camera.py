"""Pinhole cameras and pose file loaders (COLMAP text and JSON sidecar).

Pose convention: ``world_to_camera`` is a 4x4 rigid transform taking world
points into camera space (z forward). Quaternions are (w, x, y, z) and encode
the world-to-camera rotation directly, matching the COLMAP convention.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidArgument, SchemaError, UnsupportedModel


def quat_to_rotmat(q: np.ndarray) -> np.ndarray:
    """(w, x, y, z) unit quaternion to 3x3 rotation matrix."""
    w, x, y, z = np.asarray(q, dtype=np.float64) / np.linalg.norm(q)
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


@dataclass
class CameraPose:
    """Pinhole intrinsics plus world-to-camera rigid transform."""

    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int
    world_to_camera: np.ndarray = field(
        default_factory=lambda: np.eye(4, dtype=np.float64)
    )
    name: str = ""

    def __post_init__(self):
        self.world_to_camera = np.asarray(self.world_to_camera, dtype=np.float64)
        if self.fx <= 0 or self.fy <= 0:
            raise InvalidArgument(f"focal lengths must be positive, got {self.fx}, {self.fy}")
        if not (0 <= self.cx < self.width and 0 <= self.cy < self.height):
            raise InvalidArgument(
                f"principal point ({self.cx}, {self.cy}) outside "
                f"{self.width}x{self.height} image"
            )
        r = self.world_to_camera[:3, :3]
        if np.abs(r @ r.T - np.eye(3)).max() > 1e-6:
            raise InvalidArgument("world_to_camera rotation block is not orthonormal")

    @property
    def rotation(self) -> np.ndarray:
        return self.world_to_camera[:3, :3]

    @property
    def translation(self) -> np.ndarray:
        return self.world_to_camera[:3, 3]

    @property
    def camera_center(self) -> np.ndarray:
        """Camera origin in world coordinates."""
        return -self.rotation.T @ self.translation

    def to_camera(self, points: np.ndarray) -> np.ndarray:
        """World points (N, 3) to camera space."""
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        return pts @ self.rotation.T + self.translation

    def project(self, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Project world points; returns pixel coords (N, 2) and camera-space depth (N,).

        Integer pixel coordinates address pixel centers. Points behind the
        camera produce negative depth; callers decide how to cull.
        """
        cam = self.to_camera(points)
        z = cam[:, 2]
        safe_z = np.where(z == 0.0, 1.0, z)
        u = self.fx * cam[:, 0] / safe_z + self.cx
        v = self.fy * cam[:, 1] / safe_z + self.cy
        return np.stack([u, v], axis=1), z


def load_cameras(path: str | Path, format: str | None = None) -> list[CameraPose]:
    """Load camera poses from COLMAP sparse text or the JSON sidecar schema.

    ``format`` is one of ``"colmap-text"`` (path is the directory holding
    ``cameras.txt``/``images.txt``) or ``"json"``; when omitted it is inferred
    from the path.
    """
    path = Path(path)
    if format is None:
        format = "json" if path.suffix.lower() == ".json" else "colmap-text"
    if format == "json":
        return _load_cameras_json(path)
    if format == "colmap-text":
        return _load_cameras_colmap(path)
    raise InvalidArgument(f"unknown camera format {format!r}")


def _load_cameras_json(path: Path) -> list[CameraPose]:
    records = json.loads(path.read_text())
    if isinstance(records, dict):
        records = records.get("cameras", [])
    poses = []
    for i, rec in enumerate(records):
        try:
            qvec = np.asarray(rec["qvec"], dtype=np.float64)
            tvec = np.asarray(rec["tvec"], dtype=np.float64)
            w2c = np.eye(4)
            w2c[:3, :3] = quat_to_rotmat(qvec)
            w2c[:3, 3] = tvec
            poses.append(
                CameraPose(
                    fx=float(rec["fx"]),
                    fy=float(rec["fy"]),
                    cx=float(rec["cx"]),
                    cy=float(rec["cy"]),
                    width=int(rec["width"]),
                    height=int(rec["height"]),
                    world_to_camera=w2c,
                    name=str(rec.get("name", i)),
                )
            )
        except KeyError as e:
            raise SchemaError(f"camera record {i} missing key {e}") from e
    return poses


def save_cameras_json(poses: list[CameraPose], path: str | Path) -> None:
    """Write poses in the JSON sidecar schema (inverse of the json loader)."""
    records = []
    for p in poses:
        r = p.rotation
        # rotation matrix -> (w, x, y, z), stable branch selection
        tr = np.trace(r)
        if tr > 0:
            s = np.sqrt(tr + 1.0) * 2
            q = [0.25 * s, (r[2, 1] - r[1, 2]) / s, (r[0, 2] - r[2, 0]) / s, (r[1, 0] - r[0, 1]) / s]
        else:
            i = int(np.argmax(np.diag(r)))
            j, k = (i + 1) % 3, (i + 2) % 3
            s = np.sqrt(max(r[i, i] - r[j, j] - r[k, k] + 1.0, 0.0)) * 2
            q = [0.0, 0.0, 0.0, 0.0]
            q[0] = (r[k, j] - r[j, k]) / s
            q[i + 1] = 0.25 * s
            q[j + 1] = (r[j, i] + r[i, j]) / s
            q[k + 1] = (r[k, i] + r[i, k]) / s
        records.append(
            {
                "fx": p.fx, "fy": p.fy, "cx": p.cx, "cy": p.cy,
                "width": p.width, "height": p.height,
                "qvec": list(map(float, q)),
                "tvec": list(map(float, p.translation)),
                "name": p.name,
            }
        )
    Path(path).write_text(json.dumps(records, indent=2))


_PINHOLE_MODELS = {"PINHOLE", "SIMPLE_PINHOLE"}


def _load_cameras_colmap(path: Path) -> list[CameraPose]:
    cam_file = path / "cameras.txt" if path.is_dir() else path
    img_file = cam_file.parent / "images.txt"
    intrinsics: dict[int, dict] = {}
    for line in cam_file.read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        elems = line.split()
        cam_id, model = int(elems[0]), elems[1]
        width, height = int(elems[2]), int(elems[3])
        params = list(map(float, elems[4:]))
        if model == "PINHOLE":
            fx, fy, cx, cy = params[:4]
        elif model == "SIMPLE_PINHOLE":
            fx = fy = params[0]
            cx, cy = params[1], params[2]
        else:
            raise UnsupportedModel(f"camera model {model!r} not supported")
        intrinsics[cam_id] = dict(fx=fx, fy=fy, cx=cx, cy=cy, width=width, height=height)

    poses = []
    # images.txt alternates a pose line with a 2D-point line (possibly empty)
    pose_lines = []
    expecting_pose = True
    for ln in img_file.read_text().splitlines():
        stripped = ln.strip()
        if stripped.startswith("#"):
            continue
        if expecting_pose:
            if not stripped:
                continue
            pose_lines.append(stripped)
            expecting_pose = False
        else:
            expecting_pose = True
    for pose_line in pose_lines:
        elems = pose_line.split()
        qvec = np.array(list(map(float, elems[1:5])))
        tvec = np.array(list(map(float, elems[5:8])))
        cam_id = int(elems[8])
        name = elems[9] if len(elems) > 9 else elems[0]
        if cam_id not in intrinsics:
            raise SchemaError(f"image {name!r} references unknown camera id {cam_id}")
        w2c = np.eye(4)
        w2c[:3, :3] = quat_to_rotmat(qvec)
        w2c[:3, 3] = tvec
        poses.append(CameraPose(world_to_camera=w2c, name=name, **intrinsics[cam_id]))
    return poses
