"""Colored point clouds: unprojection, outlier removal, and scene merging.

Unprojection lifts every masked valid depth pixel through the inverse pinhole
map into world space. Integer pixel coordinates address pixel centers, the
same convention the renderer projects with, so project/unproject round trips
are exact.

Outlier handling follows a two-predicate rule: stray points of the *existing*
cloud near the newly unprojected points are dropped only when they are both
within a distance threshold of the new cloud and radius-outliers among their
own cloud.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.spatial import cKDTree

from .camera import CameraPose
from .depthmap import DepthMap
from .errors import EmptyResult, InvalidArgument
from .masks import MaskImage
from .scene import SH_DC_SCALE, GaussianScene, sh_coeff_count


@dataclass
class ColoredPointCloud:
    xyz: np.ndarray  # (N, 3) world coordinates
    rgb: np.ndarray  # (N, 3) in [0, 1]
    source_pixel: np.ndarray = field(default=None)  # (N, 2) int (u, v)
    source_view: np.ndarray = field(default=None)  # (N,) int view ids

    def __post_init__(self):
        self.xyz = np.asarray(self.xyz, dtype=np.float64).reshape(-1, 3)
        self.rgb = np.asarray(self.rgb, dtype=np.float64).reshape(-1, 3)
        n = len(self.xyz)
        if len(self.rgb) != n:
            raise InvalidArgument(f"rgb has {len(self.rgb)} rows, expected {n}")
        if self.source_pixel is None:
            self.source_pixel = np.zeros((n, 2), dtype=np.int64)
        else:
            self.source_pixel = np.asarray(self.source_pixel, dtype=np.int64).reshape(-1, 2)
        if self.source_view is None:
            self.source_view = np.full(n, -1, dtype=np.int64)
        else:
            self.source_view = np.asarray(self.source_view, dtype=np.int64).reshape(-1)
        if not np.isfinite(self.xyz).all():
            raise InvalidArgument("point coordinates must be finite")

    def __len__(self) -> int:
        return len(self.xyz)

    def select(self, keep) -> "ColoredPointCloud":
        return ColoredPointCloud(
            self.xyz[keep], self.rgb[keep],
            self.source_pixel[keep], self.source_view[keep],
        )


class KdTree:
    """Spatial index over point positions (nearest and radius queries)."""

    def __init__(self, points: np.ndarray):
        self.points = np.asarray(points, dtype=np.float64).reshape(-1, 3)
        self._tree = cKDTree(self.points) if len(self.points) else None

    def nearest(self, query: np.ndarray, k: int = 1):
        """Distances and indices of the k nearest points to each query."""
        if self._tree is None:
            raise InvalidArgument("empty tree")
        dist, idx = self._tree.query(np.atleast_2d(query), k=k)
        return dist, idx

    def radius_counts(self, queries: np.ndarray, radius: float) -> np.ndarray:
        """Number of stored points within radius (inclusive) of each query."""
        if self._tree is None:
            return np.zeros(len(np.atleast_2d(queries)), dtype=int)
        return np.asarray(
            self._tree.query_ball_point(
                np.atleast_2d(queries), r=radius, return_length=True
            )
        )

    def within(self, queries: np.ndarray, radius: float) -> np.ndarray:
        """Bool per query: does any stored point lie within radius?"""
        return self.radius_counts(queries, radius) > 0


def unproject(
    depth: DepthMap,
    image: np.ndarray,
    mask: MaskImage,
    pose: CameraPose,
    view_id: int = -1,
) -> ColoredPointCloud:
    """One colored world point per masked valid pixel."""
    image = np.asarray(image, dtype=np.float64)
    if image.shape[:2] != (depth.height, depth.width) or (
        mask.height, mask.width
    ) != (depth.height, depth.width):
        raise InvalidArgument("depth, image, and mask dimensions must match")
    select = mask.bits & depth.valid
    if not select.any():
        raise EmptyResult("no masked valid pixels to unproject")
    vs, us = np.nonzero(select)
    z = depth.depth[vs, us]
    x_cam = (us - pose.cx) / pose.fx * z
    y_cam = (vs - pose.cy) / pose.fy * z
    cam = np.stack([x_cam, y_cam, z], axis=1)
    rot = pose.rotation
    world = (cam - pose.translation) @ rot
    return ColoredPointCloud(
        xyz=world,
        rgb=image[vs, us],
        source_pixel=np.stack([us, vs], axis=1),
        source_view=np.full(len(us), view_id, dtype=np.int64),
    )


def reproject_points(
    pc: ColoredPointCloud, pose: CameraPose
) -> tuple[np.ndarray, np.ndarray]:
    """Pinhole projection of the cloud: (u, v, z) rows plus the kept indices
    (points behind the camera are excluded)."""
    uv, z = pose.project(pc.xyz)
    front = z > 0.0
    kept = np.nonzero(front)[0]
    uvz = np.column_stack([uv[front], z[front]])
    return uvz, kept


def radius_outlier_filter(
    pc: ColoredPointCloud, radius: float, min_neighbors: int
) -> tuple[ColoredPointCloud, np.ndarray]:
    """Keep points with at least ``min_neighbors`` other points within radius."""
    if radius <= 0:
        raise InvalidArgument(f"radius must be positive, got {radius}")
    if min_neighbors < 1:
        raise InvalidArgument(f"min_neighbors must be >= 1, got {min_neighbors}")
    counts = _self_neighbor_counts(pc.xyz, radius)
    keep = counts >= min_neighbors
    removed = np.nonzero(~keep)[0]
    return pc.select(keep), removed


def _self_neighbor_counts(points: np.ndarray, radius: float) -> np.ndarray:
    if len(points) == 0:
        return np.zeros(0, dtype=int)
    tree = cKDTree(points)
    counts = tree.query_ball_point(points, r=radius, return_length=True)
    return np.asarray(counts) - 1  # queries count themselves


def edge_outlier_keep_mask(
    new_xyz: np.ndarray,
    original_xyz: np.ndarray,
    dist_threshold: float,
    radius: float,
    min_neighbors: int,
) -> np.ndarray:
    """Bool per original point: survives the edge-outlier intersection rule."""
    if len(new_xyz) == 0 or len(original_xyz) == 0:
        raise InvalidArgument("both clouds must be non-empty")
    near_new = KdTree(new_xyz).within(original_xyz, dist_threshold)
    lonely = _self_neighbor_counts(original_xyz, radius) < min_neighbors
    return ~(near_new & lonely)


def edge_outlier_removal(
    new_pc: ColoredPointCloud,
    original_pc: ColoredPointCloud,
    dist_threshold: float,
    radius: float,
    min_neighbors: int,
) -> ColoredPointCloud:
    """Remove original-cloud points that hug the new cloud *and* are radius
    outliers within their own cloud (intersection of the two predicates)."""
    keep = edge_outlier_keep_mask(
        new_pc.xyz, original_pc.xyz, dist_threshold, radius, min_neighbors
    )
    return original_pc.select(keep)


def knn_mean_distances(points: np.ndarray, k: int = 3) -> np.ndarray:
    """Mean distance from each point to its k nearest other points."""
    n = len(points)
    if n <= 1:
        return np.full(n, 1.0)
    kk = min(k, n - 1)
    tree = cKDTree(points)
    dist, _ = tree.query(points, k=kk + 1)  # first hit is the point itself
    return dist[:, 1:].mean(axis=1)


def merge_into_scene(
    scene: GaussianScene,
    pc: ColoredPointCloud,
    scale_mode: str = "knn",
    fixed_scale: float = 0.01,
    opacity_init: float = 0.1,
) -> GaussianScene:
    """Append one Gaussian per point after the existing ones.

    New Gaussians get the point color as the SH DC term (higher orders zero),
    identity rotation, logit(opacity_init) opacity, and isotropic log-scale
    from the mean distance to the 3 nearest new-cloud neighbors (or a fixed
    value).
    """
    if len(pc) == 0:
        raise InvalidArgument("cannot merge an empty point cloud")
    if scale_mode not in ("knn", "fixed"):
        raise InvalidArgument(f"unknown scale_mode {scale_mode!r}")
    if not 0.0 < opacity_init < 1.0:
        raise InvalidArgument(f"opacity_init must be in (0, 1), got {opacity_init}")
    n = len(pc)
    k = sh_coeff_count(scene.sh_degree)
    sh = np.zeros((n, k, 3))
    sh[:, 0, :] = (pc.rgb - 0.5) / SH_DC_SCALE
    if scale_mode == "knn":
        scales = np.log(np.maximum(knn_mean_distances(pc.xyz), 1e-12))
    else:
        scales = np.full(n, np.log(fixed_scale))
    addition = GaussianScene(
        positions=pc.xyz.copy(),
        rotations=np.tile([1.0, 0.0, 0.0, 0.0], (n, 1)),
        log_scales=np.repeat(scales[:, None], 3, axis=1),
        opacities=np.full(n, np.log(opacity_init / (1.0 - opacity_init))),
        sh=sh,
        sh_degree=scene.sh_degree,
    )
    return scene.concatenate(addition)


def pointcloud_ply_text(pc: ColoredPointCloud) -> str:
    """ASCII PLY (x y z r g b, 8-bit colors) for external viewers."""
    lines = [
        "ply", "format ascii 1.0", f"element vertex {len(pc)}",
        "property float x", "property float y", "property float z",
        "property uchar red", "property uchar green", "property uchar blue",
        "end_header",
    ]
    colors = np.clip(np.round(pc.rgb * 255.0), 0, 255).astype(int)
    for p, c in zip(pc.xyz, colors):
        lines.append(f"{p[0]:.7g} {p[1]:.7g} {p[2]:.7g} {c[0]} {c[1]} {c[2]}")
    return "\n".join(lines) + "\n"


def save_pointcloud_ply(pc: ColoredPointCloud, path: str | Path) -> None:
    Path(path).write_text(pointcloud_ply_text(pc))
