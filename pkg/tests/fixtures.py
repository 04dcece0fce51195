"""Synthetic scenes with exact ground truth for end-to-end tests."""

import numpy as np

from gsfill.camera import CameraPose
from gsfill.masks import MaskImage
from gsfill.scene import SH_DC_SCALE, GaussianScene

PLANE_Z = 5.0


def _logit(p):
    return float(np.log(p / (1.0 - p)))


def color_pattern(x, y):
    """Smooth, view-independent RGB pattern over plane coordinates."""
    r = 0.5 + 0.3 * np.sin(1.3 * x) * np.cos(0.9 * y)
    g = 0.5 + 0.3 * np.sin(0.7 * x + 1.1 * y)
    b = 0.5 + 0.3 * np.cos(1.7 * x - 0.6 * y)
    return np.stack(np.broadcast_arrays(r, g, b), axis=-1)


def plane_scene(grid=24, half_size=3.0, z=PLANE_Z, sigma_factor=0.7, opacity=0.9,
                tilt=(0.04, 0.03)):
    """Nearly camera-facing plane of Gaussians with a smooth color pattern.

    A slight tilt keeps per-splat camera depths distinct; an exactly frontal
    plane would put every splat at the same depth, where compositing order
    between ties is arbitrary and the loss is needlessly discontinuous.
    """
    coords = np.linspace(-half_size, half_size, grid)
    xs, ys = np.meshgrid(coords, coords)
    n = grid * grid
    zs = z + tilt[0] * xs.ravel() + tilt[1] * ys.ravel()
    positions = np.column_stack([xs.ravel(), ys.ravel(), zs])
    spacing = 2 * half_size / (grid - 1)
    sigma = sigma_factor * spacing
    sh = np.zeros((n, 1, 3))
    sh[:, 0, :] = (color_pattern(xs.ravel(), ys.ravel()) - 0.5) / SH_DC_SCALE
    return GaussianScene(
        positions=positions,
        rotations=np.tile([1.0, 0.0, 0.0, 0.0], (n, 1)),
        log_scales=np.log(np.full((n, 3), sigma)),
        opacities=np.full(n, _logit(opacity)),
        sh=sh,
        sh_degree=0,
    )


def frontal_camera(size=48, name="ref"):
    return CameraPose(
        fx=float(size), fy=float(size),
        cx=(size - 1) / 2.0, cy=(size - 1) / 2.0,
        width=size, height=size, name=name,
    )


def disk_fixture(size=48, grid=24, disk_world_radius=0.6, mask_margin_px=3,
                 sigma_factor=0.7):
    """Plane with a disk of Gaussians cut out, plus the matching pixel mask.

    Returns (full_scene, holed_scene, pose, mask); callers render the full
    scene for the ground-truth reference image.
    """
    full = plane_scene(grid=grid, sigma_factor=sigma_factor)
    pose = frontal_camera(size=size)
    keep = (
        full.positions[:, 0] ** 2 + full.positions[:, 1] ** 2
        > disk_world_radius**2
    )
    holed = full.select(keep)

    disk_px = pose.fx * disk_world_radius / PLANE_Z
    yy, xx = np.mgrid[0:size, 0:size]
    mask_bits = (xx - pose.cx) ** 2 + (yy - pose.cy) ** 2 <= (
        disk_px + mask_margin_px
    ) ** 2
    return full, holed, pose, MaskImage(mask_bits)


def _rect_hit(origin, direction, z_plane, rect):
    """Does the ray origin + t*direction cross rect (x0,x1,y0,y1) at z_plane?"""
    t = (z_plane - origin[2]) / direction[2]
    if t <= 0:
        return False
    x = origin[0] + t * direction[0]
    y = origin[1] + t * direction[1]
    x0, x1, y0, y1 = rect
    return x0 <= x <= x1 and y0 <= y <= y1


def occlusion_fixture(size=48, grid=24):
    """Plane missing the region a removed foreground plate always occluded.

    The plate sat at z = 3; the plane hole is the union of its shadows from
    the two cameras (an L-shaped footprint), so neither view alone sees the
    whole hole. Per-view masks are the plate's 2D extent in that view, the
    shape a segmenter would have produced before removal, and their borders
    sit on intact plane, not on foreign depth. Returns
    (full_scene, holed_scene, pose_a, mask_a, pose_b, mask_b).
    """
    plate = (-0.6, 0.3, -0.6, 0.6)  # x0, x1, y0, y1 at z = 3
    plate_z = 3.0

    pose_a = frontal_camera(size=size, name="front")
    yaw = -0.35  # aim back toward the shadow union's center
    c, s = np.cos(yaw), np.sin(yaw)
    rot = np.array([[c, 0.0, -s], [0.0, 1.0, 0.0], [s, 0.0, c]])
    cam_pos = np.array([1.2, 0.0, 0.0])
    w2c = np.eye(4)
    w2c[:3, :3] = rot
    w2c[:3, 3] = -rot @ cam_pos
    pose_b = CameraPose(
        fx=float(size), fy=float(size),
        cx=(size - 1) / 2.0, cy=(size - 1) / 2.0,
        width=size, height=size, world_to_camera=w2c, name="side",
    )

    def shadow(pose):
        """Plate shadow on the plane as seen from a camera center."""
        origin = pose.camera_center
        corners = []
        for bx in (plate[0], plate[1]):
            for by in (plate[2], plate[3]):
                t = (PLANE_Z - origin[2]) / (plate_z - origin[2])
                corners.append(origin[:2] + t * (np.array([bx, by]) - origin[:2]))
        corners = np.array(corners)
        return corners[:, 0].min(), corners[:, 0].max(), corners[:, 1].min(), corners[:, 1].max()

    sa, sb = shadow(pose_a), shadow(pose_b)

    plane = plane_scene(grid=grid)
    x, y = plane.positions[:, 0], plane.positions[:, 1]

    def in_rect(rect):
        return (x >= rect[0]) & (x <= rect[1]) & (y >= rect[2]) & (y <= rect[3])

    holed = plane.select(~(in_rect(sa) | in_rect(sb)))

    def plate_mask(pose):
        bits = np.zeros((size, size), dtype=bool)
        origin = pose.camera_center
        rot_t = pose.rotation.T
        for v in range(size):
            for u in range(size):
                direction = rot_t @ np.array(
                    [(u - pose.cx) / pose.fx, (v - pose.cy) / pose.fy, 1.0]
                )
                bits[v, u] = _rect_hit(origin, direction, plate_z, plate)
        return MaskImage(bits)

    return plane, holed, pose_a, plate_mask(pose_a), pose_b, plate_mask(pose_b)
