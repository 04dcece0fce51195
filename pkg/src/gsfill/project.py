"""Perspective projection of 3D Gaussians to screen-space splats.

Covariance is pushed through the world-to-camera rotation and the perspective
Jacobian (EWA-style), then floored so every splat covers at least a fraction
of a pixel. Splats behind the near plane or whose center lies outside the
image extended by three standard deviations are culled.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .camera import CameraPose
from .scene import GaussianScene, normalize_quaternions
from .sh import eval_sh_color

ZNEAR = 0.01
COV_FLOOR = 0.3  # px^2, low-pass floor added to both eigenvalues
ALPHA_MAX = 0.99
TERMINATION_TRANSMITTANCE = 1e-4
FOOTPRINT_SIGMAS = 7.0  # rasterizer evaluates splats within this many sigmas


@dataclass
class Splat2D:
    """A single projected Gaussian."""

    mean2d: np.ndarray  # (2,) pixels
    cov2d: np.ndarray  # (2, 2) px^2, SPD (after floor)
    view_z: float  # camera-space depth
    color: np.ndarray  # (3,) RGB in [0, 1]
    base_alpha: float  # sigmoid(opacity)


@dataclass
class ProjectedSplats:
    """Vectorized projection of a whole scene for one camera.

    Rows are the surviving splats in original scene order; ``indices`` maps
    rows back to scene rows. Intermediates needed by the analytic backward
    pass are retained.
    """

    indices: np.ndarray  # (M,) int, rows into the scene
    mean2d: np.ndarray  # (M, 2)
    cov2d: np.ndarray  # (M, 2, 2)
    inv_cov: np.ndarray  # (M, 3) upper-triangular (a, b, c) of cov2d^-1
    view_z: np.ndarray  # (M,)
    color: np.ndarray  # (M, 3) clipped SH color
    color_unclipped: np.ndarray  # (M, 3) pre-clip, for gradient masking
    base_alpha: np.ndarray  # (M,)
    radius: np.ndarray  # (M,) footprint radius in pixels
    # backward intermediates
    t_cam: np.ndarray  # (M, 3) camera-space positions
    jac: np.ndarray  # (M, 2, 3) perspective Jacobians
    cov_cam: np.ndarray  # (M, 3, 3) camera-space 3D covariance
    rot_mats: np.ndarray  # (M, 3, 3) per-splat rotation matrices
    quats_unit: np.ndarray  # (M, 4) normalized quaternions
    quat_norms: np.ndarray  # (M,) original quaternion norms
    scales_sq: np.ndarray  # (M, 3) exp(2 * log_scale)
    view_dirs: np.ndarray  # (M, 3) unit dirs from camera center
    view_vec_norms: np.ndarray  # (M,) |position - camera center|


def quat_to_rotmats(quats_unit: np.ndarray) -> np.ndarray:
    """(M, 4) unit quaternions (w, x, y, z) to (M, 3, 3) rotation matrices."""
    w, x, y, z = quats_unit.T
    return np.stack(
        [
            np.stack([1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)], axis=-1),
            np.stack([2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)], axis=-1),
            np.stack([2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)], axis=-1),
        ],
        axis=-2,
    )


def max_eigenvalue_2x2(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Largest eigenvalue of symmetric [[a, b], [b, c]]."""
    half_trace = 0.5 * (a + c)
    disc = np.sqrt(np.maximum(0.25 * (a - c) ** 2 + b * b, 0.0))
    return half_trace + disc


def project_scene(scene: GaussianScene, pose: CameraPose) -> ProjectedSplats:
    """Project every Gaussian; cull by near plane and 3-sigma image bounds."""
    n = len(scene)
    if n == 0:
        return _empty_projection()

    w2c = pose.rotation
    t_cam_all = scene.positions @ w2c.T + pose.translation
    in_front = t_cam_all[:, 2] > ZNEAR
    idx = np.nonzero(in_front)[0]
    if len(idx) == 0:
        return _empty_projection()

    t = t_cam_all[idx]
    tx, ty, tz = t[:, 0], t[:, 1], t[:, 2]
    u = pose.fx * tx / tz + pose.cx
    v = pose.fy * ty / tz + pose.cy

    quats = scene.rotations[idx]
    qnorms = np.linalg.norm(quats, axis=1)
    q_unit = normalize_quaternions(quats)
    rot = quat_to_rotmats(q_unit)
    s_sq = np.exp(2.0 * scene.log_scales[idx])
    # sigma_world = R diag(s^2) R^T, then into camera space
    cov_world = np.einsum("mij,mj,mkj->mik", rot, s_sq, rot)
    cov_cam = np.einsum("ij,mjk,lk->mil", w2c, cov_world, w2c)

    inv_z = 1.0 / tz
    jac = np.zeros((len(idx), 2, 3))
    jac[:, 0, 0] = pose.fx * inv_z
    jac[:, 0, 2] = -pose.fx * tx * inv_z * inv_z
    jac[:, 1, 1] = pose.fy * inv_z
    jac[:, 1, 2] = -pose.fy * ty * inv_z * inv_z
    cov2d = np.einsum("mij,mjk,mlk->mil", jac, cov_cam, jac)
    cov2d[:, 0, 0] += COV_FLOOR
    cov2d[:, 1, 1] += COV_FLOOR

    a, b, c = cov2d[:, 0, 0], cov2d[:, 0, 1], cov2d[:, 1, 1]
    sigma_max = np.sqrt(max_eigenvalue_2x2(a, b, c))
    margin = 3.0 * sigma_max
    visible = (
        (u >= -margin)
        & (u <= pose.width - 1 + margin)
        & (v >= -margin)
        & (v <= pose.height - 1 + margin)
    )
    keep = np.nonzero(visible)[0]
    if len(keep) == 0:
        return _empty_projection()

    idx = idx[keep]
    t, jac, cov_cam, cov2d = t[keep], jac[keep], cov_cam[keep], cov2d[keep]
    rot, q_unit, qnorms, s_sq = rot[keep], q_unit[keep], qnorms[keep], s_sq[keep]
    u, v, sigma_max = u[keep], v[keep], sigma_max[keep]
    a, b, c = a[keep], b[keep], c[keep]

    det = a * c - b * b
    inv_cov = np.stack([c / det, -b / det, a / det], axis=1)

    cam_center = pose.camera_center
    view_vec = scene.positions[idx] - cam_center
    norms = np.linalg.norm(view_vec, axis=1)
    dirs = view_vec / norms[:, None]
    color_raw = 0.5 + np.einsum(
        "mk,mkc->mc",
        _basis_cache(dirs, scene.sh_degree),
        scene.sh[idx],
    )
    color = np.clip(color_raw, 0.0, 1.0)

    return ProjectedSplats(
        indices=idx,
        mean2d=np.stack([u, v], axis=1),
        cov2d=cov2d,
        inv_cov=inv_cov,
        view_z=t[:, 2].copy(),
        color=color,
        color_unclipped=color_raw,
        base_alpha=_sigmoid(scene.opacities[idx]),
        radius=FOOTPRINT_SIGMAS * sigma_max,
        t_cam=t,
        jac=jac,
        cov_cam=cov_cam,
        rot_mats=rot,
        quats_unit=q_unit,
        quat_norms=qnorms,
        scales_sq=s_sq,
        view_dirs=dirs,
        view_vec_norms=norms,
    )


def project_gaussian(g, pose: CameraPose) -> Splat2D | None:
    """Project a single Gaussian; None when culled."""
    single = GaussianScene(
        positions=g.position[None, :],
        rotations=g.rotation[None, :],
        log_scales=g.scale[None, :],
        opacities=np.array([g.opacity]),
        sh=g.sh[None, ...],
        sh_degree=int(round(np.sqrt(g.sh.shape[0]))) - 1,
    )
    proj = project_scene(single, pose)
    if len(proj.indices) == 0:
        return None
    return Splat2D(
        mean2d=proj.mean2d[0],
        cov2d=proj.cov2d[0],
        view_z=float(proj.view_z[0]),
        color=proj.color[0],
        base_alpha=float(proj.base_alpha[0]),
    )


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x, dtype=np.float64)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def _basis_cache(dirs: np.ndarray, degree: int) -> np.ndarray:
    from .sh import sh_basis

    return sh_basis(dirs, degree)


def _empty_projection() -> ProjectedSplats:
    z0 = np.zeros(0)
    return ProjectedSplats(
        indices=np.zeros(0, dtype=int),
        mean2d=np.zeros((0, 2)),
        cov2d=np.zeros((0, 2, 2)),
        inv_cov=np.zeros((0, 3)),
        view_z=z0,
        color=np.zeros((0, 3)),
        color_unclipped=np.zeros((0, 3)),
        base_alpha=z0,
        radius=z0,
        t_cam=np.zeros((0, 3)),
        jac=np.zeros((0, 2, 3)),
        cov_cam=np.zeros((0, 3, 3)),
        rot_mats=np.zeros((0, 3, 3)),
        quats_unit=np.zeros((0, 4)),
        quat_norms=z0,
        scales_sq=np.zeros((0, 3)),
        view_dirs=np.zeros((0, 3)),
        view_vec_norms=z0,
    )
