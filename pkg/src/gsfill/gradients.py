"""Photometric loss and analytic parameter gradients.

The loss is ``(1 - lambda) * L1 + lambda * D-SSIM`` between the rendered color
image and a target. Gradients flow through window statistics (D-SSIM),
front-to-back compositing, the Gaussian footprint, perspective projection,
spherical-harmonic color, sigma = exp(scale), sigmoid(opacity), and quaternion
normalization.

The compositing backward runs in reverse depth order: transmittance before
each splat is reconstructed by dividing out its (clamped, capped at 0.99)
alpha, and a running suffix of weighted colors provides the occlusion term,
so nothing but the per-splat active masks from the forward pass is stored.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .camera import CameraPose
from .errors import InvalidArgument
from .project import ALPHA_MAX, ProjectedSplats, project_scene
from .render import composite_forward
from .scene import GaussianScene, sh_coeff_count
from .sh import sh_basis, sh_basis_grad
from .ssim import dssim_value_and_grad


@dataclass
class SceneGradients:
    """Partials of the scalar loss, shaped like the scene parameter arrays."""

    position: np.ndarray  # (N, 3)
    rotation: np.ndarray  # (N, 4) w.r.t. the raw (unnormalized) quaternion
    scale: np.ndarray  # (N, 3) w.r.t. log scales
    opacity: np.ndarray  # (N,) w.r.t. the logit
    sh: np.ndarray  # (N, K, 3)

    @staticmethod
    def zeros(n: int, sh_degree: int) -> "SceneGradients":
        k = sh_coeff_count(sh_degree)
        return SceneGradients(
            position=np.zeros((n, 3)),
            rotation=np.zeros((n, 4)),
            scale=np.zeros((n, 3)),
            opacity=np.zeros(n),
            sh=np.zeros((n, k, 3)),
        )


def loss_and_gradients(
    scene: GaussianScene,
    pose: CameraPose,
    target: np.ndarray,
    lam: float,
    background: tuple[float, float, float] = (0.0, 0.0, 0.0),
) -> tuple[float, SceneGradients]:
    """Evaluate the fine-tuning loss at one view and differentiate it."""
    if not 0.0 <= lam <= 1.0:
        raise InvalidArgument(f"lambda must be in [0, 1], got {lam}")
    target = np.asarray(target, dtype=np.float64)
    if target.shape != (pose.height, pose.width, 3):
        raise InvalidArgument(
            f"target shape {target.shape} does not match "
            f"{pose.height}x{pose.width} view"
        )

    proj = project_scene(scene, pose)
    color, _, transmittance, state = composite_forward(proj, pose.width, pose.height)
    bg = np.asarray(background, dtype=np.float64)
    image = color + transmittance[:, :, None] * bg

    diff = image - target
    l1 = float(np.abs(diff).mean())
    loss = (1.0 - lam) * l1
    d_image = (1.0 - lam) * np.sign(diff) / diff.size
    if lam > 0.0:
        dssim_val, dssim_grad = dssim_value_and_grad(image, target)
        loss += lam * dssim_val
        # a perfect score has exactly zero gradient; the closed form only
        # cancels to roundoff, which Adam would amplify to full-size steps
        if dssim_val != 0.0:
            d_image = d_image + lam * dssim_grad

    grads = SceneGradients.zeros(len(scene), scene.sh_degree)
    if len(proj.indices) == 0:
        return loss, grads

    splat = _composite_backward(proj, state, d_image, bg)
    _projection_backward(scene, pose, proj, splat, grads)
    return loss, grads


def _composite_backward(proj: ProjectedSplats, state, d_image: np.ndarray, bg):
    """Per-splat gradients of the loss w.r.t. screen-space splat parameters."""
    m = len(proj.indices)
    g_mean2d = np.zeros((m, 2))
    g_invcov = np.zeros((m, 3))  # d/d(a, b, c) of inverse covariance
    g_base = np.zeros(m)
    g_color = np.zeros((m, 3))

    height, width = state.final_transmittance.shape
    xs = np.arange(width, dtype=np.float64)
    ys = np.arange(height, dtype=np.float64)

    trans = state.final_transmittance.copy()
    suffix = trans[:, :, None] * bg if np.any(bg != 0.0) else np.zeros(
        (height, width, 3)
    )

    order = state.order
    mean2d, inv_cov = proj.mean2d, proj.inv_cov
    base_alpha, colors = proj.base_alpha, proj.color

    for rank in range(len(order) - 1, -1, -1):
        bbox = state.bboxes[rank]
        if bbox is None:
            continue
        i = order[rank]
        y0, y1, x0, x1 = bbox
        active = state.active[rank]
        if not active.any():
            continue
        mx, my = mean2d[i]
        dx = xs[x0:x1] - mx
        dy = ys[y0:y1] - my
        dx2 = dx * dx
        dy2 = dy * dy
        cross = dy[:, None] * dx[None, :]
        a, b, c = inv_cov[i]
        q = a * dx2[None, :] + c * dy2[:, None] + (2.0 * b) * cross
        gauss = np.exp(-0.5 * q)
        alpha_raw = base_alpha[i] * gauss
        unclamped = alpha_raw < ALPHA_MAX
        alpha = np.minimum(alpha_raw, ALPHA_MAX)
        alpha *= active

        t_after = trans[y0:y1, x0:x1]
        t_before = t_after / (1.0 - alpha)
        w = alpha * t_before

        u = d_image[y0:y1, x0:x1]
        g_color[i] = np.einsum("hwc,hw->c", u, w)
        s1 = u @ colors[i]
        s2 = np.einsum("hwc,hwc->hw", u, suffix[y0:y1, x0:x1])
        d_alpha = active * (t_before * s1 - s2 / (1.0 - alpha))
        d_raw = d_alpha * unclamped
        g_base[i] = float(np.einsum("hw,hw->", d_raw, gauss))
        d_q = d_raw * alpha_raw * -0.5
        col_sums = d_q.sum(axis=0)
        row_sums = d_q.sum(axis=1)
        sum_dx = col_sums @ dx
        sum_dy = row_sums @ dy
        sum_cross = float(np.einsum("hw,hw->", d_q, cross))
        g_mean2d[i, 0] = -2.0 * (a * sum_dx + b * sum_dy)
        g_mean2d[i, 1] = -2.0 * (b * sum_dx + c * sum_dy)
        g_invcov[i, 0] = col_sums @ dx2
        g_invcov[i, 1] = 2.0 * sum_cross
        g_invcov[i, 2] = row_sums @ dy2

        suffix[y0:y1, x0:x1] += w[:, :, None] * colors[i]
        trans[y0:y1, x0:x1] = t_before

    return {
        "mean2d": g_mean2d,
        "invcov": g_invcov,
        "base_alpha": g_base,
        "color": g_color,
    }


def _projection_backward(
    scene: GaussianScene,
    pose: CameraPose,
    proj: ProjectedSplats,
    splat: dict,
    grads: SceneGradients,
) -> None:
    """Vectorized chain from screen-space gradients to scene parameters."""
    idx = proj.indices
    jac, cov_cam, t = proj.jac, proj.cov_cam, proj.t_cam
    rot, s_sq = proj.rot_mats, proj.scales_sq
    w2c = pose.rotation

    # inverse covariance -> covariance: dL/dS = -A G_A A with A = S^-1
    ga, gb, gc = splat["invcov"].T
    g_a_mat = np.empty((len(idx), 2, 2))
    g_a_mat[:, 0, 0] = ga
    g_a_mat[:, 0, 1] = 0.5 * gb
    g_a_mat[:, 1, 0] = 0.5 * gb
    g_a_mat[:, 1, 1] = gc
    a_mats = np.empty((len(idx), 2, 2))
    a_mats[:, 0, 0] = proj.inv_cov[:, 0]
    a_mats[:, 0, 1] = proj.inv_cov[:, 1]
    a_mats[:, 1, 0] = proj.inv_cov[:, 1]
    a_mats[:, 1, 1] = proj.inv_cov[:, 2]
    g_cov2d = -np.einsum("mij,mjk,mkl->mil", a_mats, g_a_mat, a_mats)

    # cov2d = J Mc J^T + floor
    g_mc = np.einsum("mji,mjk,mkl->mil", jac, g_cov2d, jac)
    g_jac = np.einsum("mij,mjk,mlk->mil", g_cov2d, jac, cov_cam) + np.einsum(
        "mji,mjk,mlk->mil", g_cov2d, jac, cov_cam
    )

    # screen position: J is exactly d(mean2d)/dt
    g_t = np.einsum("mji,mj->mi", jac, splat["mean2d"])

    # J's own dependence on the camera-space position
    tx, ty, tz = t[:, 0], t[:, 1], t[:, 2]
    inv_z2 = 1.0 / (tz * tz)
    inv_z3 = inv_z2 / tz
    g_t[:, 0] += g_jac[:, 0, 2] * (-pose.fx * inv_z2)
    g_t[:, 1] += g_jac[:, 1, 2] * (-pose.fy * inv_z2)
    g_t[:, 2] += (
        g_jac[:, 0, 0] * (-pose.fx * inv_z2)
        + g_jac[:, 1, 1] * (-pose.fy * inv_z2)
        + g_jac[:, 0, 2] * (2.0 * pose.fx * tx * inv_z3)
        + g_jac[:, 1, 2] * (2.0 * pose.fy * ty * inv_z3)
    )

    # Mc = W Sigma_w W^T ; t = W p + tv
    g_cov_world = np.einsum("ji,mjk,kl->mil", w2c, g_mc, w2c)
    g_pos = np.einsum("ji,mj->mi", w2c, g_t)

    # Sigma_w = R diag(s^2) R^T
    sym = g_cov_world + np.transpose(g_cov_world, (0, 2, 1))
    g_rot = np.einsum("mij,mjk->mik", sym, rot) * s_sq[:, None, :]
    g_diag = np.einsum("mji,mjk,mki->mi", rot, g_cov_world, rot)
    g_logscale = g_diag * 2.0 * s_sq

    g_quat = _rotation_backward(proj.quats_unit, g_rot)
    # through normalization: (I - qq^T)/|q|
    qdot = np.einsum("mi,mi->m", proj.quats_unit, g_quat)
    g_quat = (g_quat - proj.quats_unit * qdot[:, None]) / proj.quat_norms[:, None]

    # color: clip mask, SH basis, and view direction
    raw = proj.color_unclipped
    clip_mask = (raw > 0.0) & (raw < 1.0)
    g_color = splat["color"] * clip_mask
    basis = sh_basis(proj.view_dirs, scene.sh_degree)
    g_sh = np.einsum("mk,mc->mkc", basis, g_color)
    gbasis = sh_basis_grad(proj.view_dirs, scene.sh_degree)
    g_dir = np.einsum("mkd,mkc,mc->md", gbasis, scene.sh[idx], g_color)
    ddot = np.einsum("mi,mi->m", proj.view_dirs, g_dir)
    g_pos += (g_dir - proj.view_dirs * ddot[:, None]) / proj.view_vec_norms[:, None]

    # opacity logit through sigmoid
    g_opacity = splat["base_alpha"] * proj.base_alpha * (1.0 - proj.base_alpha)

    grads.position[idx] = g_pos
    grads.rotation[idx] = g_quat
    grads.scale[idx] = g_logscale
    grads.opacity[idx] = g_opacity
    grads.sh[idx] = g_sh


def _rotation_backward(q: np.ndarray, g_rot: np.ndarray) -> np.ndarray:
    """Contract dL/dR with dR/dq for unit quaternions (w, x, y, z)."""
    w, x, y, z = q.T
    g = g_rot
    gw = 2.0 * (
        -z * g[:, 0, 1] + y * g[:, 0, 2]
        + z * g[:, 1, 0] - x * g[:, 1, 2]
        - y * g[:, 2, 0] + x * g[:, 2, 1]
    )
    gx = 2.0 * (
        y * g[:, 0, 1] + z * g[:, 0, 2]
        + y * g[:, 1, 0] - 2.0 * x * g[:, 1, 1] - w * g[:, 1, 2]
        + z * g[:, 2, 0] + w * g[:, 2, 1] - 2.0 * x * g[:, 2, 2]
    )
    gy = 2.0 * (
        -2.0 * y * g[:, 0, 0] + x * g[:, 0, 1] + w * g[:, 0, 2]
        + x * g[:, 1, 0] + z * g[:, 1, 2]
        - w * g[:, 2, 0] + z * g[:, 2, 1] - 2.0 * y * g[:, 2, 2]
    )
    gz = 2.0 * (
        -2.0 * z * g[:, 0, 0] - w * g[:, 0, 1] + x * g[:, 0, 2]
        + w * g[:, 1, 0] - 2.0 * z * g[:, 1, 1] + y * g[:, 1, 2]
        + x * g[:, 2, 0] + y * g[:, 2, 1]
    )
    return np.stack([gw, gx, gy, gz], axis=1)
