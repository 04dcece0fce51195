"""Forward rendering of color, depth, and accumulated opacity.

Splats are composited front-to-back in exact global view-depth order. Each
splat only touches the pixels inside its screen-space footprint rectangle
(FOOTPRINT_SIGMAS standard deviations), which keeps the cost proportional to
covered area rather than image area times splat count. A pixel stops
accumulating once its transmittance drops below TERMINATION_TRANSMITTANCE.

Depth follows the same weighted compositing as color (weight = alpha times
transmittance). By default the raw weighted sum is returned; with
``normalize_by_alpha`` the sum is divided by accumulated opacity, which is the
form the unprojection pipeline consumes (raw sums bias depth toward zero
wherever coverage is soft).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .camera import CameraPose
from .depthmap import DepthMap
from .project import (
    ALPHA_MAX,
    TERMINATION_TRANSMITTANCE,
    ProjectedSplats,
    project_scene,
)
from .scene import GaussianScene

DEFAULT_VALIDITY_THRESHOLD = 0.5


@dataclass
class RenderOutput:
    color: np.ndarray  # (H, W, 3) in [0, 1]
    depth: DepthMap
    alpha_acc: np.ndarray  # (H, W) in [0, 1]


@dataclass
class CompositeState:
    """Forward-pass record consumed by the analytic backward pass."""

    order: np.ndarray  # sort permutation over projected splats
    bboxes: list  # per splat (y0, y1, x0, x1), None when empty
    active: list  # per splat bool patch: transmittance still above cutoff
    final_transmittance: np.ndarray  # (H, W)
    color: np.ndarray  # (H, W, 3) composited, before background
    raw_depth: np.ndarray  # (H, W) weighted depth sum


def render(
    scene: GaussianScene,
    pose: CameraPose,
    background: tuple[float, float, float] = (0.0, 0.0, 0.0),
    normalize_by_alpha: bool = False,
    validity_threshold: float = DEFAULT_VALIDITY_THRESHOLD,
) -> RenderOutput:
    """Render the scene from a camera pose."""
    proj = project_scene(scene, pose)
    color, raw_depth, transmittance, _ = _composite(
        proj, pose.width, pose.height, record=False
    )
    alpha_acc = 1.0 - transmittance
    bg = np.asarray(background, dtype=np.float64)
    if np.any(bg != 0.0):
        color = color + transmittance[:, :, None] * bg

    valid = alpha_acc > validity_threshold
    if normalize_by_alpha:
        depth_vals = np.where(valid, raw_depth / np.where(valid, alpha_acc, 1.0), 0.0)
    else:
        depth_vals = np.where(valid, raw_depth, 0.0)
    return RenderOutput(
        color=color,
        depth=DepthMap(depth_vals, valid),
        alpha_acc=alpha_acc,
    )


def composite_forward(
    proj: ProjectedSplats, width: int, height: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray, CompositeState]:
    """Forward compositing that records what the backward pass needs."""
    return _composite(proj, width, height, record=True)


def _composite(proj: ProjectedSplats, width: int, height: int, record: bool):
    order = np.argsort(proj.view_z, kind="stable")
    transmittance = np.ones((height, width))
    color = np.zeros((height, width, 3))
    raw_depth = np.zeros((height, width))
    xs = np.arange(width, dtype=np.float64)
    ys = np.arange(height, dtype=np.float64)

    bboxes: list = [None] * len(order) if record else []
    actives: list = [None] * len(order) if record else []

    mean2d, inv_cov = proj.mean2d, proj.inv_cov
    base_alpha, view_z, colors = proj.base_alpha, proj.view_z, proj.color
    radius = proj.radius

    for rank, i in enumerate(order):
        mx, my = mean2d[i]
        r = radius[i]
        x0 = max(int(np.floor(mx - r)), 0)
        x1 = min(int(np.floor(mx + r)) + 1, width)
        y0 = max(int(np.floor(my - r)), 0)
        y1 = min(int(np.floor(my + r)) + 1, height)
        if x0 >= x1 or y0 >= y1:
            continue
        active = transmittance[y0:y1, x0:x1] >= TERMINATION_TRANSMITTANCE
        # terminated pixels contribute nothing either way; shrink the patch
        # to the active sub-rectangle
        rows = active.any(axis=1)
        if not rows.any():
            continue
        cols = active.any(axis=0)
        ya, yb = _span(rows)
        xa, xb = _span(cols)
        y0, y1 = y0 + ya, y0 + yb
        x0, x1 = x0 + xa, x0 + xb
        active = active[ya:yb, xa:xb]

        t_patch = transmittance[y0:y1, x0:x1]
        dx = xs[x0:x1] - mx
        dy = ys[y0:y1] - my
        a, b, c = inv_cov[i]
        q = (
            a * (dx * dx)[None, :]
            + c * (dy * dy)[:, None]
            + (2.0 * b) * dy[:, None] * dx[None, :]
        )
        alpha = base_alpha[i] * np.exp(-0.5 * q)
        np.minimum(alpha, ALPHA_MAX, out=alpha)
        alpha *= active
        w = alpha * t_patch
        color[y0:y1, x0:x1] += w[:, :, None] * colors[i]
        raw_depth[y0:y1, x0:x1] += w * view_z[i]
        t_patch *= 1.0 - alpha
        if record:
            bboxes[rank] = (y0, y1, x0, x1)
            actives[rank] = active

    state = CompositeState(
        order=order,
        bboxes=bboxes,
        active=actives,
        final_transmittance=transmittance,
        color=color,
        raw_depth=raw_depth,
    ) if record else None
    return color, raw_depth, transmittance, state


def _span(flags: np.ndarray) -> tuple[int, int]:
    """First and one-past-last True index of a non-empty bool vector."""
    idx = np.nonzero(flags)[0]
    return int(idx[0]), int(idx[-1]) + 1
