"""Mask-guided removal of Gaussians from a scene.

The association between 3D Gaussians and 2D masks is a voting rule: each view
in which a Gaussian's projected center lands inside the camera frustum casts
one vote, positive when the mask is set at that pixel. A Gaussian is removed
when the positive fraction reaches the threshold. This rule is a documented
stand-in; see the project README.
"""

from __future__ import annotations

import numpy as np

from .camera import CameraPose
from .errors import InvalidArgument
from .masks import MaskImage
from .project import ZNEAR
from .scene import GaussianScene


def remove_masked_gaussians(
    scene: GaussianScene,
    views: list[tuple[CameraPose, MaskImage]],
    vote_threshold: float = 0.8,
) -> tuple[GaussianScene, int]:
    """Drop Gaussians whose projected centers are masked in enough views.

    Gaussians behind the near plane of a view do not vote in that view; with
    no frustum votes at all, a Gaussian is kept. Survivor order is preserved.
    Returns the filtered scene and the number of removed Gaussians.
    """
    if not views:
        raise InvalidArgument("remove_masked_gaussians needs at least one view")
    for pose, mask in views:
        if (mask.width, mask.height) != (pose.width, pose.height):
            raise InvalidArgument(
                f"mask {mask.width}x{mask.height} does not match view "
                f"{pose.width}x{pose.height}"
            )

    n = len(scene)
    in_view = np.zeros(n, dtype=np.int64)
    masked = np.zeros(n, dtype=np.int64)
    for pose, mask in views:
        uv, z = pose.project(scene.positions)
        u = np.round(uv[:, 0]).astype(int)
        v = np.round(uv[:, 1]).astype(int)
        inside = (
            (z > ZNEAR)
            & (u >= 0)
            & (u < pose.width)
            & (v >= 0)
            & (v < pose.height)
        )
        in_view += inside
        hit = np.zeros(n, dtype=bool)
        hit[inside] = mask.bits[v[inside], u[inside]]
        masked += hit

    votes = in_view > 0
    fraction = np.where(votes, masked / np.maximum(in_view, 1), 0.0)
    remove = votes & (fraction >= vote_threshold)
    kept = scene.select(~remove)
    return kept, int(remove.sum())
