"""Percentile normalization of depth maps into the [-1, 1] working range.

Depth is mapped affinely so the 2nd and 98th percentiles of the valid pixels
land at -1 and +1, which makes completion scale- and shift-invariant. The
normalized map is replicated to three channels to fit image codecs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..depthmap import DepthMap
from ..errors import DegenerateDepth


@dataclass(frozen=True)
class NormParams:
    """The 2nd / 98th percentile depths that anchor the affine map."""

    p2: float
    p98: float

    def __post_init__(self):
        if not np.isfinite(self.p2) or not np.isfinite(self.p98) or self.p98 <= self.p2:
            raise DegenerateDepth(
                f"percentile range [{self.p2}, {self.p98}] cannot be normalized"
            )


def normalize_depth(d: DepthMap) -> tuple[np.ndarray, NormParams]:
    """Map depth into [-1, 1] via its 2nd/98th percentiles.

    Percentiles use linear interpolation over the sorted valid pixels.
    Returns a 3-channel (H, W, 3) array; invalid pixels map through the same
    affine (their placeholder zeros carry no meaning downstream).
    """
    values = d.depth[d.valid]
    if values.size < 2 or np.unique(values).size < 2:
        raise DegenerateDepth("need at least two distinct valid depth values")
    p2, p98 = np.percentile(values, [2.0, 98.0])
    params = NormParams(float(p2), float(p98))
    norm = (d.depth - params.p2) / (params.p98 - params.p2) * 2.0 - 1.0
    return np.repeat(norm[:, :, None], 3, axis=2), params


def denormalize_depth(d_norm: np.ndarray, params: NormParams) -> DepthMap:
    """Inverse of normalize_depth; channel-wise averages multi-channel input.

    Output depth is floored at zero (depth is non-negative by contract) and
    marked valid everywhere.
    """
    arr = np.asarray(d_norm, dtype=np.float64)
    if arr.ndim == 3:
        arr = arr.mean(axis=2)
    depth = (arr + 1.0) / 2.0 * (params.p98 - params.p2) + params.p2
    depth = np.maximum(depth, 0.0)
    return DepthMap(depth, np.ones_like(depth, dtype=bool))
