"""Single-channel depth maps with per-pixel validity."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument


@dataclass
class DepthMap:
    depth: np.ndarray  # (H, W) float, scene units; 0 where invalid
    valid: np.ndarray  # (H, W) bool

    def __post_init__(self):
        self.depth = np.asarray(self.depth, dtype=np.float64)
        self.valid = np.asarray(self.valid).astype(bool)
        if self.depth.shape != self.valid.shape or self.depth.ndim != 2:
            raise InvalidArgument(
                f"depth {self.depth.shape} and valid {self.valid.shape} "
                "must be matching 2-D arrays"
            )
        # invalid pixels carry depth 0 by contract
        self.depth = np.where(self.valid, self.depth, 0.0)

    @property
    def width(self) -> int:
        return self.depth.shape[1]

    @property
    def height(self) -> int:
        return self.depth.shape[0]

    def copy(self) -> "DepthMap":
        return DepthMap(self.depth.copy(), self.valid.copy())
