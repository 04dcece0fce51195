"""Binary masks marking regions to inpaint (true = fill this pixel)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import InvalidArgument


@dataclass
class MaskImage:
    bits: np.ndarray  # (H, W) bool

    def __post_init__(self):
        self.bits = np.asarray(self.bits).astype(bool)
        if self.bits.ndim != 2:
            raise InvalidArgument(f"mask must be 2-D, got shape {self.bits.shape}")

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @property
    def count(self) -> int:
        return int(self.bits.sum())

    def is_empty(self) -> bool:
        return not self.bits.any()


def dilate_mask(mask: MaskImage, radius: int) -> MaskImage:
    """Square (Chebyshev) dilation: output is true at p iff some true input
    pixel lies within Chebyshev distance <= radius of p."""
    if radius < 0:
        raise InvalidArgument(f"dilation radius must be >= 0, got {radius}")
    if radius == 0:
        return MaskImage(mask.bits.copy())
    grown = ndimage.maximum_filter(
        mask.bits, size=2 * radius + 1, mode="constant", cval=False
    )
    return MaskImage(grown)
