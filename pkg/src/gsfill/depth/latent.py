"""Latent-space plumbing: codec interface, the exactly-invertible test codec,
mask downsampling, and assembly of the 13-channel conditioned stack.

The conditioned stack concatenates, along channels: the noisy depth latent
(4), the clean depth latent gated by the downsampled mask (4), the image
latent (4), and the mask itself (1).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol, runtime_checkable

import numpy as np

from ..errors import InvalidArgument
from ..masks import MaskImage
from .schedule import DiffusionSchedule


@runtime_checkable
class LatentCodec(Protocol):
    """Maps (H, W, 3) images to 4-channel latents at reduced resolution."""

    downsample_factor: int

    def encode(self, image: np.ndarray) -> np.ndarray: ...

    def decode(self, latent: np.ndarray) -> np.ndarray: ...


@dataclass
class LatentStack:
    """The conditioned input to the denoiser (4 + 4 + 4 + 1 = 13 channels)."""

    z_t_d: np.ndarray  # (4, h, w) noisy depth latent
    z_d_masked: np.ndarray  # (4, h, w) clean depth latent * mask
    z_img: np.ndarray  # (4, h, w) conditioning image latent
    m_small: np.ndarray  # (1, h, w) downsampled mask in [0, 1]

    def __post_init__(self):
        shapes = {
            "z_t_d": self.z_t_d.shape,
            "z_d_masked": self.z_d_masked.shape,
            "z_img": self.z_img.shape,
        }
        for name, shape in shapes.items():
            if len(shape) != 3 or shape[0] != 4:
                raise InvalidArgument(f"{name} must be (4, h, w), got {shape}")
        if self.m_small.shape != (1,) + self.z_t_d.shape[1:]:
            raise InvalidArgument(
                f"m_small shape {self.m_small.shape} does not match latent "
                f"{self.z_t_d.shape}"
            )
        if shapes["z_d_masked"] != shapes["z_t_d"] or shapes["z_img"] != shapes["z_t_d"]:
            raise InvalidArgument(f"latent shapes differ: {shapes}")

    def channels(self) -> np.ndarray:
        """Concatenated (13, h, w) tensor."""
        return np.concatenate([self.z_t_d, self.z_d_masked, self.z_img, self.m_small])


# Orthonormal 4x4 mix (scaled Hadamard): exact inverse is its transpose.
_HADAMARD = 0.5 * np.array(
    [
        [1.0, 1.0, 1.0, 1.0],
        [1.0, -1.0, 1.0, -1.0],
        [1.0, 1.0, -1.0, -1.0],
        [1.0, -1.0, -1.0, 1.0],
    ]
)


class OrthoBlockCodec:
    """Exactly invertible stand-in for a learned image codec.

    Collapses channels to gray, packs 2x2 pixel blocks into 4 latent channels
    at half resolution, and mixes them with an orthonormal matrix. On
    channel-replicated inputs (depth maps are stored that way) decode(encode)
    is the identity, which makes the whole diffusion path testable without
    neural weights. Real codecs attach through the same interface.
    """

    downsample_factor = 2

    def encode(self, image: np.ndarray) -> np.ndarray:
        arr = np.asarray(image, dtype=np.float64)
        if arr.ndim == 2:
            arr = arr[:, :, None]
        h, w = arr.shape[:2]
        if h % 2 or w % 2:
            raise InvalidArgument(f"image dims {h}x{w} must be even")
        if arr.shape[2] == 3:
            c0, c1, c2 = arr[:, :, 0], arr[:, :, 1], arr[:, :, 2]
            # written so replicated channels reproduce c0 bit-exactly
            gray = c0 + (c1 - c0) / 3.0 + (c2 - c0) / 3.0
        else:
            gray = arr[:, :, 0]
        blocks = gray.reshape(h // 2, 2, w // 2, 2).transpose(0, 2, 1, 3).reshape(
            h // 2, w // 2, 4
        )
        latent = blocks @ _HADAMARD.T
        return latent.transpose(2, 0, 1)

    def decode(self, latent: np.ndarray) -> np.ndarray:
        lat = np.asarray(latent, dtype=np.float64)
        if lat.ndim != 3 or lat.shape[0] != 4:
            raise InvalidArgument(f"latent must be (4, h, w), got {lat.shape}")
        blocks = lat.transpose(1, 2, 0) @ _HADAMARD  # transpose == inverse
        h2, w2 = blocks.shape[:2]
        gray = blocks.reshape(h2, w2, 2, 2).transpose(0, 2, 1, 3).reshape(
            h2 * 2, w2 * 2
        )
        return np.repeat(gray[:, :, None], 3, axis=2)


def downsample_mask(mask: MaskImage, factor: int) -> np.ndarray:
    """Area-average the mask to latent resolution; soft float in [0, 1]."""
    bits = mask.bits.astype(np.float64)
    h, w = bits.shape
    if h % factor or w % factor:
        raise InvalidArgument(f"mask dims {h}x{w} not divisible by factor {factor}")
    small = bits.reshape(h // factor, factor, w // factor, factor).mean(axis=(1, 3))
    return small[None, :, :]


def assemble_latent(
    z_d_clean: np.ndarray,
    z_img: np.ndarray,
    mask: MaskImage,
    codec: LatentCodec,
    schedule: DiffusionSchedule,
    t: int,
    noise: np.ndarray,
) -> LatentStack:
    """Build the denoiser input for timestep t.

    The noisy channel is ``sqrt(alpha_bar_t) z + sqrt(1 - alpha_bar_t) eps``;
    the conditioning channel is the clean depth latent gated by the
    downsampled mask.
    """
    z_d_clean = np.asarray(z_d_clean, dtype=np.float64)
    noise = np.asarray(noise, dtype=np.float64)
    if noise.shape != z_d_clean.shape:
        raise InvalidArgument(
            f"noise shape {noise.shape} != latent shape {z_d_clean.shape}"
        )
    m_small = downsample_mask(mask, codec.downsample_factor)
    if m_small.shape[1:] != z_d_clean.shape[1:]:
        raise InvalidArgument(
            f"mask at latent resolution {m_small.shape[1:]} does not match "
            f"latent {z_d_clean.shape[1:]}"
        )
    z_t_d = schedule.signal_scale(t) * z_d_clean + schedule.noise_scale(t) * noise
    return LatentStack(
        z_t_d=z_t_d,
        z_d_masked=z_d_clean * m_small,
        z_img=np.asarray(z_img, dtype=np.float64),
        m_small=m_small,
    )
