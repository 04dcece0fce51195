"""Toy-scale training path: the denoising objective and random mask synthesis."""

from __future__ import annotations

import numpy as np

from ..masks import MaskImage, dilate_mask
from .latent import LatentCodec, assemble_latent
from .normalize import normalize_depth
from .schedule import DiffusionSchedule

FULL_MASK_PROBABILITY = 0.3


def diffusion_loss(denoiser, sample, codec: LatentCodec,
                   schedule: DiffusionSchedule, rng: np.random.Generator) -> float:
    """Mean-squared error between drawn noise and the denoiser's estimate.

    ``sample`` is an (image, depth, mask) triple; the timestep is drawn
    uniformly from {1..T}.
    """
    image, depth, mask = sample
    d_norm, _ = normalize_depth(depth)
    z_d = codec.encode(d_norm)
    z_img = codec.encode(np.asarray(image, dtype=np.float64))
    t = int(rng.integers(1, schedule.num_steps + 1))
    noise = rng.standard_normal(z_d.shape)
    stack = assemble_latent(z_d, z_img, mask, codec, schedule, t, noise)
    estimate = np.asarray(denoiser.predict_noise(stack, t), dtype=np.float64)
    return float(np.mean((noise - estimate) ** 2))


def generate_training_mask(rng: np.random.Generator, width: int, height: int) -> MaskImage:
    """Random training mask: full with probability 0.3, else a square, random
    strokes, or their union (uniformly)."""
    if rng.uniform() < FULL_MASK_PROBABILITY:
        return MaskImage(np.ones((height, width), dtype=bool))
    kind = int(rng.integers(0, 3))
    if kind == 0:
        return _square_mask(rng, width, height)
    if kind == 1:
        return _stroke_mask(rng, width, height)
    square = _square_mask(rng, width, height)
    strokes = _stroke_mask(rng, width, height)
    return MaskImage(square.bits | strokes.bits)


def _square_mask(rng, width, height) -> MaskImage:
    w = int(rng.integers(max(width // 8, 1), max(3 * width // 4, 2)))
    h = int(rng.integers(max(height // 8, 1), max(3 * height // 4, 2)))
    x0 = int(rng.integers(0, max(width - w, 1)))
    y0 = int(rng.integers(0, max(height - h, 1)))
    bits = np.zeros((height, width), dtype=bool)
    bits[y0 : y0 + h, x0 : x0 + w] = True
    return MaskImage(bits)


def _stroke_mask(rng, width, height) -> MaskImage:
    bits = np.zeros((height, width), dtype=bool)
    for _ in range(int(rng.integers(1, 4))):
        x = rng.uniform(0, width)
        y = rng.uniform(0, height)
        angle = rng.uniform(0, 2 * np.pi)
        for _ in range(int(rng.integers(4, 13))):
            angle += rng.normal(scale=0.5)
            step = rng.uniform(1.0, max(width, height) / 10.0)
            nx, ny = x + step * np.cos(angle), y + step * np.sin(angle)
            _draw_segment(bits, x, y, nx, ny)
            x = float(np.clip(nx, 0, width - 1))
            y = float(np.clip(ny, 0, height - 1))
    thickness = int(rng.integers(1, max(min(width, height) // 32, 1) + 1))
    return dilate_mask(MaskImage(bits), thickness)


def _draw_segment(bits, x0, y0, x1, y1):
    height, width = bits.shape
    steps = max(int(np.hypot(x1 - x0, y1 - y0) * 2), 1)
    for s in range(steps + 1):
        f = s / steps
        px = int(round(x0 + f * (x1 - x0)))
        py = int(round(y0 + f * (y1 - y0)))
        if 0 <= px < width and 0 <= py < height:
            bits[py, px] = True
