"""Deterministic DDIM sampling over re-spaced timesteps.

Each step predicts the clean latent from the current noise estimate and jumps
directly to the previous grid timestep; the final step lands on t = 0 where
alpha_bar = 1, so the output is the clean-latent estimate itself. Conditioning
channels are held fixed across steps.
"""

from __future__ import annotations

import numpy as np

from ..errors import InvalidArgument
from .latent import LatentStack
from .schedule import DiffusionSchedule


def respaced_timesteps(total: int, num_steps: int) -> list[int]:
    """Evenly spaced descending subsequence of {1..total} including total."""
    if num_steps < 1:
        raise InvalidArgument(f"num_steps must be >= 1, got {num_steps}")
    if num_steps > total:
        raise InvalidArgument(f"num_steps {num_steps} exceeds schedule length {total}")
    ts = np.round(np.linspace(total, 1, num_steps)).astype(int)
    out = [int(ts[0])]
    for t in ts[1:]:
        if int(t) < out[-1]:
            out.append(int(t))
    return out


def ddim_sample(
    denoiser,
    z_img: np.ndarray,
    z_d_masked: np.ndarray,
    m_small: np.ndarray,
    schedule: DiffusionSchedule,
    num_steps: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Sample a 4-channel latent, starting from standard-normal noise."""
    timesteps = respaced_timesteps(schedule.num_steps, num_steps)
    x = rng.standard_normal(z_img.shape)
    for i, t in enumerate(timesteps):
        t_prev = timesteps[i + 1] if i + 1 < len(timesteps) else 0
        stack = LatentStack(
            z_t_d=x, z_d_masked=z_d_masked, z_img=z_img, m_small=m_small
        )
        eps = np.asarray(denoiser.predict_noise(stack, t), dtype=np.float64)
        if eps.shape != x.shape:
            raise InvalidArgument(
                f"denoiser returned shape {eps.shape}, expected {x.shape}"
            )
        x0 = (x - schedule.noise_scale(t) * eps) / schedule.signal_scale(t)
        x = schedule.signal_scale(t_prev) * x0 + schedule.noise_scale(t_prev) * eps
    return x
