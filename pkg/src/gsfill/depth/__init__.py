"""Affine-invariant depth completion: percentile normalization, latent
assembly, diffusion schedule and DDIM sampling over pluggable backends, a
toy-scale training objective, and a deterministic harmonic baseline."""

from .complete import DiffusionBackend, HarmonicBackend, complete_depth, harmonic_complete
from .ddim import ddim_sample, respaced_timesteps
from .latent import LatentStack, OrthoBlockCodec, assemble_latent, downsample_mask
from .normalize import NormParams, denormalize_depth, normalize_depth
from .schedule import DiffusionSchedule, make_schedule
from .training import diffusion_loss, generate_training_mask

__all__ = [
    "DiffusionBackend",
    "DiffusionSchedule",
    "HarmonicBackend",
    "LatentStack",
    "NormParams",
    "OrthoBlockCodec",
    "assemble_latent",
    "complete_depth",
    "ddim_sample",
    "denormalize_depth",
    "diffusion_loss",
    "downsample_mask",
    "generate_training_mask",
    "harmonic_complete",
    "make_schedule",
    "normalize_depth",
    "respaced_timesteps",
]
