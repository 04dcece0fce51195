"""Linear-beta diffusion noise schedule.

The cumulative signal fraction ``alpha_bar[t]`` drives both the forward
noising identity ``z_t = sqrt(alpha_bar_t) z + sqrt(1 - alpha_bar_t) eps`` and
DDIM sampling. Timesteps are 1-based; t = 0 is the clean endpoint with
alpha_bar = 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidArgument

DEFAULT_T = 1000
DEFAULT_BETA_START = 8.5e-4
DEFAULT_BETA_END = 0.012


@dataclass(frozen=True)
class DiffusionSchedule:
    alpha_bar: np.ndarray  # (T,), entry i corresponds to timestep i+1

    def __post_init__(self):
        arr = np.asarray(self.alpha_bar, dtype=np.float64)
        object.__setattr__(self, "alpha_bar", arr)
        if arr.ndim != 1 or arr.size < 1:
            raise InvalidArgument("alpha_bar must be a non-empty 1-D array")
        if np.any(arr <= 0.0) or np.any(arr > 1.0):
            raise InvalidArgument("alpha_bar values must lie in (0, 1]")
        if np.any(np.diff(arr) >= 0.0):
            raise InvalidArgument("alpha_bar must be strictly decreasing")

    @property
    def num_steps(self) -> int:
        return len(self.alpha_bar)

    def alpha_bar_at(self, t: int) -> float:
        """Cumulative signal fraction at 1-based timestep t (t = 0 -> 1.0)."""
        if t == 0:
            return 1.0
        if not 1 <= t <= self.num_steps:
            raise InvalidArgument(f"timestep {t} outside [0, {self.num_steps}]")
        return float(self.alpha_bar[t - 1])

    def signal_scale(self, t: int) -> float:
        """sqrt(alpha_bar_t): weight of the clean latent in the noising map."""
        return float(np.sqrt(self.alpha_bar_at(t)))

    def noise_scale(self, t: int) -> float:
        """sqrt(1 - alpha_bar_t): weight of the injected noise."""
        return float(np.sqrt(1.0 - self.alpha_bar_at(t)))


def make_schedule(
    num_steps: int = DEFAULT_T,
    beta_start: float = DEFAULT_BETA_START,
    beta_end: float = DEFAULT_BETA_END,
) -> DiffusionSchedule:
    """Linear beta schedule; alpha_bar is the running product of (1 - beta)."""
    if num_steps < 1:
        raise InvalidArgument(f"schedule needs at least one step, got {num_steps}")
    if not (0.0 < beta_start <= beta_end < 1.0):
        raise InvalidArgument(
            f"betas must satisfy 0 < start <= end < 1, got [{beta_start}, {beta_end}]"
        )
    betas = np.linspace(beta_start, beta_end, num_steps)
    return DiffusionSchedule(alpha_bar=np.cumprod(1.0 - betas))
