"""Gaussian scene data model.

A scene is an ordered set of anisotropic 3D Gaussians. Parameters follow the
common splatting storage convention so scenes loaded from standard PLY files
render without re-fitting:

  * ``opacities`` are logits (sigmoid maps to the (0, 1) density),
  * ``log_scales`` are log world-space standard deviations (exp maps to size),
  * ``sh`` are spherical-harmonic color coefficients, ``(K, 3)`` per Gaussian
    with ``K = (degree + 1)**2``.

Scenes are value types: operations return new scenes and never mutate their
input, so a scene can be shared read-only across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgument

SH_DC_SCALE = 0.28209479177387814  # degree-0 SH basis constant


def sh_coeff_count(sh_degree: int) -> int:
    return (sh_degree + 1) ** 2


@dataclass
class Gaussian3D:
    """A single Gaussian: a view into (or element of) a scene."""

    position: np.ndarray  # (3,) world units
    rotation: np.ndarray  # (4,) quaternion (w, x, y, z); normalized before use
    scale: np.ndarray  # (3,) log scales
    opacity: float  # logit
    sh: np.ndarray  # (K, 3) SH coefficients, DC first


def normalize_quaternions(quats: np.ndarray) -> np.ndarray:
    """Return unit quaternions; zero-norm inputs map to identity."""
    q = np.asarray(quats, dtype=np.float64)
    norms = np.linalg.norm(q, axis=-1, keepdims=True)
    out = np.where(norms > 1e-12, q / np.where(norms == 0.0, 1.0, norms), 0.0)
    if np.any(norms <= 1e-12):
        out = out.copy()
        out[norms[..., 0] <= 1e-12] = np.array([1.0, 0.0, 0.0, 0.0])
    return out


@dataclass
class GaussianScene:
    """Array-backed ordered collection of 3D Gaussians.

    Arrays are float64 and share the leading axis (one row per Gaussian).
    """

    positions: np.ndarray = field(default_factory=lambda: np.zeros((0, 3)))
    rotations: np.ndarray = field(default_factory=lambda: np.zeros((0, 4)))
    log_scales: np.ndarray = field(default_factory=lambda: np.zeros((0, 3)))
    opacities: np.ndarray = field(default_factory=lambda: np.zeros((0,)))
    sh: np.ndarray = field(default_factory=lambda: np.zeros((0, 1, 3)))
    sh_degree: int = 0

    def __post_init__(self):
        self.positions = np.atleast_2d(np.asarray(self.positions, dtype=np.float64))
        if self.positions.size == 0:
            self.positions = self.positions.reshape(0, 3)
        self.rotations = np.asarray(self.rotations, dtype=np.float64).reshape(-1, 4)
        self.log_scales = np.asarray(self.log_scales, dtype=np.float64).reshape(-1, 3)
        self.opacities = np.asarray(self.opacities, dtype=np.float64).reshape(-1)
        k = sh_coeff_count(self.sh_degree)
        self.sh = np.asarray(self.sh, dtype=np.float64).reshape(-1, k, 3)
        n = len(self.positions)
        for name, arr in (
            ("rotations", self.rotations),
            ("log_scales", self.log_scales),
            ("opacities", self.opacities),
            ("sh", self.sh),
        ):
            if len(arr) != n:
                raise InvalidArgument(
                    f"scene field '{name}' has {len(arr)} rows, expected {n}"
                )

    def __len__(self) -> int:
        return len(self.positions)

    def __getitem__(self, i: int) -> Gaussian3D:
        return Gaussian3D(
            position=self.positions[i],
            rotation=self.rotations[i],
            scale=self.log_scales[i],
            opacity=float(self.opacities[i]),
            sh=self.sh[i],
        )

    @property
    def bounds(self) -> tuple[np.ndarray, np.ndarray] | None:
        """Axis-aligned bounding box of positions, or None for an empty scene."""
        if len(self) == 0:
            return None
        return self.positions.min(axis=0), self.positions.max(axis=0)

    @property
    def extent(self) -> float:
        """Radius of the bounding sphere around the position centroid."""
        if len(self) == 0:
            return 0.0
        center = self.positions.mean(axis=0)
        return float(np.linalg.norm(self.positions - center, axis=1).max())

    def copy(self) -> "GaussianScene":
        return GaussianScene(
            positions=self.positions.copy(),
            rotations=self.rotations.copy(),
            log_scales=self.log_scales.copy(),
            opacities=self.opacities.copy(),
            sh=self.sh.copy(),
            sh_degree=self.sh_degree,
        )

    def select(self, keep: np.ndarray) -> "GaussianScene":
        """New scene containing the rows selected by a bool mask or index array."""
        return GaussianScene(
            positions=self.positions[keep],
            rotations=self.rotations[keep],
            log_scales=self.log_scales[keep],
            opacities=self.opacities[keep],
            sh=self.sh[keep],
            sh_degree=self.sh_degree,
        )

    def concatenate(self, other: "GaussianScene") -> "GaussianScene":
        """Append another scene's Gaussians after this scene's (same SH degree)."""
        if other.sh_degree != self.sh_degree:
            raise InvalidArgument(
                f"cannot concatenate scenes with SH degrees "
                f"{self.sh_degree} and {other.sh_degree}"
            )
        return GaussianScene(
            positions=np.concatenate([self.positions, other.positions]),
            rotations=np.concatenate([self.rotations, other.rotations]),
            log_scales=np.concatenate([self.log_scales, other.log_scales]),
            opacities=np.concatenate([self.opacities, other.opacities]),
            sh=np.concatenate([self.sh, other.sh]),
            sh_degree=self.sh_degree,
        )

    def state_hash(self) -> str:
        """Deterministic digest of all parameter arrays (for parity checks)."""
        import hashlib

        h = hashlib.sha256()
        h.update(str(self.sh_degree).encode())
        for arr in (
            self.positions,
            self.rotations,
            self.log_scales,
            self.opacities,
            self.sh,
        ):
            h.update(np.ascontiguousarray(arr, dtype=np.float64).tobytes())
        return h.hexdigest()


def empty_scene(sh_degree: int = 0) -> GaussianScene:
    k = sh_coeff_count(sh_degree)
    return GaussianScene(
        positions=np.zeros((0, 3)),
        rotations=np.zeros((0, 4)),
        log_scales=np.zeros((0, 3)),
        opacities=np.zeros((0,)),
        sh=np.zeros((0, k, 3)),
        sh_degree=sh_degree,
    )
