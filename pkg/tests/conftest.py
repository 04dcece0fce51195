import numpy as np
import pytest

from gsfill.camera import CameraPose
from gsfill.scene import GaussianScene


def make_camera(width=16, height=16, fx=60.0, fy=60.0, w2c=None, name="cam"):
    return CameraPose(
        fx=fx,
        fy=fy,
        cx=(width - 1) / 2.0,
        cy=(height - 1) / 2.0,
        width=width,
        height=height,
        world_to_camera=np.eye(4) if w2c is None else w2c,
        name=name,
    )


def random_scene(rng, n, sh_degree=1, z_range=(2.0, 6.0), spread=0.7,
                 opacity_range=(-2.0, 1.0), scale_range=(0.02, 0.15)):
    """Random Gaussians in front of an identity-pose camera.

    SH coefficients are kept small enough that evaluated colors stay strictly
    inside (0, 1), so the color clip never kinks gradient checks.
    """
    k = (sh_degree + 1) ** 2
    z = rng.uniform(*z_range, size=n)
    xy = rng.uniform(-spread, spread, size=(n, 2)) * z[:, None] / 6.0
    positions = np.column_stack([xy, z])
    rotations = rng.normal(size=(n, 4))  # raw, unnormalized on purpose
    log_scales = np.log(rng.uniform(*scale_range, size=(n, 3)))
    opacities = rng.uniform(*opacity_range, size=n)
    sh = np.zeros((n, k, 3))
    sh[:, 0, :] = rng.uniform(-0.5, 0.5, size=(n, 3))
    if k > 1:
        sh[:, 1:, :] = rng.uniform(-0.04, 0.04, size=(n, k - 1, 3))
    return GaussianScene(
        positions=positions,
        rotations=rotations,
        log_scales=log_scales,
        opacities=opacities,
        sh=sh,
        sh_degree=sh_degree,
    )


def sign_safe_target(rng, scene, pose, offset=0.3):
    """Target for gradient checks: the render shifted by a random +-offset
    pattern, so the L1 residual never changes sign under the finite-difference
    step (central differences are only valid away from the |.| kink)."""
    from gsfill.render import render

    base = render(scene, pose).color
    signs = rng.choice([-1.0, 1.0], size=base.shape)
    return base + offset * signs


@pytest.fixture
def rng():
    return np.random.default_rng(7)
