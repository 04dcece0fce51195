import numpy as np
import pytest

from gsfill.gradients import loss_and_gradients
from gsfill.render import render
from gsfill.scene import GaussianScene, empty_scene
from gsfill.ssim import dssim

from conftest import make_camera, random_scene, sign_safe_target


def forward_loss(scene, pose, target, lam):
    """Forward-only loss via the public render / dssim surface."""
    image = render(scene, pose).color
    value = (1.0 - lam) * float(np.abs(image - target).mean())
    if lam > 0.0:
        value += lam * dssim(image, target)
    return value


def fd_gradients(scene, pose, target, lam):
    """Central finite differences over every scene parameter."""
    arrays = {
        "position": scene.positions,
        "rotation": scene.rotations,
        "scale": scene.log_scales,
        "opacity": scene.opacities,
        "sh": scene.sh,
    }
    grads = {}
    for name, arr in arrays.items():
        g = np.zeros_like(arr)
        flat = arr.reshape(-1)
        gflat = g.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            h = 1e-4 * max(1.0, abs(orig))
            flat[i] = orig + h
            up = forward_loss(scene, pose, target, lam)
            flat[i] = orig - h
            down = forward_loss(scene, pose, target, lam)
            flat[i] = orig
            gflat[i] = (up - down) / (2.0 * h)
        grads[name] = g
    return grads


def relative_error(analytic, numeric):
    denom = max(np.linalg.norm(numeric), 1e-10)
    return np.linalg.norm(analytic - numeric) / denom


CLASSES = ("position", "rotation", "scale", "opacity", "sh")


def check_scene(scene, pose, target, lam, tol=1e-3):
    loss, grads = loss_and_gradients(scene, pose, target, lam)
    assert loss == pytest.approx(forward_loss(scene, pose, target, lam), abs=1e-12)
    fd = fd_gradients(scene, pose, target, lam)
    analytic = {
        "position": grads.position,
        "rotation": grads.rotation,
        "scale": grads.scale,
        "opacity": grads.opacity,
        "sh": grads.sh,
    }
    for name in CLASSES:
        err = relative_error(analytic[name], fd[name])
        assert err < tol, f"{name} gradient off by {err:.2e} (lambda={lam})"


def test_identical_target_gives_zero_loss_and_gradients(rng):
    pose = make_camera()
    scene = random_scene(rng, 4, sh_degree=1)
    target = render(scene, pose).color
    loss, grads = loss_and_gradients(scene, pose, target, lam=0.2)
    assert loss == pytest.approx(0.0, abs=1e-12)
    for arr in (grads.position, grads.rotation, grads.scale, grads.opacity, grads.sh):
        assert np.abs(arr).max() < 1e-9


def test_single_splat_dc_gradient_l1(rng):
    pose = make_camera()
    scene = random_scene(rng, 1, sh_degree=0)
    target = sign_safe_target(rng, scene, pose)
    loss, grads = loss_and_gradients(scene, pose, target, lam=0.0)
    fd = fd_gradients(scene, pose, target, 0.0)
    assert relative_error(grads.sh, fd["sh"]) < 1e-5


def test_l1_only_five_splats(rng):
    pose = make_camera()
    scene = random_scene(rng, 5, sh_degree=1)
    target = sign_safe_target(rng, scene, pose)
    check_scene(scene, pose, target, lam=0.0)


def test_default_lambda_five_splats(rng):
    pose = make_camera()
    scene = random_scene(rng, 5, sh_degree=1)
    target = sign_safe_target(rng, scene, pose)
    check_scene(scene, pose, target, lam=0.2)


def test_dssim_only(rng):
    pose = make_camera()
    scene = random_scene(rng, 3, sh_degree=0)
    target = sign_safe_target(rng, scene, pose)
    check_scene(scene, pose, target, lam=1.0)


def test_degree_three_sh_gradients(rng):
    pose = make_camera()
    scene = random_scene(rng, 2, sh_degree=3)
    target = sign_safe_target(rng, scene, pose)
    check_scene(scene, pose, target, lam=0.2)


def test_empty_scene_loss_against_background(rng):
    pose = make_camera(width=8, height=8)
    target = rng.uniform(size=(8, 8, 3))
    loss, grads = loss_and_gradients(empty_scene(), pose, target, lam=0.0)
    assert loss == pytest.approx(float(np.abs(target).mean()))
    assert grads.position.shape == (0, 3)


def test_culled_gaussians_have_zero_gradients(rng):
    pose = make_camera()
    scene = random_scene(rng, 3, sh_degree=0)
    scene.positions[1] = [0.0, 0.0, -5.0]  # behind the camera
    target = sign_safe_target(rng, scene, pose)
    _, grads = loss_and_gradients(scene, pose, target, lam=0.2)
    assert np.all(grads.position[1] == 0.0)
    assert np.all(grads.sh[1] == 0.0)
    assert grads.opacity[1] == 0.0
