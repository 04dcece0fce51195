"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line (run with -s or -rP to see them on success)."""

import time

import numpy as np
import pytest
from click.testing import CliRunner

from gsfill import imgio
from gsfill.camera import save_cameras_json
from gsfill.cli import main as cli_main
from gsfill.depthmap import DepthMap
from gsfill.depth.ddim import ddim_sample
from gsfill.depth.normalize import denormalize_depth, normalize_depth
from gsfill.depth.schedule import make_schedule
from gsfill.depth.training import generate_training_mask
from gsfill.gradients import loss_and_gradients
from gsfill.masks import MaskImage
from gsfill.pipeline import (
    InpaintConfig,
    ReferenceView,
    count_uncovered,
    inpaint_single_view,
    masked_psnr,
    progressive_inpaint,
)
from gsfill.ply import save_scene_ply
from gsfill.pointcloud import (
    ColoredPointCloud,
    edge_outlier_removal,
    radius_outlier_filter,
    reproject_points,
    unproject,
)
from gsfill.render import render
from gsfill.scene import GaussianScene

from conftest import make_camera, random_scene, sign_safe_target
from fixtures import disk_fixture, occlusion_fixture
from oracles import neighbor_counts_reference, percentile_reference, render_reference


def report(name, ok, detail=""):
    suffix = f"  [{detail}]" if detail else ""
    print(f"{'PASS' if ok else 'FAIL'}: {name}{suffix}")
    assert ok, f"{name}{suffix}"


def test_compositing_oracle():
    """Tile renderer equals brute-force per-pixel sorted compositing on 50
    random <=50-splat scenes, max abs diff <= 1e-6; < 10 s total."""
    rng = np.random.default_rng(101)
    pose = make_camera()
    start = time.perf_counter()
    worst = 0.0
    for _ in range(50):
        scene = random_scene(rng, int(rng.integers(1, 51)), sh_degree=1)
        out = render(scene, pose)
        ref_color, ref_depth, ref_alpha = render_reference(scene, pose)
        ref_depth_masked = np.where(ref_alpha > 0.5, ref_depth, 0.0)
        prod_depth = np.where(out.depth.valid, out.depth.depth, 0.0)
        worst = max(
            worst,
            float(np.abs(out.color - ref_color).max()),
            float(np.abs(prod_depth - ref_depth_masked).max()),
            float(np.abs(out.alpha_acc - ref_alpha).max()),
        )
    elapsed = time.perf_counter() - start
    report(
        "compositing oracle (50 scenes, tol 1e-6, <10s)",
        worst <= 1e-6 and elapsed < 10.0,
        f"max diff {worst:.2e}, {elapsed:.1f}s",
    )


def _fd_gradients(scene, pose, target, lam):
    from gsfill.ssim import dssim

    def forward():
        image = render(scene, pose).color
        value = (1.0 - lam) * float(np.abs(image - target).mean())
        if lam > 0.0:
            value += lam * dssim(image, target)
        return value

    arrays = {
        "position": scene.positions, "rotation": scene.rotations,
        "scale": scene.log_scales, "opacity": scene.opacities, "sh": scene.sh,
    }
    grads = {}
    for name, arr in arrays.items():
        g = np.zeros_like(arr)
        flat, gflat = arr.reshape(-1), g.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            h = 1e-4 * max(1.0, abs(orig))
            flat[i] = orig + h
            up = forward()
            flat[i] = orig - h
            down = forward()
            flat[i] = orig
            gflat[i] = (up - down) / (2.0 * h)
        grads[name] = g
    return grads


def test_gradient_suite():
    """Analytic gradients vs central finite differences, lambda in {0, 0.2, 1},
    20 random <=10-splat scenes, relative error <= 1e-3 per class; < 60 s."""
    rng = np.random.default_rng(202)
    pose = make_camera()
    lams = [0.0] * 7 + [0.2] * 7 + [1.0] * 6
    degrees = [0, 1, 2, 3] * 5
    start = time.perf_counter()
    worst = 0.0
    for lam, degree in zip(lams, degrees):
        scene = random_scene(rng, int(rng.integers(1, 11)), sh_degree=degree)
        target = sign_safe_target(rng, scene, pose)
        _, grads = loss_and_gradients(scene, pose, target, lam)
        fd = _fd_gradients(scene, pose, target, lam)
        analytic = {
            "position": grads.position, "rotation": grads.rotation,
            "scale": grads.scale, "opacity": grads.opacity, "sh": grads.sh,
        }
        for name, fd_grad in fd.items():
            denom = max(np.linalg.norm(fd_grad), 1e-10)
            worst = max(worst, np.linalg.norm(analytic[name] - fd_grad) / denom)
    elapsed = time.perf_counter() - start
    report(
        "gradient suite (20 scenes x {0,0.2,1}, tol 1e-3, <60s)",
        worst <= 1e-3 and elapsed < 60.0,
        f"max rel err {worst:.2e}, {elapsed:.1f}s",
    )


def test_normalization_round_trip():
    """denormalize(normalize(d)) within 1e-6 relative on 100 random depth
    maps; percentiles match the full-sort oracle exactly."""
    rng = np.random.default_rng(303)
    worst_rel = 0.0
    percentiles_exact = True
    for _ in range(100):
        h, w = int(rng.integers(8, 41)), int(rng.integers(8, 41))
        vals = rng.uniform(0.1, 20.0, size=(h, w))
        valid = rng.uniform(size=(h, w)) > 0.25
        if valid.sum() < 4:
            valid[:2, :2] = True
        d = DepthMap(np.where(valid, vals, 0.0), valid)
        norm, params = normalize_depth(d)
        back = denormalize_depth(norm, params)
        rel = np.abs(back.depth[valid] - d.depth[valid]) / np.abs(d.depth[valid])
        worst_rel = max(worst_rel, float(rel.max()))
        percentiles_exact &= params.p2 == percentile_reference(vals[valid], 2.0)
        percentiles_exact &= params.p98 == percentile_reference(vals[valid], 98.0)
    report(
        "normalization round trip (100 maps, 1e-6 relative; exact percentiles)",
        worst_rel <= 1e-6 and percentiles_exact,
        f"max rel {worst_rel:.2e}, percentiles exact: {percentiles_exact}",
    )


class _ZeroDenoiser:
    def predict_noise(self, stack, t):
        return np.zeros_like(stack.z_t_d)


class _InversionDenoiser:
    def __init__(self, target, schedule):
        self.target, self.schedule = target, schedule

    def predict_noise(self, stack, t):
        return (stack.z_t_d - self.schedule.signal_scale(t) * self.target) / (
            self.schedule.noise_scale(t)
        )


def test_ddim_closed_forms():
    """Zero denoiser equals x_T / sqrt(alpha_bar_max) within 1e-6; the
    exact-inversion denoiser recovers its target within 1e-5 for step counts
    {1, 5, 10, 50}."""
    rng = np.random.default_rng(404)
    schedule = make_schedule(500, 1e-3, 0.015)
    shape = (4, 6, 6)
    z_img = rng.normal(size=shape)
    z_masked = rng.normal(size=shape)
    m_small = rng.uniform(size=(1, 6, 6))
    target = rng.normal(size=shape)

    worst_zero = 0.0
    worst_inv = 0.0
    for steps in (1, 5, 10, 50):
        out = ddim_sample(_ZeroDenoiser(), z_img, z_masked, m_small, schedule,
                          steps, np.random.default_rng(steps))
        x_init = np.random.default_rng(steps).standard_normal(shape)
        expected = x_init / np.sqrt(schedule.alpha_bar_at(500))
        worst_zero = max(worst_zero, float(np.abs(out - expected).max()))

        out = ddim_sample(_InversionDenoiser(target, schedule), z_img, z_masked,
                          m_small, schedule, steps, np.random.default_rng(steps))
        worst_inv = max(worst_inv, float(np.abs(out - target).max()))
    report(
        "DDIM closed forms (zero: 1e-6; inversion: 1e-5 at {1,5,10,50} steps)",
        worst_zero <= 1e-6 and worst_inv <= 1e-5,
        f"zero {worst_zero:.2e}, inversion {worst_inv:.2e}",
    )


def test_outlier_procedures_match_brute_force():
    """Radius filter and edge removal equal O(N^2) predicate evaluation on
    500-point fixtures, exact set equality."""
    rng = np.random.default_rng(505)
    pts = rng.uniform(-1, 1, size=(500, 3))
    cloud = ColoredPointCloud(pts, np.full((500, 3), 0.5))
    radius, min_neighbors = 0.28, 5
    _, removed = radius_outlier_filter(cloud, radius, min_neighbors)
    counts = neighbor_counts_reference(pts, radius)
    radius_ok = set(removed.tolist()) == set(np.nonzero(counts < min_neighbors)[0])

    new_pts = rng.uniform(-0.4, 1.2, size=(500, 3))
    new_cloud = ColoredPointCloud(new_pts, np.full((500, 3), 0.5))
    dist_threshold = 0.18
    kept = edge_outlier_removal(new_cloud, cloud, dist_threshold, radius,
                                min_neighbors)
    near = np.array([
        np.min(np.linalg.norm(new_pts - p, axis=1)) <= dist_threshold for p in pts
    ])
    expected = pts[~(near & (counts < min_neighbors))]
    edge_ok = kept.xyz.shape == expected.shape and np.array_equal(kept.xyz, expected)
    report(
        "appendix outlier procedures (500 points, exact set equality)",
        radius_ok and edge_ok,
        f"radius {radius_ok}, edge {edge_ok}",
    )


def test_unprojection_round_trip():
    """reproject(unproject(...)): pixel error <= 1e-4 px and depth error
    <= 1e-5 relative over 100 random poses."""
    from gsfill.camera import CameraPose, quat_to_rotmat

    rng = np.random.default_rng(606)
    worst_px, worst_depth = 0.0, 0.0
    for _ in range(100):
        q = rng.normal(size=4)
        q /= np.linalg.norm(q)
        w2c = np.eye(4)
        w2c[:3, :3] = quat_to_rotmat(q)
        w2c[:3, 3] = rng.uniform(-0.5, 0.5, size=3)
        pose = CameraPose(
            fx=rng.uniform(30, 90), fy=rng.uniform(30, 90),
            cx=11.5, cy=9.5, width=24, height=20, world_to_camera=w2c,
        )
        vals = rng.uniform(0.5, 10.0, size=(20, 24))
        valid = rng.uniform(size=(20, 24)) > 0.15
        bits = rng.uniform(size=(20, 24)) > 0.35
        if not (bits & valid).any():
            bits[:] = True
        depth = DepthMap(np.where(valid, vals, 0.0), valid)
        pc = unproject(depth, rng.uniform(size=(20, 24, 3)), MaskImage(bits), pose)
        uvz, kept = reproject_points(pc, pose)
        assert len(kept) == len(pc)
        worst_px = max(
            worst_px,
            float(np.abs(uvz[:, :2] - pc.source_pixel).max()),
        )
        sel = bits & valid
        rel = np.abs(uvz[:, 2] - depth.depth[sel]) / depth.depth[sel]
        worst_depth = max(worst_depth, float(rel.max()))
    report(
        "unprojection round trip (100 poses, 1e-4 px / 1e-5 depth)",
        worst_px <= 1e-4 and worst_depth <= 1e-5,
        f"px {worst_px:.2e}, depth {worst_depth:.2e}",
    )


def test_end_to_end_disk_fixture():
    """Plane-with-disk-hole at 256x256, harmonic backend, ground-truth
    reference: masked PSNR improves >= 10 dB and reaches >= 30 dB within
    <= 150 fine-tune iterations (lambda = 0.2); fine-tune < 60 s."""
    full, holed, pose, mask = disk_fixture(
        size=256, grid=24, disk_world_radius=0.45, sigma_factor=0.55
    )
    reference = render(full, pose).color
    cfg = InpaintConfig(finetune_iters=50, outlier_min_neighbors=4)
    assert cfg.dssim_weight == 0.2
    before = masked_psnr(render(holed, pose).color, reference, mask.bits)
    out, step = inpaint_single_view(
        holed, ReferenceView(pose, mask, reference), cfg,
        rng=np.random.default_rng(0),
    )
    after = masked_psnr(render(out, pose).color, reference, mask.bits)
    finetune_s = step.timings["finetune"]
    report(
        "end-to-end disk fixture (>=30 dB, >=+10 dB, <=150 iters, <60s tune)",
        after >= 30.0 and after - before >= 10.0 and finetune_s < 60.0
        and len(step.losses) <= 150,
        f"PSNR {before:.1f}->{after:.1f} dB, fine-tune {finetune_s:.1f}s "
        f"({len(step.losses)} iters)",
    )


def test_progressive_monotonicity():
    """Two-view occlusion fixture: uncovered masked pixels strictly decrease
    after the second step."""
    full, holed, pose_a, mask_a, pose_b, mask_b = occlusion_fixture(size=48, grid=24)
    cfg = InpaintConfig(finetune_iters=15, outlier_min_neighbors=4)
    refs = [
        ReferenceView(pose_a, mask_a, render(full, pose_a).color),
        ReferenceView(pose_b, mask_b, render(full, pose_b).color),
    ]
    _, session = progressive_inpaint(holed, refs, cfg, np.random.default_rng(1))
    after1 = count_uncovered(session.steps[0].scene_after, pose_b, mask_b, cfg)
    after2 = count_uncovered(session.steps[1].scene_after, pose_b, mask_b, cfg)
    report(
        "progressive monotonicity (uncovered strictly decreases at step 2)",
        after1 > 0 and after2 < after1,
        f"uncovered {after1} -> {after2}",
    )


def test_training_mask_statistics():
    """Full-mask frequency 0.30 +- 0.015 over 10k draws."""
    rng = np.random.default_rng(2024)
    draws = 10_000
    full = sum(
        generate_training_mask(rng, 64, 64).bits.all() for _ in range(draws)
    )
    freq = full / draws
    report(
        "training-mask statistics (0.30 +- 0.015 over 10k draws)",
        abs(freq - 0.30) <= 0.015,
        f"frequency {freq:.4f}",
    )


def test_secondary_service_cli_parity(tmp_path):
    """[SECONDARY] A UI-triggered step yields the same scene as the
    equivalent CLI invocation (byte-identical PLY export, hence equal state
    hashes)."""
    from fastapi.testclient import TestClient

    from gsfill.service import create_app

    full, holed, pose, mask = disk_fixture(size=32, grid=16)
    reference = render(full, pose).color
    save_scene_ply(holed, tmp_path / "scene.ply")
    save_cameras_json([pose], tmp_path / "cams.json")
    imgio.write_mask(mask, tmp_path / "mask.png")
    imgio.write_image(reference, tmp_path / "ref.png")
    (tmp_path / "cfg.toml").write_text(
        "finetune_iters = 8\noutlier_min_neighbors = 4\ndilation_radius = 0\n"
    )
    cli_out = tmp_path / "cli.ply"
    result = CliRunner().invoke(cli_main, [
        "inpaint", "--scene", str(tmp_path / "scene.ply"),
        "--cameras", str(tmp_path / "cams.json"), "--ref-view", "ref",
        "--mask", str(tmp_path / "mask.png"),
        "--ref-image", str(tmp_path / "ref.png"),
        "--config", str(tmp_path / "cfg.toml"), "--seed", "5",
        "--out", str(cli_out),
    ])
    assert result.exit_code == 0, result.output

    client = TestClient(create_app())
    session = client.post("/sessions", json={
        "scene": str(tmp_path / "scene.ply"),
        "cameras": str(tmp_path / "cams.json"),
        "config": {"finetune_iters": 8, "outlier_min_neighbors": 4,
                   "dilation_radius": 0},
    }).json()["session"]
    mask_id = client.post(
        f"/sessions/{session}/mask", params={"view": "ref"},
        content=(tmp_path / "mask.png").read_bytes(),
    ).json()["mask"]
    image_id = client.post(
        f"/sessions/{session}/image", params={"view": "ref"},
        content=(tmp_path / "ref.png").read_bytes(),
    ).json()["image"]
    client.post(f"/sessions/{session}/step", json={
        "view": "ref", "mask": mask_id, "image": image_id, "seed": 5,
    })
    served = client.get(f"/sessions/{session}/scene").content
    ok = served == cli_out.read_bytes()
    report("[secondary] service/CLI step parity (byte-identical scenes)", ok)


def test_secondary_mask_round_trip(tmp_path):
    """[SECONDARY] A painted mask uploaded to the service comes back
    pixel-identical after thresholding (dilation disabled)."""
    from fastapi.testclient import TestClient

    from gsfill.service import create_app

    full, holed, pose, mask = disk_fixture(size=32, grid=16)
    save_scene_ply(holed, tmp_path / "scene.ply")
    save_cameras_json([pose], tmp_path / "cams.json")
    client = TestClient(create_app())
    session = client.post("/sessions", json={
        "scene": str(tmp_path / "scene.ply"),
        "cameras": str(tmp_path / "cams.json"),
        "config": {"dilation_radius": 0},
    }).json()["session"]

    rng = np.random.default_rng(9)
    painted = MaskImage(rng.uniform(size=(32, 32)) > 0.6)
    upload = client.post(
        f"/sessions/{session}/mask", params={"view": "ref"},
        content=imgio.mask_to_png_bytes(painted),
    ).json()
    served = client.get(f"/sessions/{session}/mask/{upload['mask']}").content
    fetched = imgio.mask_from_png_bytes(served)
    ok = np.array_equal(fetched.bits, painted.bits)
    report("[secondary] mask round trip (pixel-identical after threshold)", ok)


def test_cli_determinism(tmp_path):
    """Two CLI runs with identical seeds produce bit-identical output PLYs."""
    full, holed, pose, mask = disk_fixture(size=32, grid=16)
    reference = render(full, pose).color
    save_scene_ply(holed, tmp_path / "scene.ply")
    save_cameras_json([pose], tmp_path / "cams.json")
    imgio.write_mask(mask, tmp_path / "mask.png")
    imgio.write_image(reference, tmp_path / "ref.png")
    (tmp_path / "cfg.toml").write_text(
        "finetune_iters = 10\noutlier_min_neighbors = 4\ndilation_radius = 0\n"
    )
    args = ["inpaint", "--scene", str(tmp_path / "scene.ply"),
            "--cameras", str(tmp_path / "cams.json"), "--ref-view", "ref",
            "--mask", str(tmp_path / "mask.png"),
            "--ref-image", str(tmp_path / "ref.png"),
            "--config", str(tmp_path / "cfg.toml"), "--seed", "42"]
    runner = CliRunner()
    res_a = runner.invoke(cli_main, args + ["--out", str(tmp_path / "a.ply")])
    res_b = runner.invoke(cli_main, args + ["--out", str(tmp_path / "b.ply")])
    ok = (
        res_a.exit_code == 0
        and res_b.exit_code == 0
        and (tmp_path / "a.ply").read_bytes() == (tmp_path / "b.ply").read_bytes()
    )
    report("determinism (seeded CLI runs, bit-identical PLYs)", ok)
