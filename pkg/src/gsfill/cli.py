"""Command-line interface.

Exit codes: 0 success, 1 user error (bad arguments, missing files,
unparseable inputs), 2 stage failure (a pipeline stage raised).
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import numpy as np

from . import imgio
from .camera import load_cameras
from .depth.backend import ExternalCodec, ExternalDenoiser, TensorProcess
from .depth.complete import DiffusionBackend, HarmonicBackend
from .depth.latent import OrthoBlockCodec
from .depth.schedule import make_schedule
from .errors import GsfillError
from .masks import MaskImage, dilate_mask
from .pipeline import (
    InpaintConfig,
    ReferenceView,
    StageFailure,
    evaluate_views,
    inpaint_single_view,
    progressive_inpaint,
)
from .ply import load_scene_ply, save_scene_ply
from .removal import remove_masked_gaussians
from .render import render

click.UsageError.exit_code = 1  # exit code 2 is reserved for stage failures

try:
    import tomllib
except ModuleNotFoundError:  # 3.10
    import tomli as tomllib


def _fail_user(message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(1)


def _fail_stage(message: str):
    click.echo(f"stage failure: {message}", err=True)
    sys.exit(2)


def _load_scene(path):
    try:
        return load_scene_ply(path)
    except (OSError, GsfillError) as e:
        _fail_user(f"cannot load scene {path}: {e}")


def _load_poses(path):
    try:
        return load_cameras(path)
    except (OSError, GsfillError) as e:
        _fail_user(f"cannot load cameras {path}: {e}")


def _find_pose(poses, view_id):
    for pose in poses:
        if pose.name == view_id or Path(pose.name).stem == view_id:
            return pose
    try:
        return poses[int(view_id)]
    except (ValueError, IndexError):
        _fail_user(f"view {view_id!r} not found among {[p.name for p in poses]}")


def _load_config(path) -> InpaintConfig:
    if path is None:
        return InpaintConfig()
    try:
        data = tomllib.loads(Path(path).read_text())
        return InpaintConfig.from_dict(data)
    except (OSError, ValueError, TypeError, tomllib.TOMLDecodeError) as e:
        _fail_user(f"bad config {path}: {e}")


def _make_backend(name, cfg, backend_cmd, codec_kind, ctx_procs):
    if name == "harmonic":
        return HarmonicBackend()
    if name == "diffusion":
        if not backend_cmd:
            _fail_user("--backend diffusion requires --backend-cmd")
        proc = TensorProcess(backend_cmd.split())
        ctx_procs.append(proc)
        if codec_kind == "external":
            codec = ExternalCodec(proc)
        else:
            codec = OrthoBlockCodec()
        return DiffusionBackend(
            codec=codec,
            denoiser=ExternalDenoiser(proc),
            schedule=make_schedule(),
            steps=cfg.ddim_steps,
        )
    _fail_user(f"unknown backend {name!r}")


@click.group()
@click.version_option()
def main():
    """Inpainting toolkit for 3D Gaussian-splat scenes."""


@main.command()
@click.option("--scene", required=True, type=click.Path())
@click.option("--cameras", required=True, type=click.Path())
@click.option("--masks", "masks_dir", required=True, type=click.Path(),
              help="Directory of per-view masks named <view>.png")
@click.option("--out", required=True, type=click.Path())
@click.option("--threshold", default=0.8, show_default=True,
              help="Fraction of mask votes that removes a Gaussian")
@click.option("--dilate", default=9, show_default=True,
              help="Mask dilation radius in pixels")
def remove(scene, cameras, masks_dir, out, threshold, dilate):
    """Remove the Gaussians selected by per-view masks."""
    gs = _load_scene(scene)
    poses = _load_poses(cameras)
    masks_dir = Path(masks_dir)
    views = []
    for pose in poses:
        candidates = [
            masks_dir / f"{pose.name}.png",
            masks_dir / f"{Path(pose.name).stem}.png",
        ]
        path = next((c for c in candidates if c.exists()), None)
        if path is None:
            continue
        mask = dilate_mask(imgio.read_mask(path), dilate)
        views.append((pose, mask))
    if not views:
        _fail_user(f"no masks in {masks_dir} match any camera name")
    try:
        kept, removed = remove_masked_gaussians(gs, views, threshold)
        save_scene_ply(kept, out)
    except GsfillError as e:
        _fail_stage(str(e))
    click.echo(f"removed {removed} of {len(gs)} gaussians "
               f"({len(views)} views voted); wrote {out}")


@main.command()
@click.option("--scene", required=True, type=click.Path())
@click.option("--cameras", required=True, type=click.Path())
@click.option("--ref-view", required=True, help="Camera name or index")
@click.option("--mask", "mask_path", required=True, type=click.Path())
@click.option("--ref-image", required=True, type=click.Path(),
              help="Externally inpainted reference image (PNG)")
@click.option("--backend", default="harmonic", show_default=True,
              type=click.Choice(["harmonic", "diffusion"]))
@click.option("--backend-cmd", default=None,
              help="Command for the external denoiser process")
@click.option("--codec", "codec_kind", default="ortho", show_default=True,
              type=click.Choice(["ortho", "external"]))
@click.option("--config", "config_path", default=None, type=click.Path())
@click.option("--out", required=True, type=click.Path())
@click.option("--seed", default=0, show_default=True)
@click.option("--dilate/--no-dilate", default=True, show_default=True,
              help="Apply the configured mask dilation")
@click.option("--freeze-original", is_flag=True, default=False,
              help="Fine-tune only the newly merged Gaussians")
@click.option("--report", "report_path", default=None, type=click.Path(),
              help="Write the step report as JSON")
def inpaint(scene, cameras, ref_view, mask_path, ref_image, backend,
            backend_cmd, codec_kind, config_path, out, seed, dilate,
            freeze_original, report_path):
    """Single-reference-view inpainting."""
    gs = _load_scene(scene)
    poses = _load_poses(cameras)
    pose = _find_pose(poses, ref_view)
    cfg = _load_config(config_path)
    if freeze_original:
        cfg.freeze_original = True
    try:
        mask = imgio.read_mask(mask_path)
        image = imgio.read_image(ref_image)
    except OSError as e:
        _fail_user(str(e))
    if dilate and cfg.dilation_radius > 0:
        mask = dilate_mask(mask, cfg.dilation_radius)

    procs = []
    try:
        backend_obj = _make_backend(backend, cfg, backend_cmd, codec_kind, procs)
        ref = ReferenceView(pose=pose, mask=mask, image=image)
        rng = np.random.default_rng(seed)
        result, report = inpaint_single_view(gs, ref, cfg, rng, backend_obj)
        save_scene_ply(result, out)
    except StageFailure as e:
        _fail_stage(str(e))
    except GsfillError as e:
        _fail_user(str(e))
    finally:
        for proc in procs:
            proc.close()
    if report_path:
        Path(report_path).write_text(json.dumps(report.to_dict(), indent=2))
    click.echo(
        f"inpainted view {pose.name}: +{report.points_unprojected - report.points_filtered} "
        f"gaussians, final loss {report.losses[-1]:.5f}; wrote {out}"
    )


@main.command()
@click.option("--scene", required=True, type=click.Path())
@click.option("--cameras", required=True, type=click.Path())
@click.option("--refs", "refs_path", required=True, type=click.Path(),
              help="TOML with [[step]] tables: view, mask, image")
@click.option("--backend", default="harmonic", show_default=True,
              type=click.Choice(["harmonic", "diffusion"]))
@click.option("--backend-cmd", default=None)
@click.option("--codec", "codec_kind", default="ortho", show_default=True,
              type=click.Choice(["ortho", "external"]))
@click.option("--config", "config_path", default=None, type=click.Path())
@click.option("--out", required=True, type=click.Path())
@click.option("--seed", default=0, show_default=True)
def progressive(scene, cameras, refs_path, backend, backend_cmd, codec_kind,
                config_path, out, seed):
    """Progressive inpainting over an ordered list of reference views."""
    gs = _load_scene(scene)
    poses = _load_poses(cameras)
    cfg = _load_config(config_path)
    try:
        doc = tomllib.loads(Path(refs_path).read_text())
        steps = doc["step"]
    except (OSError, KeyError, tomllib.TOMLDecodeError) as e:
        _fail_user(f"bad refs file {refs_path}: {e}")

    base = Path(refs_path).parent
    refs = []
    for entry in steps:
        pose = _find_pose(poses, str(entry["view"]))
        try:
            mask = imgio.read_mask(base / entry["mask"])
            image = imgio.read_image(base / entry["image"])
        except OSError as e:
            _fail_user(str(e))
        if cfg.dilation_radius > 0:
            mask = dilate_mask(mask, cfg.dilation_radius)
        refs.append(ReferenceView(pose=pose, mask=mask, image=image))

    procs = []
    try:
        backend_obj = _make_backend(backend, cfg, backend_cmd, codec_kind, procs)
        rng = np.random.default_rng(seed)
        result, session = progressive_inpaint(gs, refs, cfg, rng, backend_obj)
        save_scene_ply(result, out)
    except StageFailure as e:
        _fail_stage(str(e))
    except GsfillError as e:
        _fail_user(str(e))
    finally:
        for proc in procs:
            proc.close()
    for i, step in enumerate(session.steps):
        state = "no-op" if step.report.no_op else (
            f"uncovered {step.report.uncovered_pixels}"
        )
        click.echo(f"step {i + 1} ({step.view_name}): {state}")
    click.echo(f"wrote {out}")


@main.command()
@click.option("--scene", required=True, type=click.Path())
@click.option("--cameras", required=True, type=click.Path())
@click.option("--heldout", "heldout_dir", required=True, type=click.Path(),
              help="Directory with <view>.png ground truth and <view>.mask.png")
@click.option("--json", "as_json", is_flag=True, default=False)
def eval(scene, cameras, heldout_dir, as_json):
    """PSNR/SSIM inside held-out view masks."""
    gs = _load_scene(scene)
    poses = _load_poses(cameras)
    heldout_dir = Path(heldout_dir)
    batch = []
    for pose in poses:
        stem = Path(pose.name).stem
        gt_path = heldout_dir / f"{stem}.png"
        mask_path = heldout_dir / f"{stem}.mask.png"
        if gt_path.exists() and mask_path.exists():
            batch.append((pose, imgio.read_image(gt_path), imgio.read_mask(mask_path)))
    if not batch:
        _fail_user(f"no <view>.png / <view>.mask.png pairs in {heldout_dir}")
    try:
        report = evaluate_views(gs, batch)
    except GsfillError as e:
        _fail_stage(str(e))
    if as_json:
        click.echo(json.dumps(report.to_dict(), indent=2))
    else:
        for score in report.per_view:
            click.echo(f"{score.view}: PSNR {score.psnr:.2f} dB  SSIM {score.ssim:.4f}")
        click.echo(f"mean: PSNR {report.mean_psnr:.2f} dB  SSIM {report.mean_ssim:.4f}")


@main.command("render")
@click.option("--scene", required=True, type=click.Path())
@click.option("--cameras", required=True, type=click.Path())
@click.option("--view", required=True, help="Camera name or index")
@click.option("--mode", default="color", show_default=True,
              type=click.Choice(["color", "depth", "alpha"]))
@click.option("--out", required=True, type=click.Path())
def render_cmd(scene, cameras, view, mode, out):
    """Render one view to PNG (color/alpha) or float TIFF (depth)."""
    gs = _load_scene(scene)
    pose = _find_pose(_load_poses(cameras), view)
    try:
        result = render(gs, pose, normalize_by_alpha=(mode == "depth"))
    except GsfillError as e:
        _fail_stage(str(e))
    if mode == "color":
        imgio.write_image(result.color, out)
    elif mode == "alpha":
        imgio.write_image(result.alpha_acc, out)
    else:
        imgio.write_depth(result.depth, out)
    click.echo(f"wrote {out}")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
@click.option("--frontend", "frontend_dir", default=None, type=click.Path(),
              help="Static studio bundle to serve at /")
def serve(host, port, frontend_dir):
    """Run the local inpainting service."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(frontend_dir=frontend_dir), host=host, port=port)


if __name__ == "__main__":
    main()
