"""Single-view and progressive inpainting orchestration.

One step runs: render depth at the reference view, complete the masked
region, unproject to a colored point cloud, filter outliers, merge into the
scene, and fine-tune with Adam against the inpainted reference image. The
progressive mode folds that step over an ordered list of reference views,
shrinking each subsequent mask to the pixels the scene still fails to cover.

All randomness flows through explicit generators, so a fixed seed gives
bit-identical output scenes.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .camera import CameraPose
from .depth.complete import HarmonicBackend, complete_depth
from .depthmap import DepthMap
from .errors import GsfillError, InvalidArgument, OptimizationDiverged
from .gradients import loss_and_gradients
from .masks import MaskImage
from .pointcloud import (
    ColoredPointCloud,
    edge_outlier_keep_mask,
    knn_mean_distances,
    merge_into_scene,
    radius_outlier_filter,
    unproject,
)
from .render import DEFAULT_VALIDITY_THRESHOLD, render
from .scene import GaussianScene
from .ssim import ssim_map

PSNR_CAP_DB = 99.0


@dataclass
class InpaintConfig:
    """Knobs for one inpainting run; mirrored by the TOML config format."""

    dssim_weight: float = 0.2  # loss = (1-w)*L1 + w*D-SSIM
    finetune_iters: int = 150  # useful band is roughly 50-150
    lr_warmup_iters: int = 10  # linear ramp; Adam's first steps are full-size
    ddim_steps: int = 50
    dilation_radius: int = 9
    # per-class Adam learning rates; position is additionally scaled by the
    # scene extent (splatting convention)
    lr_position: float = 1.6e-4
    lr_sh: float = 2.5e-3
    lr_opacity: float = 5e-2
    lr_scale: float = 5e-3
    lr_rotation: float = 1e-3
    # outlier handling; None thresholds default to 2x the median distance to
    # the 3 nearest neighbors in the unprojected cloud
    outlier_min_neighbors: int = 8
    outlier_dist_threshold: float | None = None
    outlier_radius: float | None = None
    filter_new_cloud: bool = True
    clean_scene_edges: bool = True
    # new-Gaussian initialization
    init_opacity: float = 0.1
    scale_mode: str = "knn"
    # misc
    backend: str = "harmonic"
    freeze_original: bool = False
    background: tuple[float, float, float] = (0.0, 0.0, 0.0)
    validity_threshold: float = DEFAULT_VALIDITY_THRESHOLD
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.dssim_weight <= 1.0:
            raise InvalidArgument(
                f"dssim_weight must be in [0, 1], got {self.dssim_weight}"
            )
        if self.finetune_iters < 1:
            raise InvalidArgument(
                f"finetune_iters must be >= 1, got {self.finetune_iters}"
            )

    @classmethod
    def from_dict(cls, data: dict) -> "InpaintConfig":
        data = dict(data)
        if "lambda" in data:  # accepted alias for the loss mix
            data["dssim_weight"] = data.pop("lambda")
        if "background" in data:
            data["background"] = tuple(data["background"])
        return cls(**data)


@dataclass
class ReferenceView:
    pose: CameraPose
    mask: MaskImage
    image: np.ndarray  # (H, W, 3) inpainted reference RGB

    def __post_init__(self):
        self.image = np.asarray(self.image, dtype=np.float64)
        if self.image.shape != (self.pose.height, self.pose.width, 3):
            raise InvalidArgument(
                f"reference image {self.image.shape} does not match view "
                f"{self.pose.height}x{self.pose.width}"
            )
        if (self.mask.height, self.mask.width) != (self.pose.height, self.pose.width):
            raise InvalidArgument("reference mask does not match view size")


@dataclass
class StepReport:
    no_op: bool = False
    timings: dict = field(default_factory=dict)  # stage -> seconds
    losses: list = field(default_factory=list)  # fine-tune loss curve
    masked_pixels: int = 0
    points_unprojected: int = 0
    points_filtered: int = 0
    scene_gaussians_removed: int = 0
    uncovered_pixels: int = 0  # inside the mask, after the step
    # stage artifacts (not serialized)
    depth: "DepthMap | None" = None
    cloud: "ColoredPointCloud | None" = None

    def to_dict(self) -> dict:
        return {
            "no_op": self.no_op,
            "timings": self.timings,
            "losses": self.losses,
            "masked_pixels": self.masked_pixels,
            "points_unprojected": self.points_unprojected,
            "points_filtered": self.points_filtered,
            "scene_gaussians_removed": self.scene_gaussians_removed,
            "uncovered_pixels": self.uncovered_pixels,
        }


@dataclass
class StepRecord:
    view_name: str
    report: StepReport
    scene_after: GaussianScene
    depth: DepthMap | None = None
    cloud: ColoredPointCloud | None = None


@dataclass
class InpaintSession:
    """Append-only history of progressive steps."""

    initial_scene: GaussianScene
    steps: list[StepRecord] = field(default_factory=list)

    @property
    def current_scene(self) -> GaussianScene:
        return self.steps[-1].scene_after if self.steps else self.initial_scene


class StageFailure(GsfillError):
    """A pipeline stage failed; carries the stage tag and partial session."""

    def __init__(self, stage: str, original: Exception, session=None):
        super().__init__(f"stage '{stage}' failed: {original}")
        self.stage = stage
        self.original = original
        self.session = session


class _Adam:
    def __init__(self, beta1=0.9, beta2=0.999, eps=1e-8):
        self.beta1, self.beta2, self.eps = beta1, beta2, eps
        self.m: dict = {}
        self.v: dict = {}
        self.t = 0

    def step(self, params: dict, grads: dict, lrs: dict) -> None:
        self.t += 1
        bc1 = 1.0 - self.beta1**self.t
        bc2 = 1.0 - self.beta2**self.t
        for name, p in params.items():
            g = grads[name]
            m = self.m.setdefault(name, np.zeros_like(p))
            v = self.v.setdefault(name, np.zeros_like(p))
            m *= self.beta1
            m += (1 - self.beta1) * g
            v *= self.beta2
            v += (1 - self.beta2) * g * g
            p -= lrs[name] * (m / bc1) / (np.sqrt(v / bc2) + self.eps)


def finetune(
    scene: GaussianScene,
    target_rgb: np.ndarray,
    pose: CameraPose,
    cfg: InpaintConfig,
    freeze_first: int = 0,
) -> tuple[GaussianScene, list[float]]:
    """Adam-optimize all Gaussian parameters against one view.

    The Gaussian count never changes (no densification or pruning). With
    ``freeze_first`` > 0 the leading rows keep their parameters (gradients
    zeroed), which freezes the pre-existing scene.
    """
    target = np.asarray(target_rgb, dtype=np.float64)
    tuned = scene.copy()
    extent = tuned.extent or 1.0
    lrs = {
        "position": cfg.lr_position * extent,
        "rotation": cfg.lr_rotation,
        "scale": cfg.lr_scale,
        "opacity": cfg.lr_opacity,
        "sh": cfg.lr_sh,
    }
    params = {
        "position": tuned.positions,
        "rotation": tuned.rotations,
        "scale": tuned.log_scales,
        "opacity": tuned.opacities,
        "sh": tuned.sh,
    }
    opt = _Adam()
    losses: list[float] = []
    for it in range(cfg.finetune_iters):
        loss, grads = loss_and_gradients(
            tuned, pose, target, cfg.dssim_weight, cfg.background
        )
        if not np.isfinite(loss):
            raise OptimizationDiverged("fine-tune loss is not finite", iteration=it)
        losses.append(float(loss))
        grad_arrays = {
            "position": grads.position,
            "rotation": grads.rotation,
            "scale": grads.scale,
            "opacity": grads.opacity,
            "sh": grads.sh,
        }
        if freeze_first > 0:
            for arr in grad_arrays.values():
                arr[:freeze_first] = 0.0
        warm = min(1.0, (it + 1) / max(cfg.lr_warmup_iters, 1))
        opt.step(params, grad_arrays, {k: v * warm for k, v in lrs.items()})
    return tuned, losses


def inpaint_single_view(
    scene: GaussianScene,
    ref: ReferenceView,
    cfg: InpaintConfig,
    rng: np.random.Generator | None = None,
    backend=None,
) -> tuple[GaussianScene, StepReport]:
    """Run the full single-reference pipeline; returns the new scene and a
    per-stage report. An empty mask is a no-op."""
    report = StepReport(masked_pixels=ref.mask.count)
    if ref.mask.is_empty():
        report.no_op = True
        return scene, report
    if backend is None:
        backend = HarmonicBackend()
    rng = rng if rng is not None else np.random.default_rng(cfg.seed)

    def timed(stage, fn, *args, **kwargs):
        start = time.perf_counter()
        try:
            result = fn(*args, **kwargs)
        except Exception as e:
            raise StageFailure(stage, e) from e
        report.timings[stage] = time.perf_counter() - start
        return result

    depth = timed(
        "render_depth",
        lambda: render(
            scene, ref.pose,
            background=cfg.background,
            normalize_by_alpha=True,
            validity_threshold=cfg.validity_threshold,
        ).depth,
    )
    completed = timed(
        "complete_depth", complete_depth, depth, ref.image, ref.mask, backend, rng
    )
    cloud = timed("unproject", unproject, completed, ref.image, ref.mask, ref.pose)
    report.points_unprojected = len(cloud)

    knn_med = float(np.median(knn_mean_distances(cloud.xyz)))
    radius = cfg.outlier_radius if cfg.outlier_radius is not None else 2.0 * knn_med
    dist_threshold = (
        cfg.outlier_dist_threshold
        if cfg.outlier_dist_threshold is not None
        else 2.0 * knn_med
    )

    def filter_stage():
        kept = cloud
        base = scene
        if cfg.filter_new_cloud and len(cloud) > cfg.outlier_min_neighbors:
            kept, removed = radius_outlier_filter(
                cloud, radius, cfg.outlier_min_neighbors
            )
            report.points_filtered = len(removed)
            if len(kept) == 0:
                kept = cloud  # degenerate filter; keep the raw cloud
                report.points_filtered = 0
        if cfg.clean_scene_edges and len(scene) > 0 and len(kept) > 0:
            keep_mask = edge_outlier_keep_mask(
                kept.xyz, scene.positions, dist_threshold, radius,
                cfg.outlier_min_neighbors,
            )
            report.scene_gaussians_removed = int((~keep_mask).sum())
            base = scene.select(keep_mask)
        return kept, base

    cloud_kept, scene_base = timed("filter_outliers", filter_stage)
    merged = timed(
        "merge", merge_into_scene, scene_base, cloud_kept,
        cfg.scale_mode, 0.01, cfg.init_opacity,
    )
    freeze = len(scene_base) if cfg.freeze_original else 0
    tuned, losses = timed(
        "finetune", finetune, merged, ref.image, ref.pose, cfg, freeze
    )
    report.losses = losses
    report.uncovered_pixels = count_uncovered(tuned, ref.pose, ref.mask, cfg)
    report.depth = completed
    report.cloud = cloud_kept
    return tuned, report


def count_uncovered(
    scene: GaussianScene, pose: CameraPose, mask: MaskImage, cfg: InpaintConfig
) -> int:
    """Masked pixels the scene still fails to cover (low accumulated alpha)."""
    out = render(scene, pose, background=cfg.background,
                 validity_threshold=cfg.validity_threshold)
    return int((mask.bits & (out.alpha_acc < cfg.validity_threshold)).sum())


def progressive_inpaint(
    scene: GaussianScene,
    refs: list[ReferenceView],
    cfg: InpaintConfig,
    rng: np.random.Generator | None = None,
    backend=None,
) -> tuple[GaussianScene, InpaintSession]:
    """Fold the single-view pipeline over ordered reference views.

    From the second view on, the working mask shrinks to the pixels of the
    original mask the current scene still leaves uncovered. Stage failures
    abort but carry the partial session on the raised StageFailure.
    """
    if not refs:
        raise InvalidArgument("progressive_inpaint needs at least one reference")
    rng = rng if rng is not None else np.random.default_rng(cfg.seed)
    session = InpaintSession(initial_scene=scene)
    current = scene
    for k, ref in enumerate(refs):
        work_mask = ref.mask
        if k > 0:
            uncovered = render(
                current, ref.pose, background=cfg.background,
                validity_threshold=cfg.validity_threshold,
            ).alpha_acc < cfg.validity_threshold
            work_mask = MaskImage(ref.mask.bits & uncovered)
        step_ref = ReferenceView(pose=ref.pose, mask=work_mask, image=ref.image)
        try:
            current, report = inpaint_single_view(
                current, step_ref, cfg, rng, backend
            )
        except StageFailure as e:
            e.session = session
            raise
        session.steps.append(
            StepRecord(
                view_name=ref.pose.name,
                report=report,
                scene_after=current,
                depth=report.depth,
                cloud=report.cloud,
            )
        )
    return current, session


@dataclass
class ViewScore:
    view: str
    psnr: float
    ssim: float


@dataclass
class EvalReport:
    per_view: list[ViewScore]
    mean_psnr: float
    mean_ssim: float

    def to_dict(self) -> dict:
        return {
            "per_view": [vars(v) for v in self.per_view],
            "mean_psnr": self.mean_psnr,
            "mean_ssim": self.mean_ssim,
        }


def masked_psnr(image: np.ndarray, reference: np.ndarray, mask: np.ndarray) -> float:
    """PSNR over masked pixels (unit dynamic range), capped at 99 dB."""
    diff = (image - reference)[mask]
    mse = float(np.mean(diff * diff))
    if mse <= 0.0:
        return PSNR_CAP_DB
    return min(10.0 * np.log10(1.0 / mse), PSNR_CAP_DB)


def masked_ssim(image: np.ndarray, reference: np.ndarray, mask: np.ndarray) -> float:
    """Mean of the SSIM map restricted to masked pixels."""
    smap = ssim_map(image, reference)
    return float(smap[mask].mean())


def evaluate_views(
    scene: GaussianScene,
    held_out: list[tuple[CameraPose, np.ndarray, MaskImage]],
    cfg: InpaintConfig | None = None,
) -> EvalReport:
    """PSNR/SSIM of renders against ground truth inside each view's mask."""
    if not held_out:
        raise InvalidArgument("evaluate_views needs at least one view")
    cfg = cfg or InpaintConfig()
    scores = []
    for pose, gt_image, mask in held_out:
        out = render(scene, pose, background=cfg.background)
        gt = np.asarray(gt_image, dtype=np.float64)
        scores.append(
            ViewScore(
                view=pose.name,
                psnr=masked_psnr(out.color, gt, mask.bits),
                ssim=masked_ssim(out.color, gt, mask.bits),
            )
        )
    return EvalReport(
        per_view=scores,
        mean_psnr=float(np.mean([s.psnr for s in scores])),
        mean_ssim=float(np.mean([s.ssim for s in scores])),
    )
