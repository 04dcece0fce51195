"""gsfill: inpainting for 3D Gaussian-splat scenes.

Completes a reference-view depth map, unprojects it into a colored point
cloud, fuses the points into the scene, and briefly fine-tunes the Gaussians
against an inpainted reference image. A progressive mode iterates the process
over an ordered set of reference views for occlusion-heavy scenes.
"""

__version__ = "0.1.0"

from .camera import CameraPose, load_cameras, save_cameras_json
from .depth.complete import (
    DiffusionBackend,
    HarmonicBackend,
    complete_depth,
    harmonic_complete,
)
from .depth.ddim import ddim_sample
from .depth.latent import LatentStack, OrthoBlockCodec, assemble_latent
from .depth.normalize import NormParams, denormalize_depth, normalize_depth
from .depth.schedule import DiffusionSchedule, make_schedule
from .depth.training import diffusion_loss, generate_training_mask
from .depthmap import DepthMap
from .errors import (
    BackendError,
    DegenerateDepth,
    EmptyResult,
    GsfillError,
    InvalidArgument,
    OptimizationDiverged,
    ParseError,
    SchemaError,
    UnsupportedModel,
)
from .gradients import SceneGradients, loss_and_gradients
from .masks import MaskImage, dilate_mask
from .pipeline import (
    EvalReport,
    InpaintConfig,
    InpaintSession,
    ReferenceView,
    StepReport,
    evaluate_views,
    finetune,
    inpaint_single_view,
    progressive_inpaint,
)
from .ply import load_scene_ply, save_scene_ply
from .pointcloud import (
    ColoredPointCloud,
    KdTree,
    edge_outlier_removal,
    merge_into_scene,
    radius_outlier_filter,
    reproject_points,
    unproject,
)
from .project import Splat2D, project_gaussian, project_scene
from .removal import remove_masked_gaussians
from .render import RenderOutput, render
from .scene import Gaussian3D, GaussianScene, empty_scene
from .ssim import dssim, ssim

__all__ = [
    "BackendError",
    "CameraPose",
    "ColoredPointCloud",
    "DegenerateDepth",
    "DepthMap",
    "DiffusionBackend",
    "DiffusionSchedule",
    "EmptyResult",
    "EvalReport",
    "Gaussian3D",
    "GaussianScene",
    "GsfillError",
    "HarmonicBackend",
    "InpaintConfig",
    "InpaintSession",
    "InvalidArgument",
    "KdTree",
    "LatentStack",
    "MaskImage",
    "NormParams",
    "OptimizationDiverged",
    "OrthoBlockCodec",
    "ParseError",
    "ReferenceView",
    "RenderOutput",
    "SceneGradients",
    "SchemaError",
    "Splat2D",
    "StepReport",
    "UnsupportedModel",
    "assemble_latent",
    "complete_depth",
    "ddim_sample",
    "denormalize_depth",
    "diffusion_loss",
    "dilate_mask",
    "dssim",
    "edge_outlier_removal",
    "empty_scene",
    "evaluate_views",
    "finetune",
    "generate_training_mask",
    "harmonic_complete",
    "inpaint_single_view",
    "load_cameras",
    "load_scene_ply",
    "loss_and_gradients",
    "make_schedule",
    "merge_into_scene",
    "normalize_depth",
    "progressive_inpaint",
    "project_gaussian",
    "project_scene",
    "radius_outlier_filter",
    "remove_masked_gaussians",
    "render",
    "reproject_points",
    "save_cameras_json",
    "save_scene_ply",
    "ssim",
    "unproject",
]
