"""Depth completion: resize handling, backends, and the hard composite.

The completion contract: masked pixels are filled, unmasked valid pixels are
returned bit-exactly (the completed region is composited over the original
after everything else), and images larger than 768 px on the longest side are
processed at reduced resolution and resized back.

Two backends: ``harmonic`` solves Laplace's equation over the fill region with
Dirichlet boundary from the surrounding depth (deterministic baseline), and
``diffusion`` runs DDIM over a latent codec and pluggable denoiser.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..depthmap import DepthMap
from ..errors import BackendError, DegenerateDepth, GsfillError, InvalidArgument
from ..masks import MaskImage
from .ddim import ddim_sample
from .latent import LatentCodec, downsample_mask
from .normalize import denormalize_depth, normalize_depth
from .schedule import DiffusionSchedule

MAX_SIDE = 768


def bilinear_resize(arr: np.ndarray, out_h: int, out_w: int,
                    weights: np.ndarray | None = None) -> np.ndarray:
    """Bilinear resample; optional per-pixel weights (e.g. validity) renormalize
    each output sample over its contributing inputs."""
    arr = np.asarray(arr, dtype=np.float64)
    h, w = arr.shape[:2]
    sy = (np.arange(out_h) + 0.5) * h / out_h - 0.5
    sx = (np.arange(out_w) + 0.5) * w / out_w - 0.5
    y0 = np.clip(np.floor(sy).astype(int), 0, h - 1)
    x0 = np.clip(np.floor(sx).astype(int), 0, w - 1)
    y1 = np.clip(y0 + 1, 0, h - 1)
    x1 = np.clip(x0 + 1, 0, w - 1)
    fy = np.clip(sy - y0, 0.0, 1.0)[:, None]
    fx = np.clip(sx - x0, 0.0, 1.0)[None, :]

    def gather(yi, xi):
        return arr[yi[:, None], xi[None, :]]

    w00 = (1 - fy) * (1 - fx)
    w01 = (1 - fy) * fx
    w10 = fy * (1 - fx)
    w11 = fy * fx
    if arr.ndim == 3:
        w00, w01, w10, w11 = (w[..., None] for w in (w00, w01, w10, w11))
    num = (
        w00 * gather(y0, x0) + w01 * gather(y0, x1)
        + w10 * gather(y1, x0) + w11 * gather(y1, x1)
    )
    if weights is None:
        return num
    wgt = np.asarray(weights, dtype=np.float64)

    def gatherw(yi, xi):
        return wgt[yi[:, None], xi[None, :]]

    den = (
        w00 * gatherw(y0, x0) + w01 * gatherw(y0, x1)
        + w10 * gatherw(y1, x0) + w11 * gatherw(y1, x1)
    )
    if arr.ndim == 3:
        den = den[..., 0]
    safe = den > 1e-12
    if arr.ndim == 3:
        return np.where(safe[..., None], num / np.where(safe, den, 1.0)[..., None], 0.0)
    # weighted samples also weight the numerator
    numw = (
        w00 * gatherw(y0, x0) * gather(y0, x0)
        + w01 * gatherw(y0, x1) * gather(y0, x1)
        + w10 * gatherw(y1, x0) * gather(y1, x0)
        + w11 * gatherw(y1, x1) * gather(y1, x1)
    )
    return np.where(safe, numw / np.where(safe, den, 1.0), 0.0)


def nearest_resize(arr: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    h, w = arr.shape[:2]
    yi = np.clip(((np.arange(out_h) + 0.5) * h / out_h).astype(int), 0, h - 1)
    xi = np.clip(((np.arange(out_w) + 0.5) * w / out_w).astype(int), 0, w - 1)
    return arr[yi[:, None], xi[None, :]]


def harmonic_complete(d: DepthMap, mask: MaskImage,
                      tol: float = 1e-6, max_sweeps: int = 200_000) -> DepthMap:
    """Fill masked (and invalid) pixels with the discrete harmonic extension of
    the surrounding valid depth (red-black Gauss-Seidel)."""
    _check_completion_inputs(d, mask)
    if mask.is_empty():
        return d.copy()
    unknown = mask.bits | ~d.valid
    filled = _laplace_fill(d.depth, unknown, d.valid, tol, max_sweeps)
    out = np.where(mask.bits, filled, d.depth)
    valid = d.valid | mask.bits
    return DepthMap(np.where(valid, out, 0.0), valid)


def _laplace_fill(depth: np.ndarray, unknown: np.ndarray, valid: np.ndarray,
                  tol: float, max_sweeps: int) -> np.ndarray:
    h, w = depth.shape
    ys, xs = np.nonzero(unknown)
    y0, y1 = max(int(ys.min()) - 1, 0), min(int(ys.max()) + 2, h)
    x0, x1 = max(int(xs.min()) - 1, 0), min(int(xs.max()) + 2, w)
    vals = depth[y0:y1, x0:x1].copy()
    unk = unknown[y0:y1, x0:x1]
    boundary = depth[valid & ~unknown]
    vals[unk] = boundary.mean() if boundary.size else 0.0

    def neighbor_sum(a):
        s = np.zeros_like(a)
        s[1:, :] += a[:-1, :]
        s[:-1, :] += a[1:, :]
        s[:, 1:] += a[:, :-1]
        s[:, :-1] += a[:, 1:]
        return s

    count = neighbor_sum(np.ones_like(vals))
    grid = np.add.outer(np.arange(y0, y1), np.arange(x0, x1)) % 2
    parities = [unk & (grid == 0), unk & (grid == 1)]
    for sweep in range(max_sweeps):
        for par in parities:
            if par.any():
                s = neighbor_sum(vals)
                vals[par] = s[par] / count[par]
        if sweep % 16 == 15:
            defect = np.abs(vals - neighbor_sum(vals) / count)[unk]
            if defect.size == 0 or defect.max() < tol:
                break
    else:
        raise BackendError(
            f"harmonic fill did not reach residual {tol} in {max_sweeps} sweeps"
        )
    out = depth.copy()
    region = out[y0:y1, x0:x1]
    region[unk] = vals[unk]
    return out


@dataclass
class HarmonicBackend:
    tol: float = 1e-6
    max_sweeps: int = 200_000

    downsample_factor = 1

    def fill(self, d: DepthMap, image, mask: MaskImage, rng) -> np.ndarray:
        return harmonic_complete(d, mask, self.tol, self.max_sweeps).depth


@dataclass
class DiffusionBackend:
    codec: LatentCodec
    denoiser: object
    schedule: DiffusionSchedule
    steps: int = 50

    @property
    def downsample_factor(self) -> int:
        return self.codec.downsample_factor

    def fill(self, d: DepthMap, image, mask: MaskImage, rng) -> np.ndarray:
        if rng is None:
            raise InvalidArgument("diffusion backend needs an rng")
        d_norm, params = normalize_depth(d)
        z_d = self.codec.encode(d_norm)
        z_img = self.codec.encode(np.asarray(image, dtype=np.float64))
        m_small = downsample_mask(mask, self.codec.downsample_factor)
        latent = ddim_sample(
            self.denoiser, z_img, z_d * m_small, m_small,
            self.schedule, self.steps, rng,
        )
        return denormalize_depth(self.codec.decode(latent), params).depth


def complete_depth(
    d: DepthMap,
    image_inpainted: np.ndarray,
    mask: MaskImage,
    backend,
    rng: np.random.Generator | None = None,
    max_side: int = MAX_SIDE,
) -> DepthMap:
    """Fill the masked region of a rendered depth map.

    The conditioning image and depth are resized (aspect preserved) so the
    longest side is at most ``max_side`` and dimensions fit the backend's
    downsample factor; the fill is resized back and hard-composited, so
    unmasked valid pixels pass through untouched.
    """
    _check_completion_inputs(d, mask)
    image = np.asarray(image_inpainted, dtype=np.float64)
    if image.shape[:2] != (d.height, d.width):
        raise InvalidArgument(
            f"image {image.shape[:2]} does not match depth "
            f"{(d.height, d.width)}"
        )
    if mask.is_empty():
        return d.copy()

    factor = getattr(backend, "downsample_factor", 1)
    work_h, work_w = _working_dims(d.height, d.width, max_side, factor)
    resized = (work_h, work_w) != (d.height, d.width)
    if resized:
        depth_small = bilinear_resize(d.depth, work_h, work_w,
                                      weights=d.valid.astype(np.float64))
        valid_small = nearest_resize(d.valid, work_h, work_w)
        d_work = DepthMap(np.where(valid_small, depth_small, 0.0), valid_small)
        image_work = bilinear_resize(image, work_h, work_w)
        mask_work = MaskImage(nearest_resize(mask.bits, work_h, work_w))
        if mask_work.is_empty() or not np.any(d_work.valid & ~mask_work.bits):
            raise DegenerateDepth("mask or validity degenerate after resize")
    else:
        d_work, image_work, mask_work = d, image, mask

    try:
        filled_work = backend.fill(d_work, image_work, mask_work, rng)
    except GsfillError:
        raise
    except Exception as e:
        raise BackendError(f"completion backend failed: {e}") from e

    filled = bilinear_resize(filled_work, d.height, d.width) if resized else filled_work
    out = np.where(mask.bits, filled, d.depth)
    valid = d.valid | mask.bits
    return DepthMap(np.where(valid, out, 0.0), valid)


def _check_completion_inputs(d: DepthMap, mask: MaskImage) -> None:
    if (mask.height, mask.width) != (d.height, d.width):
        raise InvalidArgument(
            f"mask {mask.height}x{mask.width} does not match depth "
            f"{d.height}x{d.width}"
        )
    if not mask.is_empty() and not np.any(d.valid & ~mask.bits):
        raise DegenerateDepth("mask covers every valid pixel")


def _working_dims(h: int, w: int, max_side: int, factor: int) -> tuple[int, int]:
    scale = min(1.0, max_side / max(h, w))
    wh, ww = int(round(h * scale)), int(round(w * scale))

    def fit(x):
        return max(int(np.ceil(x / factor)) * factor, factor)

    return fit(wh), fit(ww)
