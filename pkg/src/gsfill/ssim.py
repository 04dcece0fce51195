"""Structural similarity and the D-SSIM loss term, with analytic gradients.

Local statistics use an 11x11 Gaussian window (sigma 1.5) applied as a
zero-padded same-size correlation, so the window operator is self-adjoint and
the gradient is an exact chain rule through the SSIM closed form. Constants
follow the standard choice for unit dynamic range.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from .errors import InvalidArgument

WINDOW_SIZE = 11
WINDOW_SIGMA = 1.5
C1 = 0.01**2
C2 = 0.03**2


def gaussian_window(size: int = WINDOW_SIZE, sigma: float = WINDOW_SIGMA) -> np.ndarray:
    half = (size - 1) / 2.0
    g = np.exp(-((np.arange(size) - half) ** 2) / (2.0 * sigma**2))
    kernel = np.outer(g, g)
    return kernel / kernel.sum()

_KERNEL_1D = gaussian_window()[WINDOW_SIZE // 2]
_KERNEL_1D = _KERNEL_1D / _KERNEL_1D.sum()


def _filter(img: np.ndarray) -> np.ndarray:
    # the window is an outer product, so filter separably
    tmp = ndimage.correlate1d(img, _KERNEL_1D, axis=0, mode="constant", cval=0.0)
    return ndimage.correlate1d(tmp, _KERNEL_1D, axis=1, mode="constant", cval=0.0)


def _channels(img: np.ndarray) -> np.ndarray:
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim == 2:
        return arr[:, :, None]
    return arr


def ssim_map(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Per-pixel, per-channel SSIM map (same shape as the channel stack)."""
    a, b = _channels(a), _channels(b)
    if a.shape != b.shape:
        raise InvalidArgument(f"image shapes differ: {a.shape} vs {b.shape}")
    out = np.empty_like(a)
    for ch in range(a.shape[2]):
        out[:, :, ch] = _ssim_channel(a[:, :, ch], b[:, :, ch])[0]
    return out


def _ssim_channel(x: np.ndarray, y: np.ndarray):
    mu_x, mu_y = _filter(x), _filter(y)
    xx, yy, xy = _filter(x * x), _filter(y * y), _filter(x * y)
    var_x = xx - mu_x * mu_x
    var_y = yy - mu_y * mu_y
    cov = xy - mu_x * mu_y
    n1 = 2.0 * mu_x * mu_y + C1
    n2 = 2.0 * cov + C2
    d1 = mu_x * mu_x + mu_y * mu_y + C1
    d2 = var_x + var_y + C2
    s = (n1 * n2) / (d1 * d2)
    return s, (mu_x, mu_y, n1, n2, d1, d2)


def ssim(a: np.ndarray, b: np.ndarray) -> float:
    """Mean SSIM over all pixels and channels."""
    return float(ssim_map(a, b).mean())


def dssim(a: np.ndarray, b: np.ndarray) -> float:
    """Structural dissimilarity (1 - SSIM) / 2; 0 iff images are identical."""
    return (1.0 - ssim(a, b)) / 2.0


def dssim_value_and_grad(a: np.ndarray, b: np.ndarray):
    """D-SSIM and its gradient with respect to the first image.

    Returns (value, grad) with grad shaped like ``a``.
    """
    a_arr, b_arr = _channels(a), _channels(b)
    if a_arr.shape != b_arr.shape:
        raise InvalidArgument(f"image shapes differ: {a_arr.shape} vs {b_arr.shape}")
    n_elems = a_arr.size
    total = 0.0
    grad = np.empty_like(a_arr)
    for ch in range(a_arr.shape[2]):
        x, y = a_arr[:, :, ch], b_arr[:, :, ch]
        s, (mu_x, mu_y, n1, n2, d1, d2) = _ssim_channel(x, y)
        total += s.sum()
        # dL/ds with L = (1 - mean(s)) / 2
        ds = np.full_like(s, -0.5 / n_elems)
        inv_dd = 1.0 / (d1 * d2)
        g_n1 = ds * n2 * inv_dd
        g_n2 = ds * n1 * inv_dd
        g_d1 = -ds * s / d1
        g_d2 = -ds * s / d2
        # stats in terms of raw filter outputs: var_x = f(x^2) - mu_x^2,
        # cov = f(xy) - mu_x mu_y
        g_var_x = g_d2
        g_cov = 2.0 * g_n2
        g_mu_x = (
            2.0 * mu_y * g_n1
            + 2.0 * mu_x * g_d1
            - 2.0 * mu_x * g_var_x
            - mu_y * g_cov
        )
        grad[:, :, ch] = (
            _filter(g_mu_x) + 2.0 * x * _filter(g_var_x) + y * _filter(g_cov)
        )
    value = float((1.0 - total / n_elems) / 2.0)
    grad = grad.reshape(np.asarray(a, dtype=np.float64).shape)
    return value, grad
