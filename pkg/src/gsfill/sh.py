"""Real spherical-harmonic color basis, degrees 0..3, and its direction gradient.

Uses the coefficient ordering and constants of the common splat convention:
16 basis values per direction at degree 3, color = 0.5 + basis . coefficients.
"""

from __future__ import annotations

import numpy as np

C0 = 0.28209479177387814
C1 = 0.4886025119029199
C2 = (1.0925484305920792, -1.0925484305920792, 0.31539156525252005,
      -1.0925484305920792, 0.5462742152960396)
C3 = (-0.5900435899266435, 2.890611442640554, -0.4570457994644658,
      0.3731763325901154, -0.4570457994644658, 1.445305721320277,
      -0.5900435899266435)


def sh_basis(dirs: np.ndarray, degree: int) -> np.ndarray:
    """Basis values for unit directions (M, 3); returns (M, (degree+1)**2)."""
    dirs = np.atleast_2d(dirs)
    x, y, z = dirs[:, 0], dirs[:, 1], dirs[:, 2]
    m = len(dirs)
    out = np.empty((m, (degree + 1) ** 2))
    out[:, 0] = C0
    if degree >= 1:
        out[:, 1] = -C1 * y
        out[:, 2] = C1 * z
        out[:, 3] = -C1 * x
    if degree >= 2:
        xx, yy, zz = x * x, y * y, z * z
        out[:, 4] = C2[0] * x * y
        out[:, 5] = C2[1] * y * z
        out[:, 6] = C2[2] * (2 * zz - xx - yy)
        out[:, 7] = C2[3] * x * z
        out[:, 8] = C2[4] * (xx - yy)
    if degree >= 3:
        out[:, 9] = C3[0] * y * (3 * xx - yy)
        out[:, 10] = C3[1] * x * y * z
        out[:, 11] = C3[2] * y * (4 * zz - xx - yy)
        out[:, 12] = C3[3] * z * (2 * zz - 3 * xx - 3 * yy)
        out[:, 13] = C3[4] * x * (4 * zz - xx - yy)
        out[:, 14] = C3[5] * z * (xx - yy)
        out[:, 15] = C3[6] * x * (xx - 3 * yy)
    return out


def sh_basis_grad(dirs: np.ndarray, degree: int) -> np.ndarray:
    """d(basis)/d(direction) for unit directions; returns (M, K, 3)."""
    dirs = np.atleast_2d(dirs)
    x, y, z = dirs[:, 0], dirs[:, 1], dirs[:, 2]
    m = len(dirs)
    zeros = np.zeros(m)
    k = (degree + 1) ** 2
    g = np.zeros((m, k, 3))
    if degree >= 1:
        g[:, 1, 1] = -C1
        g[:, 2, 2] = C1
        g[:, 3, 0] = -C1
    if degree >= 2:
        xx, yy, zz = x * x, y * y, z * z
        g[:, 4] = C2[0] * np.stack([y, x, zeros], axis=1)
        g[:, 5] = C2[1] * np.stack([zeros, z, y], axis=1)
        g[:, 6] = C2[2] * np.stack([-2 * x, -2 * y, 4 * z], axis=1)
        g[:, 7] = C2[3] * np.stack([z, zeros, x], axis=1)
        g[:, 8] = C2[4] * np.stack([2 * x, -2 * y, zeros], axis=1)
    if degree >= 3:
        g[:, 9] = C3[0] * np.stack([6 * x * y, 3 * xx - 3 * yy, zeros], axis=1)
        g[:, 10] = C3[1] * np.stack([y * z, x * z, x * y], axis=1)
        g[:, 11] = C3[2] * np.stack(
            [-2 * x * y, 4 * zz - xx - 3 * yy, 8 * y * z], axis=1
        )
        g[:, 12] = C3[3] * np.stack(
            [-6 * x * z, -6 * y * z, 6 * zz - 3 * xx - 3 * yy], axis=1
        )
        g[:, 13] = C3[4] * np.stack(
            [4 * zz - 3 * xx - yy, -2 * x * y, 8 * x * z], axis=1
        )
        g[:, 14] = C3[5] * np.stack([2 * x * z, -2 * y * z, xx - yy], axis=1)
        g[:, 15] = C3[6] * np.stack([3 * xx - 3 * yy, -6 * x * y, zeros], axis=1)
    return g


def eval_sh_color(sh: np.ndarray, dirs: np.ndarray, degree: int) -> np.ndarray:
    """Colors (M, 3) in [0, 1] for coefficients (M, K, 3) and unit dirs (M, 3)."""
    basis = sh_basis(dirs, degree)
    return np.clip(0.5 + np.einsum("mk,mkc->mc", basis, sh), 0.0, 1.0)
