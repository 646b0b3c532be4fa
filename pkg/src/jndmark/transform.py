"""Orthonormal 8x8 block DCT (type II forward, type III inverse).

With ``alpha_0 = 1/sqrt(8)`` and ``alpha_p = sqrt(2/8)`` the forward transform is

    B[p, q] = alpha_p alpha_q sum_m sum_n A[m, n] cos(pi (2m+1) p / 16) cos(pi (2n+1) q / 16)

which is exactly ``scipy.fft.dctn(..., norm="ortho")``. A coefficient grid is a
``(block_rows, block_cols, 8, 8)`` float array; ``grid[r, c]`` holds the
coefficients of block ``(r, c)``.
"""

from __future__ import annotations

import numpy as np
from scipy.fft import dctn, idctn

from .imaging import as_gray_image, from_blocks, to_blocks

LEVEL_SHIFT = 128.0


def dct2(block, centered: bool = False) -> np.ndarray:
    """2-D DCT of one 8x8 block; `centered` subtracts 128 from the samples first."""
    x = np.asarray(block, dtype=np.float64)
    if centered:
        x = x - LEVEL_SHIFT
    return dctn(x, type=2, norm="ortho")


def idct2(coeffs, centered: bool = False) -> np.ndarray:
    """Inverse of :func:`dct2`; real-valued, no rounding or clamping."""
    x = idctn(np.asarray(coeffs, dtype=np.float64), type=2, norm="ortho")
    if centered:
        x = x + LEVEL_SHIFT
    return x


def transform_image(img, centered: bool = False) -> np.ndarray:
    """Blockwise DCT of an aligned image -> ``(rows, cols, 8, 8)`` grid."""
    blocks = to_blocks(as_gray_image(img)).astype(np.float64)
    if centered:
        blocks -= LEVEL_SHIFT
    return dctn(blocks, type=2, axes=(2, 3), norm="ortho")


def inverse_transform_real(grid, centered: bool = False) -> np.ndarray:
    """Blockwise inverse DCT, returning the unrounded spatial samples."""
    blocks = idctn(np.asarray(grid, dtype=np.float64), type=2, axes=(2, 3), norm="ortho")
    if centered:
        blocks += LEVEL_SHIFT
    return from_blocks(blocks)


def to_uint8(samples) -> np.ndarray:
    """Round to nearest and clamp to [0, 255]; the single quantisation point."""
    return np.clip(np.rint(samples), 0, 255).astype(np.uint8)


def inverse_transform_image(grid, centered: bool = False) -> np.ndarray:
    return to_uint8(inverse_transform_real(grid, centered))
