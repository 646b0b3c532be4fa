"""Spatial-domain perceptual features: edges, corners and block luminance."""

from __future__ import annotations

import numpy as np

from ..imaging import BlockIndex, as_gray_image, to_blocks
from .corners import CssParams, detect_corners
from .edges import GRADIENT, PHASE, DetectorChoice, detect_edges, parse_detector

LUMINANCE_ALPHA = 0.649

__all__ = [
    "GRADIENT",
    "PHASE",
    "CssParams",
    "DetectorChoice",
    "block_luminance",
    "block_luminance_grid",
    "detect_corners",
    "detect_edges",
    "luminance_sensitivity",
    "luminance_sensitivity_grid",
    "parse_detector",
]


def block_luminance_grid(img) -> np.ndarray:
    """Mean sample value of every 8x8 block, shape ``(rows, cols)``."""
    blocks = to_blocks(as_gray_image(img))
    return blocks.sum(axis=(2, 3), dtype=np.int64) / 64.0


def block_luminance(img, block: BlockIndex) -> float:
    img = as_gray_image(img)
    r, c = block.row, block.col
    return float(img[8 * r:8 * r + 8, 8 * c:8 * c + 8].sum(dtype=np.int64) / 64.0)


def luminance_sensitivity_grid(grid, alpha: float = LUMINANCE_ALPHA) -> np.ndarray:
    """Per-block ``(DC_b / DC_mean) ** alpha`` with DC_mean the image-wide mean DC.

    Blocks with a non-positive DC term get 0; an all-black image (DC_mean = 0)
    yields all zeros.
    """
    dc = np.asarray(grid)[:, :, 0, 0]
    mean = dc.mean()
    if mean <= 0:
        return np.zeros_like(dc)
    ratio = np.maximum(dc, 0) / mean
    return ratio**alpha


def luminance_sensitivity(grid, block: BlockIndex, alpha: float = LUMINANCE_ALPHA) -> float:
    return float(luminance_sensitivity_grid(grid, alpha)[block.row, block.col])
