"""Per-block just-noticeable-distortion (JND) mask.

Texture comes from the AC energy of each block's DCT; edges and corners are
pixel counts per block; luminance is the block mean. Texture raises the
mask, edges and corners lower it, and a parabolic luminance term raises it
towards black and white.

    M_T = 64 * P_T / max P_T,   P_T = ln(max(sum_{i>=1} v_i^2, 1))
    M_E = 64 * P_E / max P_E,   M_C = 64 * P_C / max P_C
    J_I = max(M_T - (M_E + M_C) / 2, 0)
    J_F = J_I + lambda * (128 - M_L)^2          (additive mode)
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import GeometryMismatch, InvalidRow, UnwritableDestination, ValidationError
from .features import (
    CssParams,
    DetectorChoice,
    block_luminance_grid,
    detect_corners,
    detect_edges,
    luminance_sensitivity_grid,
)
from .imaging import as_gray_image, block_grid_shape, to_blocks
from .transform import transform_image

ADDITIVE = "additive-correction"
MULTIPLICATIVE = "multiplicative-DL"
LUMINANCE_MODES = (ADDITIVE, MULTIPLICATIVE)

# keeps the luminance parabola on the same 0..64 scale as the texture term
LUMINANCE_WEIGHT = 64 / 128**2


def _scale_to_64(raw: np.ndarray) -> np.ndarray:
    peak = raw.max()
    if peak <= 0:
        return np.zeros(raw.shape, dtype=np.float64)
    return 64.0 * raw / peak


def texture_feature(grid) -> np.ndarray:
    """M_T per block from the AC energy of a ``(rows, cols, 8, 8)`` coefficient grid."""
    grid = np.asarray(grid, dtype=np.float64)
    energy = (grid**2).sum(axis=(2, 3)) - grid[:, :, 0, 0] ** 2
    # the subtraction can leave -0.0 or a few ulps below zero
    p_t = np.log(np.maximum(energy, 1.0))
    return _scale_to_64(p_t)


def _count_per_block(flags: np.ndarray) -> np.ndarray:
    return to_blocks(flags.astype(np.int64)).sum(axis=(2, 3)).astype(np.float64)


def edge_feature(edges) -> np.ndarray:
    """M_E per block from a binary edge map."""
    return _scale_to_64(_count_per_block(np.asarray(edges, dtype=bool)))


def corner_feature(corners, shape: tuple[int, int]) -> np.ndarray:
    """M_C per block from ``(x, y)`` corner points of an image of `shape` (rows, cols)."""
    rows, cols = shape[0] // 8, shape[1] // 8
    counts = np.zeros((rows, cols))
    pts = np.asarray(corners, dtype=int).reshape(-1, 2)
    if len(pts):
        np.add.at(counts, (pts[:, 1] // 8, pts[:, 0] // 8), 1)
    return _scale_to_64(counts)


@dataclass(frozen=True)
class FeatureGrid:
    texture: np.ndarray
    edge: np.ndarray
    corner: np.ndarray
    luminance: np.ndarray
    # D_L per block, used only by the multiplicative luminance mode
    dl: np.ndarray | None = None

    @property
    def shape(self) -> tuple[int, int]:
        return self.texture.shape


@dataclass(frozen=True)
class JndMask:
    raw: np.ndarray
    normalized: np.ndarray
    luminance_mode: str
    dl: np.ndarray | None = None

    def amplitude(self) -> np.ndarray:
        """Per-block embedding weight: normalized J_F, times D_L in multiplicative mode."""
        if self.luminance_mode == MULTIPLICATIVE and self.dl is not None:
            return self.normalized * self.dl
        return self.normalized


def extract_features(
    img,
    detector: DetectorChoice | None = None,
    css: CssParams | None = None,
    grid=None,
) -> FeatureGrid:
    img = as_gray_image(img)
    block_grid_shape(img)
    if grid is None:
        grid = transform_image(img)
    edges = detect_edges(img, detector)
    corners = detect_corners(img, edges, css)
    return FeatureGrid(
        texture=texture_feature(grid),
        edge=edge_feature(edges),
        corner=corner_feature(corners, img.shape),
        luminance=block_luminance_grid(img),
        dl=luminance_sensitivity_grid(grid),
    )


def build_mask(
    features: FeatureGrid,
    mode: str = ADDITIVE,
    luminance_weight: float = LUMINANCE_WEIGHT,
) -> JndMask:
    """Fuse the feature grids into J_F and its max-normalised form.

    `luminance_weight` is the factor on ``(128 - M_L)**2``; pass 1.0 for the
    unscaled parabola (the luminance term then dwarfs the others).
    """
    if mode not in LUMINANCE_MODES:
        raise ValidationError(f"unknown luminance mode {mode!r}; choose one of {LUMINANCE_MODES}")
    shapes = {np.shape(features.texture), np.shape(features.edge), np.shape(features.corner), np.shape(features.luminance)}
    if len(shapes) != 1:
        raise GeometryMismatch(f"feature grids disagree in shape: {sorted(shapes)}")
    j_i = np.asarray(features.texture, float) - 0.5 * (np.asarray(features.edge, float) + np.asarray(features.corner, float))
    j_i = np.maximum(j_i, 0.0)
    if mode == ADDITIVE:
        raw = j_i + luminance_weight * (128.0 - np.asarray(features.luminance, float)) ** 2
    else:
        raw = j_i
    peak = raw.max()
    normalized = raw / peak if peak > 0 else np.zeros_like(raw)
    return JndMask(raw, normalized, mode, features.dl)


def compute_mask(img, mode: str = ADDITIVE, detector: DetectorChoice | None = None, css: CssParams | None = None, grid=None) -> JndMask:
    """Full mask pipeline for one image."""
    return build_mask(extract_features(img, detector, css, grid), mode)


def mask_rows_csv(mask: JndMask, rows) -> str:
    """Normalised mask values of the given block rows, one CSV line per block column."""
    values = mask.normalized
    rows = [int(r) for r in rows]
    for r in rows:
        if not 0 <= r < values.shape[0]:
            raise InvalidRow(f"block row {r} outside 0..{values.shape[0] - 1}")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["block_col"] + [f"row_{r}" for r in rows])
    if rows:
        for c in range(values.shape[1]):
            writer.writerow([c] + [f"{values[r, c]:.6f}" for r in rows])
    return buf.getvalue()


def dump_mask_rows(mask: JndMask, rows, path) -> None:
    text = mask_rows_csv(mask, rows)
    path = Path(path)
    try:
        path.write_text(text, encoding="utf-8", newline="\n")
    except OSError as exc:
        raise UnwritableDestination(f"cannot write {path}: {exc.strerror or exc}") from exc


def mask_image(mask: JndMask) -> np.ndarray:
    """Grayscale visualisation: one 8x8 tile per block, white = largest JND."""
    tiles = np.rint(255 * mask.normalized).astype(np.uint8)
    return np.kron(tiles, np.ones((8, 8), dtype=np.uint8))
