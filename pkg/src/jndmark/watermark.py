"""Mask-weighted d-sequence embedding in the DCT mid band and blind extraction.

Every 8x8 block carries one watermark bit (bits are tiled cyclically over the
blocks in row-major order). For block ``b`` with bit ``w`` the 22 mid-band
coefficients, taken in zigzag order, become

    I_w(u, v, b) = I(u, v, b) + s * beta * K * J(b) * d_b[k],    s = +1 if w == 0 else -1

where ``J(b)`` is the normalised JND mask, ``d_b`` the block's slice of the
d-sequence and ``K = AMPLITUDE_SCALE`` converts the dimensionless strength
into coefficient units. Extraction correlates the mid band with the same
chips, averages the per-block correlations of each bit and thresholds.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import metrics
from .dseq import DSequence, block_chips
from .errors import DimensionMismatch, MissingSize, ValidationError
from .features import CssParams, DetectorChoice
from .imaging import as_bitmap, as_gray_image, block_grid_shape, pbm_text
from .mask import ADDITIVE, LUMINANCE_MODES, JndMask, compute_mask
from .transform import inverse_transform_real, to_uint8, transform_image

log = logging.getLogger(__name__)

# Coefficient units per unit of beta * normalised mask. Calibrated once on the
# bundled photographs so that beta = 0.007 on `launchpad` and beta = 0.084 on
# `gravel` land near the classic WPSNR operating points (about 40 and 34 dB).
AMPLITUDE_SCALE = 1650.0


def zigzag_order(n: int = 8) -> list[tuple[int, int]]:
    """JPEG zigzag scan of an n x n block as (row, col) = (u, v) pairs."""
    order = []
    for s in range(2 * n - 1):
        diag = [(i, s - i) for i in range(n) if 0 <= s - i < n]
        order.extend(diag if s % 2 else diag[::-1])
    return order


ZIGZAG = tuple(zigzag_order())
MID_BAND = ZIGZAG[6:28]
_MID_U = np.array([u for u, _ in MID_BAND])
_MID_V = np.array([v for _, v in MID_BAND])


@dataclass(frozen=True)
class EmbedConfig:
    beta: float = 0.007
    prime_q: int = 2467
    luminance_mode: str = ADDITIVE
    threshold: float = 0.0
    detector: DetectorChoice = field(default_factory=DetectorChoice)
    css: CssParams = field(default_factory=CssParams)

    def __post_init__(self):
        if not np.isfinite(self.beta) or self.beta < 0:
            raise ValidationError(f"beta must be a finite number >= 0, got {self.beta}")
        if not np.isfinite(self.threshold):
            raise ValidationError("threshold must be finite")
        if self.luminance_mode not in LUMINANCE_MODES:
            raise ValidationError(f"unknown luminance mode {self.luminance_mode!r}")

    def to_dict(self) -> dict:
        return {
            "beta": self.beta,
            "prime_q": self.prime_q,
            "luminance_mode": self.luminance_mode,
            "threshold": self.threshold,
            "amplitude_scale": AMPLITUDE_SCALE,
            "mid_band_zigzag": [6, 27],
            "detector": self.detector.to_dict(),
            "css": vars(self.css).copy(),
        }


def bit_assignment(n_blocks: int, n_bits: int) -> np.ndarray:
    """Watermark bit index for every block: ``b mod n_bits`` (cyclic row-major tiling)."""
    if n_bits < 1:
        raise MissingSize("watermark must have at least one bit")
    return np.arange(n_blocks) % n_bits


def _chips(q: int, n_blocks: int) -> np.ndarray:
    seq = DSequence.from_prime(q)
    needed = n_blocks * len(MID_BAND)
    if seq.period < needed:
        log.info("d-sequence for q=%d has period %d < %d chips; carrier repeats", q, seq.period, needed)
    return block_chips(seq, n_blocks, len(MID_BAND))


def mid_band(grid: np.ndarray) -> np.ndarray:
    """Mid-band coefficients as an ``(n_blocks, 22)`` array in zigzag order."""
    rows, cols = grid.shape[:2]
    return grid[:, :, _MID_U, _MID_V].reshape(rows * cols, len(MID_BAND))


@dataclass
class EmbedResult:
    image: np.ndarray
    mask: JndMask
    amplitude: np.ndarray  # per-block coefficient amplitude, shape (rows, cols)


def embed_detailed(img, wm, cfg: EmbedConfig | None = None, mask: JndMask | None = None) -> EmbedResult:
    cfg = cfg or EmbedConfig()
    img = as_gray_image(img)
    rows, cols = block_grid_shape(img)
    bits = as_bitmap(wm).ravel()
    grid = transform_image(img)
    if mask is None:
        mask = compute_mask(img, cfg.luminance_mode, cfg.detector, cfg.css, grid=grid)
    elif mask.normalized.shape != (rows, cols):
        raise DimensionMismatch("mask geometry does not match the image")
    n_blocks = rows * cols
    chips = _chips(cfg.prime_q, n_blocks)
    sign = np.where(bits[bit_assignment(n_blocks, bits.size)] == 0, 1.0, -1.0)
    amplitude = cfg.beta * AMPLITUDE_SCALE * mask.amplitude()
    delta = (sign * amplitude.ravel())[:, None] * chips
    marked = grid.copy()
    marked[:, :, _MID_U, _MID_V] += delta.reshape(rows, cols, len(MID_BAND))
    out = to_uint8(inverse_transform_real(marked))
    return EmbedResult(out, mask, amplitude)


def embed(img, wm, cfg: EmbedConfig | None = None, mask: JndMask | None = None) -> np.ndarray:
    """Watermark a grayscale image; returns the marked uint8 image."""
    return embed_detailed(img, wm, cfg, mask).image


@dataclass
class CorrelationReport:
    per_block: np.ndarray  # C(b), shape (block_rows, block_cols)
    per_bit_score: np.ndarray  # shape (height, width)
    recovered: np.ndarray  # bits, shape (height, width)
    ber: float | None = None

    def to_dict(self) -> dict:
        h, w = self.recovered.shape
        return {
            "width": w,
            "height": h,
            "per_bit_score": [float(x) for x in self.per_bit_score.ravel()],
            "ber": self.ber,
            "recovered": pbm_text(self.recovered),
        }


def block_correlations(img, q: int) -> np.ndarray:
    """C(b) = mean over the mid band of coefficient * chip, per block."""
    img = as_gray_image(img)
    rows, cols = block_grid_shape(img)
    coeffs = mid_band(transform_image(img))
    chips = _chips(q, rows * cols)
    return (coeffs * chips).mean(axis=1).reshape(rows, cols)


def extract(img, wm_dims: tuple[int, int], cfg: EmbedConfig | None = None, reference=None) -> CorrelationReport:
    """Blindly recover a ``width x height`` watermark.

    Bit decision: 0 if the bit's mean correlation exceeds the threshold,
    otherwise 1 (an exact tie decodes as 1).
    """
    cfg = cfg or EmbedConfig()
    width, height = (int(v) for v in wm_dims)
    if width < 1 or height < 1:
        raise MissingSize(f"watermark size must be at least 1x1, got {width}x{height}")
    per_block = block_correlations(img, cfg.prime_q)
    n_bits = width * height
    owner = bit_assignment(per_block.size, n_bits)
    counts = np.bincount(owner, minlength=n_bits)
    sums = np.bincount(owner, weights=per_block.ravel(), minlength=n_bits)
    # bits beyond the block count receive no carrier at all and score 0
    score = np.divide(sums, counts, out=np.zeros(n_bits), where=counts > 0)
    recovered = np.where(score > cfg.threshold, 0, 1).astype(np.uint8).reshape(height, width)
    ber = None
    if reference is not None:
        ber = metrics.ber(recovered, reference)
    return CorrelationReport(per_block, score.reshape(height, width), recovered, ber)


@dataclass
class PresenceStatistic:
    statistic: float  # mean |C(b)| over all blocks
    std: float
    median: float
    p95: float
    max: float
    n_blocks: int

    def to_dict(self) -> dict:
        return dict(vars(self))


def detect_presence(img, cfg: EmbedConfig | None = None) -> PresenceStatistic:
    """Mean absolute block correlation with the keyed sequence, plus its spread.

    No decision is made here; compare `statistic` against a threshold
    calibrated on unmarked images.
    """
    cfg = cfg or EmbedConfig()
    c = np.abs(block_correlations(img, cfg.prime_q)).ravel()
    return PresenceStatistic(
        statistic=float(c.mean()),
        std=float(c.std()),
        median=float(np.median(c)),
        p95=float(np.percentile(c, 95)),
        max=float(c.max()),
        n_blocks=int(c.size),
    )
