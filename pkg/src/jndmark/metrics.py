"""Fidelity metrics: MSE, PSNR, NVF-weighted PSNR and bit error rate."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch
from .imaging import as_gray_image, check_block_aligned, to_blocks

PEAK = 255.0


def _pair(a, b) -> tuple[np.ndarray, np.ndarray]:
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes differ: {a.shape} vs {b.shape}")
    return a.astype(np.float64), b.astype(np.float64)


def mse(a, b) -> float:
    a, b = _pair(a, b)
    return float(np.mean((a - b) ** 2))


def _db(err: float) -> float:
    if err <= 0:
        return float("inf")
    return float(20 * np.log10(PEAK / np.sqrt(err)))


def psnr(a, b) -> float:
    """PSNR in dB; ``inf`` for identical images."""
    return _db(mse(a, b))


def nvf(img) -> np.ndarray:
    """Noise visibility per block: ``1 / (1 + var)`` scaled so the largest value is 1.

    Flat blocks score 1, busy blocks approach 0.
    """
    img = as_gray_image(img)
    check_block_aligned(img)
    var = to_blocks(img.astype(np.float64)).var(axis=(2, 3))
    raw = 1.0 / (1.0 + var)
    return raw / raw.max()


def weighted_mse(original, modified) -> float:
    """Pixel MSE with each squared error weighted by the NVF of its block in `original`."""
    a, b = _pair(original, modified)
    weights = nvf(np.asarray(original))
    err = to_blocks((a - b) ** 2).mean(axis=(2, 3))
    return float(np.mean(err * weights))


def wpsnr(original, modified) -> float:
    return _db(weighted_mse(original, modified))


def ber(recovered, reference) -> float:
    """Fraction of differing bits."""
    r = np.asarray(recovered).astype(bool)
    ref = np.asarray(reference).astype(bool)
    if r.shape != ref.shape:
        raise DimensionMismatch(f"watermark shapes differ: {r.shape} vs {ref.shape}")
    if r.size == 0:
        raise DimensionMismatch("empty watermark")
    return float(np.mean(r != ref))


def _json_db(x: float):
    return "inf" if np.isinf(x) else x


@dataclass
class QualityReport:
    mse: float
    psnr: float
    wpsnr: float
    nvf_grid: np.ndarray

    def to_dict(self) -> dict:
        return {"mse": self.mse, "psnr_db": _json_db(self.psnr), "wpsnr_db": _json_db(self.wpsnr)}


def quality_report(original, modified) -> QualityReport:
    e = mse(original, modified)
    return QualityReport(e, _db(e), wpsnr(original, modified), nvf(original))
