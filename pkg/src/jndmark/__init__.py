"""Perceptually masked DCT watermarking of grayscale images.

A JND mask built from block texture, edges, corners and luminance scales a
d-sequence spread across the mid-band DCT coefficients of every 8x8 block;
the watermark is recovered blindly by correlation.
"""

from .attacks import AttackSpec, apply_attack, parse_attack
from .errors import IOFailure, ValidationError, WatermarkError
from .imaging import load_image, load_watermark, save_image, save_watermark
from .mask import ADDITIVE, MULTIPLICATIVE, JndMask, compute_mask
from .metrics import ber, mse, nvf, psnr, quality_report, wpsnr
from .watermark import EmbedConfig, detect_presence, embed, extract

__version__ = "0.1.0"

__all__ = [
    "ADDITIVE",
    "MULTIPLICATIVE",
    "AttackSpec",
    "EmbedConfig",
    "IOFailure",
    "JndMask",
    "ValidationError",
    "WatermarkError",
    "apply_attack",
    "ber",
    "compute_mask",
    "detect_presence",
    "embed",
    "extract",
    "load_image",
    "load_watermark",
    "mse",
    "nvf",
    "parse_attack",
    "psnr",
    "quality_report",
    "save_image",
    "save_watermark",
    "wpsnr",
]
