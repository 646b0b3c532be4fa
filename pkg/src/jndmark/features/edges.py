"""Binary edge maps from two interchangeable detectors.

``gradient-hysteresis`` is the classic Canny pipeline (Gaussian smoothing,
Sobel gradient, non-maximum suppression, dual-threshold hysteresis) with
thresholds expressed as fractions of the strongest gradient.
``phase-congruency`` thins the maximum moment of phase congruency along the
feature normal and applies hysteresis on its dimensionless values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType

import numpy as np
from scipy import ndimage
from skimage.filters import apply_hysteresis_threshold

from ..errors import InvalidDetectorParameters
from ..imaging import as_gray_image
from .phasecong import phase_congruency

GRADIENT = "gradient-hysteresis"
PHASE = "phase-congruency"

DEFAULTS = MappingProxyType({
    GRADIENT: MappingProxyType({"sigma": 2.0, "low": 0.1, "high": 0.2}),
    PHASE: MappingProxyType({
        "nscale": 4,
        "norient": 6,
        "min_wavelength": 3.0,
        "mult": 2.1,
        "sigma_onf": 0.55,
        "k": 2.0,
        "low": 0.1,
        "high": 0.2,
    }),
})


@dataclass(frozen=True)
class DetectorChoice:
    kind: str = PHASE
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in DEFAULTS:
            raise InvalidDetectorParameters(
                f"unknown edge detector {self.kind!r}; choose one of {sorted(DEFAULTS)}"
            )
        unknown = set(self.params) - set(DEFAULTS[self.kind])
        if unknown:
            raise InvalidDetectorParameters(f"unknown {self.kind} parameters: {sorted(unknown)}")
        p = self.resolved()
        if not 0 <= p["low"] <= p["high"]:
            raise InvalidDetectorParameters("hysteresis thresholds need 0 <= low <= high")
        if self.kind == GRADIENT:
            if p["sigma"] < 0:
                raise InvalidDetectorParameters("sigma must be >= 0")
            if p["high"] > 1:
                raise InvalidDetectorParameters("gradient thresholds are fractions of the peak, <= 1")
        else:
            if int(p["nscale"]) < 2 or int(p["norient"]) < 1:
                raise InvalidDetectorParameters("need nscale >= 2 and norient >= 1")
            if p["min_wavelength"] < 2 or p["mult"] <= 1 or not 0 < p["sigma_onf"] < 1 or p["k"] < 0:
                raise InvalidDetectorParameters("phase congruency filter parameters out of range")

    def resolved(self) -> dict:
        return {**DEFAULTS[self.kind], **self.params}

    def to_dict(self) -> dict:
        return {"kind": self.kind, "params": self.resolved()}


def parse_detector(kind: str = PHASE, **params) -> DetectorChoice:
    return DetectorChoice(kind, dict(params))


_FWD_X, _FWD_Y = np.cos(np.pi / 8), np.sin(np.pi / 8)


def nonmax_suppress(mag: np.ndarray, nx: np.ndarray, ny: np.ndarray, tol: float = 1e-6) -> np.ndarray:
    """Keep ridge pixels of `mag` across the unit normal ``(nx, ny)``.

    Neighbours are sampled by bilinear interpolation one pixel either side.
    A ridge that is flat across two pixels (an ideal step between columns)
    keeps only the pixel on the forward side. Forward is the normal flipped
    into a fixed half-plane whose boundary sits at an oblique angle, so that
    normals near the axes or the diagonals never straddle it; the relative
    tolerance makes the choice immune to last-bit rounding differences.
    """
    flip = nx * _FWD_X + ny * _FWD_Y < 0
    nx = np.where(flip, -nx, nx)
    ny = np.where(flip, -ny, ny)
    rows, cols = np.indices(mag.shape, dtype=np.float64)
    fwd = ndimage.map_coordinates(mag, [rows + ny, cols + nx], order=1, mode="nearest")
    back = ndimage.map_coordinates(mag, [rows - ny, cols - nx], order=1, mode="nearest")
    keep = (mag > fwd * (1 + tol)) & (mag >= back * (1 - tol)) & (mag > 0)
    return np.where(keep, mag, 0.0)


def _gradient_edges(img: np.ndarray, sigma: float, low: float, high: float) -> np.ndarray:
    smooth = img.astype(np.float64)
    if sigma > 0:
        smooth = ndimage.gaussian_filter(smooth, sigma, mode="nearest")
    gx = ndimage.sobel(smooth, axis=1, mode="nearest")
    gy = ndimage.sobel(smooth, axis=0, mode="nearest")
    mag = np.hypot(gx, gy)
    peak = mag.max()
    if peak <= 0:
        return np.zeros(img.shape, dtype=bool)
    norm = np.where(mag > 0, mag, 1.0)
    rel = mag / peak
    # sub-resolution gradients are rounding residue, not structure
    rel[rel < 1e-9] = 0.0
    thin = nonmax_suppress(rel, gx / norm, gy / norm)
    return apply_hysteresis_threshold(thin, low, high)


def _phase_edges(img: np.ndarray, p: dict) -> np.ndarray:
    pc = phase_congruency(
        img,
        nscale=int(p["nscale"]),
        norient=int(p["norient"]),
        min_wavelength=p["min_wavelength"],
        mult=p["mult"],
        sigma_onf=p["sigma_onf"],
        k=p["k"],
    )
    thin = nonmax_suppress(pc.max_moment, pc.normal_x, pc.normal_y)
    return apply_hysteresis_threshold(thin, p["low"], p["high"])


def detect_edges(img, choice: DetectorChoice | None = None) -> np.ndarray:
    """Binary edge map (bool array, same shape as `img`)."""
    img = as_gray_image(img)
    choice = choice or DetectorChoice()
    p = choice.resolved()
    if choice.kind == GRADIENT:
        return _gradient_edges(img, p["sigma"], p["low"], p["high"])
    return _phase_edges(img, p)
