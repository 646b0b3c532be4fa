"""Robustness attacks: JPEG quantisation, additive noise, median filtering, sharpening.

Attack strings for the command line look like ``jpeg:q=45``,
``gauss:var=2%:seed=1``, ``gauss:sigma=5:seed=1``, ``saltpepper:d=0.05:seed=1``,
``median:w=3`` and ``sharpen:s=1.0``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .errors import EvenWindow, InvalidAttack, QualityOutOfRange
from .imaging import as_gray_image
from .transform import inverse_transform_image, transform_image

JPEG = "jpeg"
GAUSSIAN = "gaussian-noise"
SALT_PEPPER = "salt-pepper"
MEDIAN = "median-filter"
SHARPEN = "sharpen"
KINDS = (JPEG, GAUSSIAN, SALT_PEPPER, MEDIAN, SHARPEN)

# baseline JPEG luminance table (ITU T.81 Annex K)
LUMINANCE_TABLE = np.array([
    [16, 11, 10, 16, 24, 40, 51, 61],
    [12, 12, 14, 19, 26, 58, 60, 55],
    [14, 13, 16, 24, 40, 57, 69, 56],
    [14, 17, 22, 29, 51, 87, 80, 62],
    [18, 22, 37, 56, 68, 109, 103, 77],
    [24, 35, 55, 64, 81, 104, 113, 92],
    [49, 64, 78, 87, 103, 121, 120, 101],
    [72, 92, 95, 98, 112, 100, 103, 99],
], dtype=np.float64)


@dataclass(frozen=True)
class AttackSpec:
    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidAttack(f"unknown attack {self.kind!r}; choose one of {KINDS}")

    def to_dict(self) -> dict:
        return {"kind": self.kind, "params": dict(self.params)}


@dataclass
class AttackResult:
    attacked: np.ndarray
    spec: AttackSpec
    seed: int | None = None


def quality_table(quality: int) -> np.ndarray:
    """Luminance quantisation table for a JPEG quality factor in 1..100."""
    if isinstance(quality, bool) or int(quality) != quality or not 1 <= quality <= 100:
        raise QualityOutOfRange(f"JPEG quality must be an integer in 1..100, got {quality}")
    scale = 5000 / quality if quality < 50 else 200 - 2 * quality
    # floor(x + 0.5): libjpeg rounds halves up, numpy's rint would round to even
    return np.clip(np.floor(LUMINANCE_TABLE * scale / 100 + 0.5), 1, 255)


def jpeg_attack(img, quality: int) -> AttackResult:
    """Baseline JPEG luminance path without entropy coding."""
    table = quality_table(quality)
    grid = transform_image(img, centered=True)
    grid = np.rint(grid / table) * table
    spec = AttackSpec(JPEG, {"quality": int(quality)})
    return AttackResult(inverse_transform_image(grid, centered=True), spec)


def _clamp(x: np.ndarray) -> np.ndarray:
    return np.clip(np.rint(x), 0, 255).astype(np.uint8)


def gaussian_noise(img, variance_pct: float | None = None, seed: int = 0, sigma: float | None = None) -> AttackResult:
    """Zero-mean Gaussian noise of variance ``variance_pct/100 * 255**2`` (or of std `sigma`)."""
    img = as_gray_image(img)
    if (variance_pct is None) == (sigma is None):
        raise InvalidAttack("give exactly one of variance_pct or sigma")
    if sigma is None:
        if variance_pct < 0:
            raise InvalidAttack("variance_pct must be >= 0")
        sigma = np.sqrt(variance_pct / 100.0) * 255.0
        params = {"variance_pct": float(variance_pct)}
    else:
        if sigma < 0:
            raise InvalidAttack("sigma must be >= 0")
        params = {"sigma": float(sigma)}
    rng = np.random.default_rng(seed)
    noise = rng.normal(0.0, sigma, img.shape) if sigma > 0 else 0.0
    return AttackResult(_clamp(img + noise), AttackSpec(GAUSSIAN, params), seed)


def salt_pepper(img, density: float, seed: int = 0) -> AttackResult:
    img = as_gray_image(img)
    if not 0 <= density <= 1:
        raise InvalidAttack(f"density must lie in [0, 1], got {density}")
    rng = np.random.default_rng(seed)
    hit = rng.random(img.shape) < density
    salt = rng.random(img.shape) < 0.5
    out = img.copy()
    out[hit] = np.where(salt[hit], 255, 0)
    return AttackResult(out, AttackSpec(SALT_PEPPER, {"density": float(density)}), seed)


def median_filter(img, window: int = 3) -> AttackResult:
    img = as_gray_image(img)
    if int(window) != window or window < 3 or window % 2 == 0:
        raise EvenWindow(f"median window must be an odd integer >= 3, got {window}")
    out = ndimage.median_filter(img, size=int(window), mode="nearest")
    return AttackResult(out, AttackSpec(MEDIAN, {"window": int(window)}))


def sharpen(img, strength: float = 1.0) -> AttackResult:
    """Unsharp mask against a 3x3 box blur."""
    img = as_gray_image(img)
    if strength < 0:
        raise InvalidAttack("sharpen strength must be >= 0")
    x = img.astype(np.float64)
    blur = ndimage.uniform_filter(x, size=3, mode="nearest")
    return AttackResult(_clamp(x + strength * (x - blur)), AttackSpec(SHARPEN, {"strength": float(strength)}))


_ALIASES = {
    "jpeg": JPEG,
    "gauss": GAUSSIAN,
    "gaussian": GAUSSIAN,
    "gaussian-noise": GAUSSIAN,
    "saltpepper": SALT_PEPPER,
    "salt-pepper": SALT_PEPPER,
    "median": MEDIAN,
    "median-filter": MEDIAN,
    "sharpen": SHARPEN,
}


def _number(key: str, text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise InvalidAttack(f"{key}={text!r} is not a number") from None


def parse_attack(text: str) -> tuple[AttackSpec, int | None]:
    """Parse ``kind:key=value:...`` into a spec and an optional seed."""
    head, *parts = text.strip().split(":")
    kind = _ALIASES.get(head.lower())
    if kind is None:
        raise InvalidAttack(f"unknown attack {head!r}")
    raw = {}
    for part in parts:
        key, sep, value = part.partition("=")
        if not sep or not key:
            raise InvalidAttack(f"malformed attack parameter {part!r} (expected key=value)")
        raw[key.strip().lower()] = value.strip()
    seed = int(_number("seed", raw.pop("seed"))) if "seed" in raw else None
    allowed = {
        JPEG: {"q": "quality", "quality": "quality"},
        GAUSSIAN: {"var": "variance_pct", "variance": "variance_pct", "sigma": "sigma"},
        SALT_PEPPER: {"d": "density", "density": "density"},
        MEDIAN: {"w": "window", "window": "window"},
        SHARPEN: {"s": "strength", "strength": "strength"},
    }[kind]
    params = {}
    for key, value in raw.items():
        if key not in allowed:
            raise InvalidAttack(f"unknown parameter {key!r} for {kind}")
        if allowed[key] == "variance_pct":
            value = value.rstrip("%")
        params[allowed[key]] = _number(key, value)
    if kind == JPEG:
        if "quality" not in params:
            raise InvalidAttack("jpeg needs q=<quality>")
        q = params["quality"]
        if q != int(q):
            raise QualityOutOfRange(f"JPEG quality must be an integer, got {q}")
        params["quality"] = int(q)
    elif kind == GAUSSIAN and len(params) != 1:
        raise InvalidAttack("gauss needs exactly one of var=<percent>% or sigma=<value>")
    elif kind == SALT_PEPPER and "density" not in params:
        raise InvalidAttack("saltpepper needs d=<density>")
    elif kind == MEDIAN:
        w = params.get("window", 3)
        if w != int(w):
            raise EvenWindow(f"median window must be an integer, got {w}")
        params["window"] = int(w)
    elif kind == SHARPEN:
        params.setdefault("strength", 1.0)
    return AttackSpec(kind, params), seed


def apply_attack(img, spec: AttackSpec, seed: int | None = None) -> AttackResult:
    """Run an attack spec; noise attacks default to seed 0."""
    p = spec.params
    if spec.kind == JPEG:
        return jpeg_attack(img, p["quality"])
    if spec.kind == GAUSSIAN:
        return gaussian_noise(img, p.get("variance_pct"), seed or 0, p.get("sigma"))
    if spec.kind == SALT_PEPPER:
        return salt_pepper(img, p["density"], seed or 0)
    if spec.kind == MEDIAN:
        return median_filter(img, p.get("window", 3))
    return sharpen(img, p.get("strength", 1.0))
