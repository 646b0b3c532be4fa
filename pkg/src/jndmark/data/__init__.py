"""Bundled test photographs and watermark bitmaps.

``launchpad``  512x512 grayscale crop of a rocket launch photograph (public domain)
``gravel``     512x512 grayscale gravel texture photograph (public domain), the busier image
``lsu12x12``, ``lsu15x12``, ``lsu32x32``, ``lsu64x64``  binary "LSU" logos (1 = black)
"""

from __future__ import annotations

from importlib import resources

import numpy as np

from ..imaging import load_image, load_watermark

PHOTOS = ("launchpad", "gravel")
WATERMARKS = ("lsu12x12", "lsu15x12", "lsu32x32", "lsu64x64")


def path(name: str):
    """Filesystem path of a bundled file, e.g. ``path("launchpad.pgm")``."""
    return resources.files(__name__).joinpath(name)


def photo(name: str = "launchpad") -> np.ndarray:
    if name not in PHOTOS:
        raise KeyError(f"unknown photo {name!r}; choose one of {PHOTOS}")
    return load_image(path(f"{name}.pgm"))


def watermark(name: str = "lsu12x12") -> np.ndarray:
    if name not in WATERMARKS:
        raise KeyError(f"unknown watermark {name!r}; choose one of {WATERMARKS}")
    return load_watermark(path(f"{name}.pbm"))
