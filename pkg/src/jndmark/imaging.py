"""Grayscale image and watermark bitmap I/O, validation and 8x8 blocking.

Images are plain 2-D ``uint8`` numpy arrays indexed ``[row, col]``; watermark
bitmaps are 2-D ``uint8`` arrays holding only 0 and 1. Blocks are numbered
row-major: block ``(row, col)`` has linear index ``row * blocks_per_row + col``.
"""

from __future__ import annotations

import re
from pathlib import Path
from typing import NamedTuple

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import (
    DimensionsNotBlockAligned,
    EmptyBitmap,
    MaxvalNot255,
    UnreadableFile,
    UnsupportedFormat,
    UnwritableDestination,
    ValidationError,
)

BLOCK = 8


class BlockIndex(NamedTuple):
    row: int
    col: int
    linear: int


def as_gray_image(img) -> np.ndarray:
    """Validate and return `img` as a 2-D uint8 array (no copy if already one)."""
    arr = np.asarray(img)
    if arr.ndim != 2:
        raise ValidationError(f"expected a 2-D grayscale image, got shape {arr.shape}")
    if arr.shape[0] < BLOCK or arr.shape[1] < BLOCK:
        raise ValidationError(f"image must be at least 8x8, got {arr.shape[1]}x{arr.shape[0]}")
    if arr.dtype != np.uint8:
        if not np.issubdtype(arr.dtype, np.number):
            raise ValidationError(f"image samples must be numeric, got {arr.dtype}")
        if arr.min() < 0 or arr.max() > 255 or not np.all(arr == np.round(arr)):
            raise ValidationError("image samples must be integers in [0, 255]")
        arr = arr.astype(np.uint8)
    return arr


def as_bitmap(bits) -> np.ndarray:
    arr = np.asarray(bits)
    if arr.ndim != 2 or arr.size == 0:
        raise EmptyBitmap(f"watermark must be a non-empty 2-D bitmap, got shape {arr.shape}")
    if not np.all((arr == 0) | (arr == 1)):
        raise ValidationError("watermark bits must be 0 or 1")
    return arr.astype(np.uint8)


def check_block_aligned(img: np.ndarray) -> None:
    h, w = img.shape[:2]
    if h % BLOCK or w % BLOCK:
        raise DimensionsNotBlockAligned(f"image size {w}x{h} is not a multiple of 8 in both dimensions")


def block_grid_shape(img: np.ndarray) -> tuple[int, int]:
    check_block_aligned(img)
    return img.shape[0] // BLOCK, img.shape[1] // BLOCK


def to_blocks(img: np.ndarray) -> np.ndarray:
    """View an aligned image as a ``(rows, cols, 8, 8)`` block array."""
    r, c = block_grid_shape(img)
    return img.reshape(r, BLOCK, c, BLOCK).swapaxes(1, 2)


def from_blocks(blocks: np.ndarray) -> np.ndarray:
    r, c = blocks.shape[:2]
    return blocks.swapaxes(1, 2).reshape(r * BLOCK, c * BLOCK)


def partition_blocks(img) -> list[tuple[BlockIndex, np.ndarray]]:
    """Split an image into its non-overlapping 8x8 blocks in row-major order."""
    img = as_gray_image(img)
    blocks = to_blocks(img)
    rows, cols = blocks.shape[:2]
    return [
        (BlockIndex(r, c, r * cols + c), blocks[r, c].copy())
        for r in range(rows)
        for c in range(cols)
    ]


def block_of_pixel(shape: tuple[int, int], y: int, x: int) -> BlockIndex:
    cols = shape[1] // BLOCK
    r, c = y // BLOCK, x // BLOCK
    return BlockIndex(r, c, r * cols + c)


# -- file formats ---------------------------------------------------------

_TOKEN = re.compile(rb"(?:\s|#[^\n]*\n?)*([^\s#]+)")


def _netpbm_header(data: bytes, ntokens: int) -> tuple[list[bytes], int]:
    """Return the first `ntokens` header tokens and the offset of the raster."""
    tokens = []
    pos = 0
    for _ in range(ntokens):
        m = _TOKEN.match(data, pos)
        if m is None:
            raise UnsupportedFormat("truncated netpbm header")
        tokens.append(m.group(1))
        pos = m.end()
    # exactly one whitespace byte separates the header from binary data
    return tokens, pos + 1


def _read_pgm(data: bytes) -> np.ndarray:
    tokens, offset = _netpbm_header(data, 4)
    try:
        w, h, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise UnsupportedFormat("malformed PGM header") from None
    if maxval != 255:
        raise MaxvalNot255(f"PGM maxval is {maxval}, only 255 is supported")
    if len(data) < offset + w * h:
        raise UnsupportedFormat("PGM raster is shorter than width*height")
    raster = np.frombuffer(data, dtype=np.uint8, count=w * h, offset=offset)
    return raster.reshape(h, w).copy()


def _luma(rgb: np.ndarray) -> np.ndarray:
    rgb = rgb.astype(np.float64)
    y = 0.299 * rgb[..., 0] + 0.587 * rgb[..., 1] + 0.114 * rgb[..., 2]
    return np.clip(np.floor(y + 0.5), 0, 255).astype(np.uint8)


def _read_pillow(path: Path) -> np.ndarray:
    try:
        with Image.open(path) as im:
            im.load()
            mode = im.mode
            if mode in ("I;16", "I;16B", "I;16L", "I", "F"):
                raise UnsupportedFormat(f"{path.name}: {mode} images are not 8-bit grayscale")
            if mode == "L":
                return np.array(im, dtype=np.uint8)
            if mode == "1":
                return np.array(im.convert("L"), dtype=np.uint8)
            if mode == "LA":
                return np.array(im.getchannel("L"), dtype=np.uint8)
            return _luma(np.array(im.convert("RGB")))
    except UnidentifiedImageError:
        raise UnsupportedFormat(f"{path.name}: unrecognised image format") from None


def load_image(path) -> np.ndarray:
    """Load a binary PGM (P5, maxval 255) or a PNG as a uint8 grayscale array.

    Colour PNGs are reduced to luma with ``round(0.299 R + 0.587 G + 0.114 B)``.
    """
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise UnreadableFile(f"cannot read {path}: {exc.strerror or exc}") from exc
    if data[:2] == b"P5":
        img = _read_pgm(data)
    elif data[:2] in (b"P2", b"P1", b"P4", b"P3", b"P6"):
        raise UnsupportedFormat(f"{path.name}: netpbm type {data[:2].decode()} is not a binary graymap")
    else:
        img = _read_pillow(path)
    if img.shape[0] < BLOCK or img.shape[1] < BLOCK:
        raise UnsupportedFormat(f"{path.name}: image is smaller than 8x8")
    return img


def save_image(img, path) -> None:
    """Write `img` as PGM (P5) or 8-bit gray PNG depending on the extension."""
    img = as_gray_image(img)
    path = Path(path)
    ext = path.suffix.lower()
    if ext not in (".pgm", ".png"):
        raise UnsupportedFormat(f"cannot infer image format from extension {ext!r}")
    if not path.parent.is_dir():
        raise UnwritableDestination(f"directory {path.parent} does not exist")
    try:
        if ext == ".pgm":
            h, w = img.shape
            with open(path, "wb") as fh:
                fh.write(b"P5\n%d %d\n255\n" % (w, h))
                fh.write(np.ascontiguousarray(img).tobytes())
        else:
            Image.fromarray(np.ascontiguousarray(img)).save(path, format="PNG")
    except OSError as exc:
        raise UnwritableDestination(f"cannot write {path}: {exc.strerror or exc}") from exc


def _read_pbm(data: bytes) -> np.ndarray:
    kind = data[:2]
    tokens, offset = _netpbm_header(data, 3)
    try:
        w, h = int(tokens[1]), int(tokens[2])
    except ValueError:
        raise UnsupportedFormat("malformed PBM header") from None
    if w < 1 or h < 1:
        raise EmptyBitmap("PBM has zero width or height")
    if kind == b"P4":
        stride = (w + 7) // 8
        if len(data) < offset + stride * h:
            raise UnsupportedFormat("PBM raster is shorter than declared")
        packed = np.frombuffer(data, dtype=np.uint8, count=stride * h, offset=offset)
        bits = np.unpackbits(packed.reshape(h, stride), axis=1)[:, :w]
    else:
        body = data[offset - 1:]
        digits = re.sub(rb"#[^\n]*", b"", body)
        digits = bytes(ch for ch in digits if ch in b"01")
        if len(digits) < w * h:
            raise UnsupportedFormat("PBM raster is shorter than declared")
        bits = (np.frombuffer(digits[: w * h], dtype=np.uint8) - ord("0")).reshape(h, w)
    return bits.astype(np.uint8)


def load_watermark(path) -> np.ndarray:
    """Load a watermark bitmap; PBM ink (1) and dark image pixels map to bit 1."""
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise UnreadableFile(f"cannot read {path}: {exc.strerror or exc}") from exc
    if data[:2] in (b"P1", b"P4"):
        bits = _read_pbm(data)
    else:
        gray = _read_pgm(data) if data[:2] == b"P5" else _read_pillow(path)
        bits = (gray < 128).astype(np.uint8)
    if bits.size == 0:
        raise EmptyBitmap(f"{path.name}: empty bitmap")
    return bits


def pbm_bytes(bits) -> bytes:
    """Encode a bitmap as binary PBM (P4)."""
    bits = as_bitmap(bits)
    h, w = bits.shape
    return b"P4\n%d %d\n" % (w, h) + np.packbits(bits, axis=1).tobytes()


def pbm_text(bits) -> str:
    """Encode a bitmap as plain PBM (P1), one image row per line."""
    bits = as_bitmap(bits)
    h, w = bits.shape
    rows = (" ".join(str(int(b)) for b in row) for row in bits)
    return f"P1\n{w} {h}\n" + "\n".join(rows) + "\n"


def save_watermark(bits, path) -> None:
    path = Path(path)
    if not path.parent.is_dir():
        raise UnwritableDestination(f"directory {path.parent} does not exist")
    try:
        path.write_bytes(pbm_bytes(bits))
    except OSError as exc:
        raise UnwritableDestination(f"cannot write {path}: {exc.strerror or exc}") from exc
