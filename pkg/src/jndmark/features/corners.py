"""Curvature scale space corner detection with an adaptive threshold.

Edge pixels are thinned and linked into ordered contours, small gaps between
contour ends are bridged, and each contour is smoothed at one fixed low scale.
Corners are local maxima of absolute curvature that beat ``ratio`` times the
mean curvature over their region of support (the stretch between the
neighbouring curvature minima) and whose corner angle is sharp enough.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage
from scipy.spatial import cKDTree
from skimage.morphology import thin

# 4-neighbours first so that traced chains prefer straight steps
_NEIGHBOURS = ((0, 1), (1, 0), (0, -1), (-1, 0), (1, 1), (1, -1), (-1, -1), (-1, 1))


@dataclass(frozen=True)
class CssParams:
    sigma: float = 3.0
    ratio: float = 1.5
    max_angle: float = 162.0
    gap: int = 2
    min_length: int = 12


@dataclass
class Contour:
    points: np.ndarray  # (n, 2) integer (row, col)
    closed: bool


def _trace(mask: np.ndarray, visited: np.ndarray, start: tuple[int, int]) -> list[tuple[int, int]]:
    h, w = mask.shape
    path = [start]
    visited[start] = True
    r, c = start
    while True:
        for dr, dc in _NEIGHBOURS:
            rr, cc = r + dr, c + dc
            if 0 <= rr < h and 0 <= cc < w and mask[rr, cc] and not visited[rr, cc]:
                r, c = rr, cc
                visited[r, c] = True
                path.append((r, c))
                break
        else:
            return path


def _adjacent(a, b, dist: float = 1.5) -> bool:
    return abs(a[0] - b[0]) <= dist and abs(a[1] - b[1]) <= dist


def link_contours(edges: np.ndarray) -> list[Contour]:
    """Link a thin binary edge map into ordered 8-connected pixel chains.

    Chains are started from end points first (pixels with a single neighbour)
    in raster order, then from any remaining pixels, which belong to loops.
    """
    mask = np.asarray(edges, dtype=bool)
    visited = np.zeros_like(mask)
    counts = ndimage.convolve(mask.astype(np.int32), np.ones((3, 3), np.int32), mode="constant") - 1
    ends = np.argwhere(mask & (counts == 1))
    contours = []
    for r, c in ends:
        if not visited[r, c]:
            contours.append(Contour(np.array(_trace(mask, visited, (r, c))), False))
    for r, c in np.argwhere(mask):
        if visited[r, c]:
            continue
        forward = _trace(mask, visited, (r, c))
        backward = _trace(mask, visited, (r, c))[1:]
        path = backward[::-1] + forward
        closed = len(path) > 4 and _adjacent(path[0], path[-1])
        contours.append(Contour(np.array(path), closed))
    return contours


def _bridge(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Integer points strictly between pixels a and b on the segment a-b."""
    n = int(max(abs(b[0] - a[0]), abs(b[1] - a[1])))
    if n <= 1:
        return np.empty((0, 2), dtype=int)
    t = np.arange(1, n)[:, None] / n
    return np.rint(a + t * (b - a)).astype(int)


def fill_gaps(contours: list[Contour], gap: int) -> list[Contour]:
    """Join open contour ends separated by at most `gap` missing pixels.

    Candidate end pairs from different contours are linked closest first,
    each end at most once and never so as to form a cycle of contours; the
    linked chains are then concatenated with straight bridging pixels.
    Finally an open contour whose own ends are within reach is closed.
    """
    reach = gap + 1
    open_ = [c for c in contours if not c.closed and len(c.points) > 1]
    done = [c for c in contours if c.closed or len(c.points) <= 1]
    if len(open_) > 1:
        ends = np.array([e for c in open_ for e in (c.points[0], c.points[-1])])
        tree = cKDTree(ends)
        pairs = [
            (max(abs(ends[a] - ends[b])), a, b)
            for a, b in tree.query_pairs(reach, p=np.inf)
            if a // 2 != b // 2
        ]
        pairs.sort()
        parent = list(range(len(open_)))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        link = {}
        for _, a, b in pairs:
            if a in link or b in link:
                continue
            ra, rb = find(a // 2), find(b // 2)
            if ra == rb:
                continue
            parent[ra] = rb
            link[a] = b
            link[b] = a
        merged = []
        seen = set()
        # walk each chain from a contour end that has no partner
        for start in range(len(ends)):
            if start // 2 in seen or start in link:
                continue
            end = start
            pieces = []
            while True:
                ci = end // 2
                seen.add(ci)
                pts = open_[ci].points if end % 2 == 0 else open_[ci].points[::-1]
                if pieces:
                    pieces.append(_bridge(pieces[-1][-1], pts[0]))
                pieces.append(pts)
                other = end ^ 1
                if other not in link:
                    break
                end = link[other]
            merged.append(Contour(np.vstack(pieces), False))
        open_ = merged
    for c in open_:
        p = c.points
        d = max(abs(p[0][0] - p[-1][0]), abs(p[0][1] - p[-1][1]))
        if d <= reach and len(p) > 4 * reach:
            done.append(Contour(np.vstack([p, _bridge(p[-1], p[0])]), True))
        else:
            done.append(c)
    return done


def _smooth(values: np.ndarray, sigma: float, closed: bool) -> np.ndarray:
    if closed:
        return ndimage.gaussian_filter1d(values, sigma, mode="wrap")
    # point-symmetric extension keeps open ends straight instead of bending them
    ext = min(int(np.ceil(4 * sigma)), len(values) - 1)
    head = 2 * values[0] - values[ext:0:-1]
    tail = 2 * values[-1] - values[-2:-ext - 2:-1]
    padded = np.concatenate([head, values, tail])
    return ndimage.gaussian_filter1d(padded, sigma, mode="nearest")[ext:ext + len(values)]


def _derivatives(v: np.ndarray, closed: bool) -> tuple[np.ndarray, np.ndarray]:
    # central differences of the smoothed curve; scipy's derivative-of-Gaussian
    # kernels are poorly normalised at low frequencies and bias the curvature
    if closed:
        nxt, prev = np.roll(v, -1), np.roll(v, 1)
        return (nxt - prev) / 2, nxt - 2 * v + prev
    d1 = np.gradient(v)
    return d1, np.gradient(d1)


def _arc_length(points: np.ndarray, closed: bool) -> np.ndarray:
    pts = np.vstack([points, points[:1]]) if closed else points
    steps = np.hypot(*np.diff(pts.astype(np.float64), axis=0).T)
    return np.concatenate([[0.0], np.cumsum(steps)])


@dataclass
class SmoothedCurve:
    """A contour resampled at unit arc length and Gaussian smoothed."""

    x: np.ndarray
    y: np.ndarray
    kappa: np.ndarray
    # for each resampled position, the nearest original pixel index
    source: np.ndarray
    closed: bool


def smooth_curve(points: np.ndarray, sigma: float, closed: bool) -> SmoothedCurve:
    """Resample a pixel chain at unit arc length, smooth it and take its curvature.

    Resampling matters: diagonal steps (length sqrt 2) and straight steps
    (length 1) would otherwise be smoothed as if equal, which puts curvature
    ripple on every digitised curve.
    """
    s = _arc_length(points, closed)
    total = s[-1]
    n = max(int(np.round(total)), 3)
    t = np.linspace(0.0, total, n, endpoint=not closed)
    pts = np.vstack([points, points[:1]]) if closed else points
    y = np.interp(t, s, pts[:, 0].astype(np.float64))
    x = np.interp(t, s, pts[:, 1].astype(np.float64))
    xs, ys = _smooth(x, sigma, closed), _smooth(y, sigma, closed)
    x1, x2 = _derivatives(xs, closed)
    y1, y2 = _derivatives(ys, closed)
    speed = (x1**2 + y1**2) ** 1.5
    kappa = (x1 * y2 - x2 * y1) / np.where(speed > 0, speed, np.inf)
    src = np.clip(np.searchsorted(s, t), 0, len(points) - 1)
    prev = np.clip(src - 1, 0, len(points) - 1)
    src = np.where(np.abs(s[prev] - t) < np.abs(s[np.minimum(src, len(s) - 1)] - t), prev, src)
    return SmoothedCurve(xs, ys, kappa, src % len(points), closed)


def curvature(points: np.ndarray, sigma: float, closed: bool) -> np.ndarray:
    """Signed curvature per unit-arc-length sample of a smoothed pixel chain."""
    return smooth_curve(points, sigma, closed).kappa


def _extrema(k: np.ndarray, closed: bool) -> tuple[np.ndarray, np.ndarray]:
    if closed:
        prev, nxt = np.roll(k, 1), np.roll(k, -1)
        idx = np.arange(len(k))
    else:
        prev, nxt = k[:-2], k[2:]
        idx = np.arange(1, len(k) - 1)
        k = k[1:-1]
    maxima = idx[(k > prev) & (k >= nxt)]
    minima = idx[(k < prev) & (k <= nxt)]
    return maxima, minima


def _angle(curve: SmoothedCurve, i: int, reach: int) -> float:
    """Angle in degrees between chords to the smoothed points `reach` samples away."""
    n = len(curve.x)
    if curve.closed:
        back, fwd = (i - reach) % n, (i + reach) % n
    else:
        back, fwd = max(i - reach, 0), min(i + reach, n - 1)
    u = np.array([curve.x[back] - curve.x[i], curve.y[back] - curve.y[i]])
    v = np.array([curve.x[fwd] - curve.x[i], curve.y[fwd] - curve.y[i]])
    nu, nv = np.hypot(*u), np.hypot(*v)
    if nu == 0 or nv == 0:
        return 180.0
    cos = np.clip(np.dot(u, v) / (nu * nv), -1.0, 1.0)
    return float(np.degrees(np.arccos(cos)))


def contour_corners(contour: Contour, params: CssParams) -> list[int]:
    """Indices of the pixels of `contour` accepted as corners."""
    pts = contour.points
    if len(pts) < params.min_length:
        return []
    curve = smooth_curve(pts, params.sigma, contour.closed)
    k = np.abs(curve.kappa)
    n = len(k)
    maxima, minima = _extrema(k, contour.closed)
    margin = 0 if contour.closed else int(np.ceil(params.sigma))
    reach = int(np.ceil(3 * params.sigma))
    corners = []
    for i in maxima:
        if not contour.closed and (i < margin or i >= n - margin):
            continue
        before = minima[minima < i]
        after = minima[minima > i]
        if contour.closed:
            lo = before[-1] if len(before) else (minima[-1] - n if len(minima) else i - n // 2)
            hi = after[0] if len(after) else (minima[0] + n if len(minima) else i + n // 2)
        else:
            lo = before[-1] if len(before) else 0
            hi = after[0] if len(after) else n - 1
        support = k[np.arange(lo, hi + 1) % n]
        if k[i] <= params.ratio * support.mean():
            continue
        if _angle(curve, i, reach) > params.max_angle:
            continue
        corners.append(int(curve.source[i]))
    return corners


def detect_corners(img, edges, params: CssParams | None = None) -> np.ndarray:
    """Corner points as an ``(n, 2)`` int array of ``(x, y)`` = (column, row).

    `img` is accepted for interface symmetry with the edge detector; the
    corners are derived from the contours in `edges` alone.
    """
    params = params or CssParams()
    skeleton = thin(np.asarray(edges, dtype=bool))
    contours = fill_gaps(link_contours(skeleton), params.gap)
    found = []
    for c in contours:
        for i in contour_corners(c, params):
            r, col = c.points[i]
            found.append((int(col), int(r)))
    if not found:
        return np.empty((0, 2), dtype=int)
    shape = np.asarray(edges).shape
    pts = np.unique(np.array(found), axis=0)
    inside = (pts[:, 0] >= 0) & (pts[:, 0] < shape[1]) & (pts[:, 1] >= 0) & (pts[:, 1] < shape[0])
    return pts[inside]
