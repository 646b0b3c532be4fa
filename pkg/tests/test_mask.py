import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from jndmark.errors import GeometryMismatch, InvalidRow, ValidationError
from jndmark.features import detect_corners, detect_edges
from jndmark.mask import (
    ADDITIVE,
    MULTIPLICATIVE,
    FeatureGrid,
    build_mask,
    compute_mask,
    corner_feature,
    dump_mask_rows,
    edge_feature,
    mask_image,
    mask_rows_csv,
    texture_feature,
)
from jndmark.transform import transform_image

from conftest import step_image


def one_block(mt, me, mc, ml):
    g = lambda v: np.array([[float(v)]])  # noqa: E731
    return FeatureGrid(g(mt), g(me), g(mc), g(ml))


@pytest.mark.parametrize(
    "features, expected",
    [((64, 0, 0, 128), 64.0), ((0, 64, 64, 128), 0.0), ((32, 0, 0, 0), 96.0)],
)
def test_build_mask_examples(features, expected):
    mask = build_mask(one_block(*features))
    assert mask.raw[0, 0] == expected


def test_multiplicative_mode_drops_luminance_term():
    f = one_block(32, 0, 0, 0)
    assert build_mask(f, MULTIPLICATIVE).raw[0, 0] == 32.0
    with pytest.raises(ValidationError):
        build_mask(f, "neither")


def test_unscaled_luminance_switch():
    assert build_mask(one_block(32, 0, 0, 0), luminance_weight=1.0).raw[0, 0] == 32 + 128**2


def test_texture_feature_uniform_and_log_ratio():
    assert not texture_feature(transform_image(np.full((16, 16), 90, np.uint8))).any()
    grid = np.zeros((1, 2, 8, 8))
    grid[0, 0, 0, 0] = 1e6  # DC is ignored
    grid[0, 0, 0, 1] = np.sqrt(np.exp(10.0))
    grid[0, 1, 3, 2] = np.sqrt(np.exp(5.0))
    assert np.allclose(texture_feature(grid), [[64.0, 32.0]])


def test_edge_feature_examples():
    full = np.zeros((16, 16), bool)
    full[:8, :8] = True
    assert np.array_equal(edge_feature(full), [[64, 0], [0, 0]])
    even = np.zeros((16, 16), bool)
    for r in (0, 8):
        for c in (0, 8):
            even[r, c:c + 5] = True
    assert (edge_feature(even) == 64).all()
    assert not edge_feature(np.zeros((16, 16), bool)).any()


def test_edge_feature_locality_on_step():
    m = edge_feature(detect_edges(step_image(col=36)))
    assert m[:, 4].min() > 0
    assert not np.delete(m, 4, axis=1).any()


def test_corner_feature_examples():
    assert not corner_feature(np.empty((0, 2)), (16, 16)).any()
    assert np.array_equal(corner_feature([[9, 3]], (16, 16)), [[0, 64], [0, 0]])


def test_square_corners_land_in_vertex_blocks():
    img = np.full((128, 128), 40, np.uint8)
    img[32:96, 40:104] = 200
    corners = detect_corners(img, detect_edges(img))
    m = corner_feature(corners, img.shape)
    truth = np.array([[40, 32], [103, 32], [40, 95], [103, 95]])
    # every corner sits within 2 px of a vertex, and only their blocks carry M_C
    assert len(corners) == 4
    assert all(np.abs(truth - c).max(axis=1).min() <= 2 for c in corners)
    hot = {tuple(p) for p in np.argwhere(m > 0)}
    assert hot == {(int(y) // 8, int(x) // 8) for x, y in corners}
    assert (m[m > 0] == 64).all()


def test_geometry_mismatch():
    f = FeatureGrid(np.zeros((2, 2)), np.zeros((2, 2)), np.zeros((2, 3)), np.zeros((2, 2)))
    with pytest.raises(GeometryMismatch):
        build_mask(f)


def test_all_zero_raw_gives_zero_normalized():
    mask = build_mask(one_block(0, 10, 10, 128))
    assert mask.raw[0, 0] == 0 and mask.normalized[0, 0] == 0


def test_photo_mask_shape_and_range(photo_mask):
    assert photo_mask.raw.shape == (64, 64)
    assert np.isfinite(photo_mask.raw).all() and (photo_mask.raw >= 0).all()
    assert photo_mask.normalized.max() == 1.0 and photo_mask.normalized.min() >= 0
    assert photo_mask.luminance_mode == ADDITIVE


def test_textured_blocks_get_the_largest_texture_term(busy_photo):
    # the busy gravel photo is texture everywhere; its mean M_T beats the smoother launchpad
    from jndmark import data

    smooth = texture_feature(transform_image(data.photo("launchpad"))).mean()
    busy = texture_feature(transform_image(busy_photo)).mean()
    assert busy > smooth


def test_csv_dump(photo_mask, tmp_path):
    text = mask_rows_csv(photo_mask, [32])
    lines = text.splitlines()
    assert lines[0] == "block_col,row_32"
    assert len(lines) == 65
    values = [float(line.split(",")[1]) for line in lines[1:]]
    assert all(0 <= v <= 1 for v in values)
    assert all(len(line.split(",")[1].split(".")[1]) == 6 for line in lines[1:])
    assert mask_rows_csv(photo_mask, []) == "block_col\n"
    two = mask_rows_csv(photo_mask, [32, 50]).splitlines()
    assert two[0] == "block_col,row_32,row_50" and len(two) == 65
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    dump_mask_rows(photo_mask, [32, 50], a)
    dump_mask_rows(photo_mask, [32, 50], b)
    assert a.read_bytes() == b.read_bytes()
    assert b"\r" not in a.read_bytes()


@pytest.mark.parametrize("rows", [[64], [-1], [3, 99]])
def test_invalid_rows(photo_mask, rows):
    with pytest.raises(InvalidRow):
        mask_rows_csv(photo_mask, rows)


def test_mask_image(photo_mask):
    vis = mask_image(photo_mask)
    assert vis.shape == (512, 512) and vis.max() == 255


def test_mask_deterministic(photo, photo_mask):
    again = compute_mask(photo)
    assert np.array_equal(again.raw, photo_mask.raw)


# property tests over randomized feature grids

scores = st.floats(0, 64, allow_nan=False)
grids = arrays(np.float64, (3, 4), elements=scores)
# block means are multiples of 1/64, so mirrored values are exact
lum_steps = st.integers(0, 128 * 64)


@st.composite
def feature_grids(draw):
    lum = np.array(draw(arrays(np.int64, (3, 4), elements=st.integers(0, 255 * 64)))) / 64
    return FeatureGrid(draw(grids), draw(grids), draw(grids), lum)


def _replace(f, **kw):
    fields = dict(texture=f.texture, edge=f.edge, corner=f.corner, luminance=f.luminance)
    fields.update(kw)
    return FeatureGrid(**fields)


@settings(max_examples=200, deadline=None)
@given(feature_grids(), st.sampled_from([ADDITIVE, MULTIPLICATIVE]))
def test_nonnegative_and_normalized(f, mode):
    mask = build_mask(f, mode)
    assert (mask.raw >= 0).all()
    assert (mask.normalized >= 0).all() and (mask.normalized <= 1).all()
    if mask.raw.max() > 0:
        assert mask.normalized.max() == 1.0
        assert np.allclose(mask.normalized, mask.raw / mask.raw.max())


@settings(max_examples=200, deadline=None)
@given(feature_grids(), st.integers(0, 11), st.floats(0, 64))
def test_monotone_in_texture(f, idx, bump):
    t = f.texture.copy()
    t.flat[idx] += bump
    assert build_mask(_replace(f, texture=t)).raw.flat[idx] >= build_mask(f).raw.flat[idx]


@settings(max_examples=200, deadline=None)
@given(feature_grids(), st.integers(0, 11), st.floats(0, 64), st.sampled_from(["edge", "corner"]))
def test_anti_monotone_in_edges_and_corners(f, idx, bump, which):
    g = getattr(f, which).copy()
    g.flat[idx] += bump
    assert build_mask(_replace(f, **{which: g})).raw.flat[idx] <= build_mask(f).raw.flat[idx]


@settings(max_examples=200, deadline=None)
@given(feature_grids(), lum_steps)
def test_luminance_parabola_symmetric(f, step):
    d = step / 64
    up = build_mask(_replace(f, luminance=np.full((3, 4), 128 + d))).raw
    down = build_mask(_replace(f, luminance=np.full((3, 4), 128 - d))).raw
    mid = build_mask(_replace(f, luminance=np.full((3, 4), 128.0))).raw
    assert np.array_equal(up, down)
    assert (up >= mid).all()
