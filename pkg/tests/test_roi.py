"""ROI detection: structuring elements, upsampling, the detection chain."""

import numpy as np
import pytest

from podoquant.imgio import SemanticMap
from podoquant.instances import sd_binary_mask
from podoquant.roi import (
    RoiMask,
    RoiParams,
    cross,
    detect_roi,
    dilate,
    disc,
    erode,
    filter_components_by_area,
    upsample_nearest,
)
from podoquant.synth import SynthSpec, generate_voronoi_semantic


def test_structuring_element_shapes():
    assert set(disc(0).offsets) == {(0, 0)}
    assert set(disc(1).offsets) == {(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)}
    assert len(disc(2).offsets) == 13
    assert set(cross(1).offsets) == set(disc(1).offsets)
    assert len(cross(2).offsets) == 9
    with pytest.raises(ValueError):
        disc(-1)
    with pytest.raises(ValueError):
        cross(-2)


def test_dilate_then_erode_wrappers():
    mask = np.zeros((9, 9), dtype=bool)
    mask[4, 4] = True
    grown = dilate(mask, disc(2))
    assert grown.sum() == 13
    back = erode(grown, disc(2))
    assert np.array_equal(back, mask)


def test_erode_border_argument():
    mask = np.ones((4, 4), dtype=bool)
    assert erode(mask, cross(1), 1, border="foreground").all()
    strict = erode(mask, cross(1), 1, border="zero")
    assert strict.sum() == 4
    with pytest.raises(ValueError):
        erode(mask, cross(1), 1, border="wrap")


def test_upsample_nearest_blocks():
    semantic = SemanticMap(np.array([[1, 2], [0, 0]], dtype=np.uint8), scale_factor=2)
    up = upsample_nearest(semantic, 2)
    assert up.scale_factor == 1
    assert np.array_equal(
        up.labels,
        [
            [1, 1, 2, 2],
            [1, 1, 2, 2],
            [0, 0, 0, 0],
            [0, 0, 0, 0],
        ],
    )


def test_upsample_nearest_identity_and_validation():
    semantic = SemanticMap(np.array([[1]], dtype=np.uint8), scale_factor=3)
    same = upsample_nearest(semantic, 1)
    assert same.scale_factor == 3
    assert np.array_equal(same.labels, semantic.labels)
    with pytest.raises(ValueError):
        upsample_nearest(semantic, 2)  # 2 does not divide 3
    with pytest.raises(ValueError):
        upsample_nearest(semantic, 0)


def test_filter_components_by_area():
    mask = np.zeros((8, 8), dtype=bool)
    mask[0:2, 0:2] = True  # area 4
    mask[6, 6] = True  # area 1
    kept = filter_components_by_area(mask, 2)
    assert kept[0:2, 0:2].all() and not kept[6, 6]
    assert np.array_equal(filter_components_by_area(mask, 5), np.zeros((8, 8), dtype=bool))
    with pytest.raises(ValueError):
        filter_components_by_area(mask, -1)


def test_roi_params_validation():
    with pytest.raises(ValueError):
        RoiParams(dilation_radius=-1)
    with pytest.raises(ValueError):
        RoiParams(erosion_iterations=-1)
    with pytest.raises(ValueError):
        RoiParams(dilation_radius=1, dilation_iterations=1, erosion_iterations=5)


def test_roi_mask_area():
    mask = RoiMask(np.array([[True, False], [True, True]]))
    assert mask.area_px == 3
    assert mask.width == 2 and mask.height == 2


def _sd_map(h, w, sd_pixels):
    labels = np.ones((h, w), dtype=np.uint8)
    for y, x in sd_pixels:
        labels[y, x] = 2
    return SemanticMap(labels)


def test_detect_roi_contains_sd_pixels_everywhere():
    # SD pixels in the interior, at edges and at corners must all stay inside
    semantic = _sd_map(32, 32, [(0, 0), (0, 16), (31, 31), (16, 16), (31, 0)])
    params = RoiParams(dilation_radius=2, dilation_iterations=3,
                       erosion_iterations=2, min_component_area=0)
    roi = detect_roi(semantic, params)
    sd = sd_binary_mask(semantic)
    assert (sd <= roi.bits).all()


def test_detect_roi_on_random_synthetic_maps():
    for seed in range(5):
        spec = SynthSpec(width=80, height=64, n_seeds=4 + seed, rng_seed=seed)
        semantic, _ = generate_voronoi_semantic(spec)
        params = RoiParams(dilation_radius=3, dilation_iterations=3,
                           erosion_iterations=2, min_component_area=0)
        roi = detect_roi(semantic, params)
        assert (sd_binary_mask(semantic) <= roi.bits).all()


def test_detect_roi_empty_without_sd():
    semantic = SemanticMap(np.ones((16, 16), dtype=np.uint8))
    roi = detect_roi(semantic, RoiParams(min_component_area=0))
    assert roi.area_px == 0


def test_detect_roi_area_filter_drops_islands():
    semantic = _sd_map(64, 64, [(10, 10), (50, 50), (50, 51), (51, 50), (51, 51)])
    params = RoiParams(dilation_radius=1, dilation_iterations=2,
                       erosion_iterations=1, min_component_area=10)
    roi = detect_roi(semantic, params)
    # the single-pixel island grows to 5 px, the 2x2 cluster to 12 px, so a
    # 10 px floor keeps only the cluster
    assert roi.bits[50, 50]
    assert not roi.bits[10, 10]
    unfiltered = detect_roi(semantic, RoiParams(
        dilation_radius=1, dilation_iterations=2, erosion_iterations=1,
        min_component_area=0))
    assert unfiltered.bits[10, 10]


def test_detect_roi_restores_full_resolution():
    labels = np.zeros((8, 8), dtype=np.uint8)
    labels[3:5, 3:5] = 2
    semantic = SemanticMap(labels, scale_factor=2)
    params = RoiParams(dilation_radius=1, dilation_iterations=1,
                       erosion_iterations=0, min_component_area=0)
    before = detect_roi(semantic, params)
    assert before.bits.shape == (16, 16)
    after = detect_roi(
        semantic,
        RoiParams(dilation_radius=1, dilation_iterations=1, erosion_iterations=0,
                  min_component_area=0, upsample_first=False),
    )
    assert after.bits.shape == (16, 16)
    # morphology before upsampling grows in coarse pixels, so the two orders
    # legitimately differ; both must still contain the SD pixels
    sd_full = np.repeat(np.repeat(labels == 2, 2, axis=0), 2, axis=1)
    assert (sd_full <= before.bits).all()
    assert (sd_full <= after.bits).all()


def test_detect_roi_deterministic():
    semantic, _ = generate_voronoi_semantic(SynthSpec(width=64, height=64, n_seeds=5, rng_seed=3))
    params = RoiParams(dilation_radius=2, dilation_iterations=2,
                       erosion_iterations=1, min_component_area=10)
    a = detect_roi(semantic, params)
    b = detect_roi(semantic, params)
    assert np.array_equal(a.bits, b.bits)
