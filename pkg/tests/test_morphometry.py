"""Morphometry: perimeter tracing, areas, circularity, skeleton length."""

import csv
import json
import math

import numpy as np
import pytest

from podoquant.errors import (
    DimensionMismatchError,
    UnknownInstanceError,
    ZeroPerimeterError,
)
from podoquant.imgio import InstanceMap, SemanticMap
from podoquant.instances import label_components
from podoquant.morphometry import (
    MorphometryTable,
    circularity,
    instance_area,
    instance_perimeter,
    quantify,
    skeleton_length,
    skeletonize,
    write_records_csv,
    write_summary_json,
)
from podoquant.roi import RoiMask

SQRT2 = math.sqrt(2.0)


def _single_instance(mask):
    return label_components(np.asarray(mask, dtype=bool), 8)


def test_perimeter_single_pixel_convention():
    instances = _single_instance([[0, 0], [0, 1]])
    assert instance_perimeter(instances, 1, 1.0) == 4.0
    assert instance_perimeter(instances, 1, 0.5) == 2.0


def test_perimeter_small_fixtures():
    # 2x2 block, 1x3 line: four orthogonal steps each
    block = np.zeros((4, 4), dtype=bool)
    block[1:3, 1:3] = True
    assert instance_perimeter(_single_instance(block), 1, 1.0) == pytest.approx(4.0)
    line = np.zeros((3, 5), dtype=bool)
    line[1, 1:4] = True
    assert instance_perimeter(_single_instance(line), 1, 1.0) == pytest.approx(4.0)
    # diagonal pair: two diagonal steps
    diag = np.zeros((4, 4), dtype=bool)
    diag[1, 1] = diag[2, 2] = True
    assert instance_perimeter(_single_instance(diag), 1, 1.0) == pytest.approx(2 * SQRT2)
    # plus pentomino: the contour hops tip to tip diagonally
    plus = np.zeros((5, 5), dtype=bool)
    plus[2, 1:4] = True
    plus[1:4, 2] = True
    assert instance_perimeter(_single_instance(plus), 1, 1.0) == pytest.approx(4 * SQRT2)


def test_perimeter_rectangles():
    square = np.ones((10, 10), dtype=bool)
    assert instance_perimeter(_single_instance(square), 1, 1.0) == pytest.approx(36.0)
    rect = np.ones((5, 50), dtype=bool)
    assert instance_perimeter(_single_instance(rect), 1, 1.0) == pytest.approx(106.0)


def _disc_mask(radius):
    n = 2 * radius + 5
    yy, xx = np.mgrid[0:n, 0:n]
    c = n // 2
    return (yy - c) ** 2 + (xx - c) ** 2 <= radius * radius


def test_disc_circularity_frozen_values():
    # (radius, area_px, orth_steps, diag_steps) measured once and frozen;
    # the estimator is deterministic so these are exact
    expected = {
        10: (317, 32, 24, 0.9161285450303299),
        30: (2821, 96, 72, 0.9058530057940974),
        100: (31417, 328, 236, 0.9015314877396459),
    }
    for radius, (area_px, orth, diag, circ) in expected.items():
        instances = _single_instance(_disc_mask(radius))
        area = instance_area(instances, 1, 1.0)
        perim = instance_perimeter(instances, 1, 1.0)
        assert area == area_px
        assert perim == pytest.approx(orth + SQRT2 * diag, abs=1e-12)
        assert circularity(area, perim) == pytest.approx(circ, abs=1e-12)


def test_disc_circularity_ordering_over_radius():
    # with sqrt(2)-weighted contour steps the disc estimate starts high and
    # settles toward its asymptote from above as radius grows
    values = []
    for radius in (10, 30, 100):
        instances = _single_instance(_disc_mask(radius))
        area = instance_area(instances, 1, 1.0)
        perim = instance_perimeter(instances, 1, 1.0)
        values.append(circularity(area, perim))
    assert values[0] > values[1] > values[2]
    assert all(0.85 < v < 0.95 for v in values)


def test_instance_area_scales_with_pixel_size():
    instances = _single_instance(np.ones((3, 4), dtype=bool))
    assert instance_area(instances, 1, 1.0) == 12.0
    assert instance_area(instances, 1, 0.5) == pytest.approx(3.0)


def test_unknown_instance_and_zero_perimeter():
    instances = _single_instance([[1]])
    with pytest.raises(UnknownInstanceError):
        instance_area(instances, 2, 1.0)
    with pytest.raises(UnknownInstanceError):
        instance_perimeter(instances, 0, 1.0)
    with pytest.raises(ZeroPerimeterError):
        circularity(4.0, 0.0)


def test_skeleton_length_fixtures():
    line = np.zeros((3, 12), dtype=bool)
    line[1, 1:11] = True  # 10 px -> 9 links
    assert skeleton_length(line, 1.0) == pytest.approx(9.0)
    assert skeleton_length(line, 0.0227) == pytest.approx(9 * 0.0227)
    diag = np.eye(3, dtype=bool)
    assert skeleton_length(diag, 1.0) == pytest.approx(2 * SQRT2)
    corner = np.zeros((4, 4), dtype=bool)
    corner[0, 0] = corner[0, 1] = corner[1, 1] = True
    # two orthogonal links plus the diagonal shortcut
    assert skeleton_length(corner, 1.0) == pytest.approx(2 + SQRT2)
    lonely = np.zeros((3, 3), dtype=bool)
    lonely[1, 1] = True
    assert skeleton_length(lonely, 1.0) == 0.0


def test_skeletonize_is_exported_here_too():
    bar = np.zeros((5, 12), dtype=bool)
    bar[1:4, 1:11] = True
    skeleton = skeletonize(bar)
    assert (skeleton <= bar).all()
    assert skeleton.any()


def _toy_scene():
    # two foot-process squares flanking a vertical SD line
    labels = np.zeros((12, 12), dtype=np.uint8)
    labels[2:10, 1:5] = 1
    labels[2:10, 7:11] = 1
    labels[2:10, 5:7] = 2
    semantic = SemanticMap(labels)
    instances = label_components(labels == 1, 8)
    roi = RoiMask(np.ones((12, 12), dtype=bool))
    return semantic, instances, roi


def test_quantify_full_table():
    semantic, instances, roi = _toy_scene()
    table = quantify(instances, semantic, roi, pixel_size_um=1.0)
    assert [r.instance_id for r in table.records] == [1, 2]
    for record in table.records:
        assert record.area_um2 == 32.0  # 8x4 block
        assert record.perimeter_um == pytest.approx(20.0)  # (7+3)*2 contour steps
        assert record.circularity == pytest.approx(4 * math.pi * 32 / 400.0)
    assert table.roi_area_um2 == 144.0
    # the 8x2 SD strip thins to a 6-px vertical line (both bar ends lose
    # one pixel to the thinning rules), giving 5 unit links
    assert table.sd_length_um == pytest.approx(5.0)
    assert table.sd_length_density_per_um == pytest.approx(5.0 / 144.0)
    assert table.pixel_size_um == 1.0


def test_quantify_respects_roi_restriction():
    semantic, instances, _ = _toy_scene()
    empty = RoiMask(np.zeros((12, 12), dtype=bool))
    table = quantify(instances, semantic, empty, pixel_size_um=1.0)
    assert table.roi_area_um2 == 0.0
    assert table.sd_length_um == 0.0
    assert table.sd_length_density_per_um is None
    assert len(table.records) == 2  # instance features unaffected by the ROI


def test_quantify_validates_extents_and_scale():
    semantic, instances, roi = _toy_scene()
    small = RoiMask(np.ones((4, 4), dtype=bool))
    with pytest.raises(DimensionMismatchError):
        quantify(instances, semantic, small, 1.0)
    scaled = SemanticMap(semantic.labels, scale_factor=2)
    with pytest.raises(DimensionMismatchError):
        quantify(instances, scaled, roi, 1.0)
    with pytest.raises(ValueError):
        quantify(instances, semantic, roi, 0.0)


def test_quantify_pixel_size_covariance():
    semantic, instances, roi = _toy_scene()
    base = quantify(instances, semantic, roi, pixel_size_um=1.0)
    scaled = quantify(instances, semantic, roi, pixel_size_um=2.0)
    for a, b in zip(base.records, scaled.records):
        assert b.area_um2 == pytest.approx(4.0 * a.area_um2, rel=1e-12)
        assert b.perimeter_um == pytest.approx(2.0 * a.perimeter_um, rel=1e-12)
        assert b.circularity == pytest.approx(a.circularity, rel=1e-12)
    assert scaled.sd_length_density_per_um == pytest.approx(
        base.sd_length_density_per_um / 2.0, rel=1e-12
    )


def test_summarize_mean_median_and_empty():
    semantic, instances, roi = _toy_scene()
    table = quantify(instances, semantic, roi, 1.0)
    mean = table.summarize("mean")
    median = table.summarize("median")
    assert mean["area_um2"] == 32.0 and median["area_um2"] == 32.0
    with pytest.raises(ValueError):
        table.summarize("mode")
    empty = MorphometryTable([], 0.0, 0.0, None, 1.0)
    assert empty.summarize("mean")["area_um2"] is None


def test_write_records_csv_and_summary_json(tmp_path):
    semantic, instances, roi = _toy_scene()
    table = quantify(instances, semantic, roi, 1.0)
    csv_path = tmp_path / "m.csv"
    write_records_csv(table, csv_path)
    with csv_path.open() as fh:
        rows = list(csv.DictReader(fh))
    assert [row["instance_id"] for row in rows] == ["1", "2"]
    assert float(rows[0]["area_um2"]) == 32.0
    assert set(rows[0]) == {"instance_id", "area_um2", "perimeter_um", "circularity"}

    json_path = tmp_path / "s.json"
    write_summary_json(table, json_path, roi_params={"dilation_radius": 5})
    payload = json.loads(json_path.read_text())
    assert payload["instance_count"] == 2
    assert payload["roi_area_um2"] == 144.0
    assert payload["roi_params"] == {"dilation_radius": 5}

    # identical tables serialize to identical bytes
    again = tmp_path / "m2.csv"
    write_records_csv(table, again)
    assert again.read_bytes() == csv_path.read_bytes()
