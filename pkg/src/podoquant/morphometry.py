"""Per-instance morphometry and slit-diaphragm length density.

Instance features: area (pixel count), perimeter (contour walk over pixel
centers, orthogonal steps count 1 and diagonal steps sqrt(2), single pixels
count 4), and circularity 4*pi*A/P^2.  The slit-diaphragm length comes from
skeletonizing SD pixels inside the ROI and summing unique 8-adjacency links
(1 per orthogonal link, sqrt(2) per diagonal link).
"""

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kernels
from .errors import (
    DimensionMismatchError,
    MaskWriteError,
    UnknownInstanceError,
    ZeroPerimeterError,
)
from .instances import sd_binary_mask

_SQRT2 = math.sqrt(2.0)

# Clockwise Moore neighborhood starting East, as (dy, dx).
_DIRS = ((0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1), (-1, 0), (-1, 1))
_DIR_INDEX = {d: i for i, d in enumerate(_DIRS)}


def _trace_contour_steps(mask):
    """Count (orthogonal, diagonal) steps of the closed outer contour.

    Walks pixel centers clockwise with a radial sweep from the backtrack
    direction and stops when the initial transition repeats, so pinched
    shapes traverse their full contour.
    """
    ys, xs = np.nonzero(mask)
    if ys.size == 0:
        return 0, 0
    if ys.size == 1:
        return 4, 0
    h, w = mask.shape
    sy, sx = int(ys[0]), int(xs[0])

    def next_pixel(cy, cx, back_idx):
        for k in range(1, 9):
            d = (back_idx + k) % 8
            dy, dx = _DIRS[d]
            ny, nx = cy + dy, cx + dx
            if 0 <= ny < h and 0 <= nx < w and mask[ny, nx]:
                return (ny, nx), d
        return None, None

    start = (sy, sx)
    # West of the raster-first pixel is background, so start the sweep there.
    first, d0 = next_pixel(sy, sx, 4)
    if first is None:
        return 4, 0
    n_orth, n_diag = 0, 0
    if _DIRS[d0][0] and _DIRS[d0][1]:
        n_diag += 1
    else:
        n_orth += 1
    prev, cur = start, first
    while True:
        back = _DIR_INDEX[(prev[0] - cur[0], prev[1] - cur[1])]
        nxt, d = next_pixel(cur[0], cur[1], back)
        if cur == start and nxt == first and d == d0:
            break
        if _DIRS[d][0] and _DIRS[d][1]:
            n_diag += 1
        else:
            n_orth += 1
        prev, cur = cur, nxt
    return n_orth, n_diag


def _instance_mask(instances, instance_id):
    if not 1 <= instance_id <= instances.count:
        raise UnknownInstanceError(
            f"instance id {instance_id} outside 1..{instances.count}"
        )
    ys, xs = np.nonzero(instances.labels == instance_id)
    if ys.size == 0:
        raise UnknownInstanceError(f"instance id {instance_id} has no pixels")
    y0, y1 = int(ys.min()), int(ys.max())
    x0, x1 = int(xs.min()), int(xs.max())
    crop = instances.labels[y0 : y1 + 1, x0 : x1 + 1] == instance_id
    return crop


def instance_area(instances, instance_id, pixel_size_um):
    """Area of one instance in square micrometers."""
    if not 1 <= instance_id <= instances.count:
        raise UnknownInstanceError(
            f"instance id {instance_id} outside 1..{instances.count}"
        )
    n = int((instances.labels == instance_id).sum())
    return n * pixel_size_um * pixel_size_um


def instance_perimeter(instances, instance_id, pixel_size_um):
    """Perimeter of one instance in micrometers (contour walk, see module doc)."""
    crop = _instance_mask(instances, instance_id)
    n_orth, n_diag = _trace_contour_steps(crop)
    return (n_orth + _SQRT2 * n_diag) * pixel_size_um


def circularity(area_um2, perimeter_um):
    """Shape compactness 4*pi*A/P^2; 1 for an ideal disc."""
    if perimeter_um <= 0:
        raise ZeroPerimeterError(f"perimeter must be positive, got {perimeter_um}")
    return 4.0 * math.pi * area_um2 / (perimeter_um * perimeter_um)


def skeletonize(mask):
    """Thin a binary mask to 1-px-wide curves (component count preserved)."""
    return kernels.skeletonize(mask)


def skeleton_length(skeleton, pixel_size_um):
    """Total curve length: unique 8-adjacency links, diagonals weighted sqrt(2).

    Isolated pixels contribute zero length.
    """
    m = np.asarray(skeleton, dtype=bool)
    orth = int((m[:, 1:] & m[:, :-1]).sum()) + int((m[1:, :] & m[:-1, :]).sum())
    diag = int((m[1:, 1:] & m[:-1, :-1]).sum()) + int((m[1:, :-1] & m[:-1, 1:]).sum())
    return (orth + _SQRT2 * diag) * pixel_size_um


@dataclass(frozen=True)
class MorphometryRecord:
    """Features of one foot-process instance."""

    instance_id: int
    area_um2: float
    perimeter_um: float
    circularity: float


@dataclass
class MorphometryTable:
    """Per-instance records plus image-level slit-diaphragm statistics.

    ``sd_length_density_per_um`` is None when the ROI is empty (density is
    undefined there); everything else is always populated.
    """

    records: list
    sd_length_um: float
    roi_area_um2: float
    sd_length_density_per_um: float
    pixel_size_um: float

    def feature_values(self, feature):
        return np.array([getattr(r, feature) for r in self.records], dtype=np.float64)

    def summarize(self, agg="mean"):
        """Aggregate per-instance features with ``mean`` or ``median``."""
        if agg not in ("mean", "median"):
            raise ValueError(f"agg must be 'mean' or 'median', got {agg!r}")
        fn = np.mean if agg == "mean" else np.median
        out = {}
        for feature in ("area_um2", "perimeter_um", "circularity"):
            values = self.feature_values(feature)
            out[feature] = float(fn(values)) if values.size else None
        return out


def quantify(instances, semantic, roi_mask, pixel_size_um):
    """Compute the full morphometry table for one image.

    Args:
        instances: foot-process instance map.
        semantic: full-resolution semantic map (for slit-diaphragm pixels).
        roi_mask: :class:`~podoquant.roi.RoiMask` restricting the SD network.
        pixel_size_um: physical pixel size.

    Returns:
        :class:`MorphometryTable`; records are ordered by instance id.
    """
    if semantic.scale_factor != 1:
        raise DimensionMismatchError("quantify needs a full-resolution semantic map")
    shape = instances.labels.shape
    if semantic.labels.shape != shape or roi_mask.bits.shape != shape:
        raise DimensionMismatchError(
            f"instances {shape}, semantic {semantic.labels.shape} and "
            f"ROI {roi_mask.bits.shape} must share one extent"
        )
    if not pixel_size_um > 0:
        raise ValueError(f"pixel_size_um must be positive, got {pixel_size_um}")

    areas_px = np.bincount(instances.labels.ravel(), minlength=instances.count + 1)
    bboxes = _instance_bboxes(instances)
    records = []
    for instance_id in range(1, instances.count + 1):
        y0, y1, x0, x1 = bboxes[instance_id]
        crop = instances.labels[y0 : y1 + 1, x0 : x1 + 1] == instance_id
        n_orth, n_diag = _trace_contour_steps(crop)
        area = int(areas_px[instance_id]) * pixel_size_um * pixel_size_um
        perimeter = (n_orth + _SQRT2 * n_diag) * pixel_size_um
        records.append(
            MorphometryRecord(
                instance_id=instance_id,
                area_um2=area,
                perimeter_um=perimeter,
                circularity=circularity(area, perimeter),
            )
        )

    sd_in_roi = sd_binary_mask(semantic) & roi_mask.bits
    skeleton = kernels.skeletonize(sd_in_roi)
    sd_length = skeleton_length(skeleton, pixel_size_um)
    roi_area = roi_mask.area_px * pixel_size_um * pixel_size_um
    density = sd_length / roi_area if roi_area > 0 else None
    return MorphometryTable(
        records=records,
        sd_length_um=sd_length,
        roi_area_um2=roi_area,
        sd_length_density_per_um=density,
        pixel_size_um=pixel_size_um,
    )


def _instance_bboxes(instances):
    """Bounding boxes (y0, y1, x0, x1) indexed by instance id, one pass."""
    labels = instances.labels
    h, w = labels.shape
    n = instances.count
    ys, xs = np.nonzero(labels)
    ids = labels[ys, xs]
    y_min = np.full(n + 1, h, dtype=np.int64)
    y_max = np.full(n + 1, -1, dtype=np.int64)
    x_min = np.full(n + 1, w, dtype=np.int64)
    x_max = np.full(n + 1, -1, dtype=np.int64)
    np.minimum.at(y_min, ids, ys)
    np.maximum.at(y_max, ids, ys)
    np.minimum.at(x_min, ids, xs)
    np.maximum.at(x_max, ids, xs)
    return [
        (int(y_min[i]), int(y_max[i]), int(x_min[i]), int(x_max[i]))
        for i in range(n + 1)
    ]


_CSV_HEADER = ("instance_id", "area_um2", "perimeter_um", "circularity")


def write_records_csv(table, path):
    """Write the per-instance feature table as CSV."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(_CSV_HEADER)
            for r in table.records:
                writer.writerow(
                    [r.instance_id, repr(r.area_um2), repr(r.perimeter_um), repr(r.circularity)]
                )
    except OSError as exc:
        raise MaskWriteError(f"cannot write table {path}: {exc}") from exc


def write_summary_json(table, path, roi_params=None):
    """Write image-level statistics (and the ROI knobs used) as JSON."""
    payload = {
        "sd_length_um": table.sd_length_um,
        "roi_area_um2": table.roi_area_um2,
        "sd_length_density_per_um": table.sd_length_density_per_um,
        "pixel_size_um": table.pixel_size_um,
        "instance_count": len(table.records),
    }
    if roi_params is not None:
        payload["roi_params"] = roi_params
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise MaskWriteError(f"cannot write summary {path}: {exc}") from exc
