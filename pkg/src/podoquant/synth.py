"""Synthetic semantic maps with known ground truth.

Seeds are scattered uniformly without replacement; each pixel joins the
nearest seed (squared Euclidean distance, ties to the lowest seed index),
which yields a Voronoi partition.  Pixels whose Chebyshev neighborhood of
radius ``sd_thickness`` touches another cell become slit diaphragm, the
rest foot process, so cell interiors are separated by an SD band.  A spec
is only accepted when every cell keeps an 8-connected foot-process core;
otherwise seeds are redrawn deterministically from the same stream.
"""

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import MaskWriteError, SeedPlacementError
from .imgio import SemanticMap

_MAX_ATTEMPTS = 25


@dataclass(frozen=True)
class SynthSpec:
    """Parameters of one synthetic map."""

    width: int = 1024
    height: int = 1024
    n_seeds: int = 150
    sd_thickness: int = 1
    rng_seed: int = 0

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError(f"extent must be >= 1, got {self.width}x{self.height}")
        if self.n_seeds < 1:
            raise ValueError(f"n_seeds must be >= 1, got {self.n_seeds}")
        if self.sd_thickness < 1:
            raise ValueError(f"sd_thickness must be >= 1, got {self.sd_thickness}")


@dataclass(frozen=True)
class VoronoiGroundTruth:
    """What the generator knows about the map it produced."""

    instance_count: int
    seeds: tuple  # (x, y) per seed, in seed index order
    cell_areas_px: tuple  # foot-process pixels per seed

    def to_json_dict(self):
        return {
            "instance_count": self.instance_count,
            "seeds": [list(s) for s in self.seeds],
            "cell_areas_px": list(self.cell_areas_px),
        }


def _nearest_seed_labels(height, width, seed_ys, seed_xs):
    """Index of the closest seed per pixel; ties go to the lowest index."""
    ys = np.arange(height, dtype=np.int64)
    xs = np.arange(width, dtype=np.int64)
    labels = np.empty((height, width), dtype=np.int32)
    sy = seed_ys.astype(np.int64)
    sx = seed_xs.astype(np.int64)
    # Chunk rows to bound the (rows, n_seeds, width) intermediate.
    chunk = max(1, int(4_000_000 // (max(len(sy), 1) * width) or 1))
    dx2 = (xs[None, :] - sx[:, None]) ** 2  # (n_seeds, width)
    for y0 in range(0, height, chunk):
        y1 = min(y0 + chunk, height)
        dy2 = (ys[y0:y1, None] - sy[None, :]) ** 2  # (rows, n_seeds)
        dist = dy2[:, :, None] + dx2[None, :, :]  # (rows, n_seeds, width)
        labels[y0:y1] = np.argmin(dist, axis=1).astype(np.int32)
    return labels


def _sd_band(cell_labels, thickness):
    """Pixels whose Chebyshev ball of radius ``thickness`` crosses a cell edge."""
    h, w = cell_labels.shape
    padded = np.pad(cell_labels, thickness, mode="edge")
    band = np.zeros((h, w), dtype=bool)
    for dy in range(-thickness, thickness + 1):
        for dx in range(-thickness, thickness + 1):
            if dy == 0 and dx == 0:
                continue
            window = padded[thickness + dy : thickness + dy + h, thickness + dx : thickness + dx + w]
            band |= window != cell_labels
    return band


def _cell_bboxes(cell_labels, n_cells):
    """Bounding boxes (y0, y1, x0, x1) per cell index, one pass."""
    h, w = cell_labels.shape
    flat = cell_labels.ravel()
    rows = np.repeat(np.arange(h, dtype=np.int64), w)
    cols = np.tile(np.arange(w, dtype=np.int64), h)
    y0 = np.full(n_cells, h, dtype=np.int64)
    y1 = np.full(n_cells, -1, dtype=np.int64)
    x0 = np.full(n_cells, w, dtype=np.int64)
    x1 = np.full(n_cells, -1, dtype=np.int64)
    np.minimum.at(y0, flat, rows)
    np.maximum.at(y1, flat, rows)
    np.minimum.at(x0, flat, cols)
    np.maximum.at(x1, flat, cols)
    return y0, y1, x0, x1


def _cell_connected(cell_mask):
    """8-connectivity check by frontier growth from the first pixel."""
    ys, xs = np.nonzero(cell_mask)
    if ys.size == 0:
        return False
    region = np.zeros_like(cell_mask)
    region[ys[0], xs[0]] = True
    while True:
        grown = region.copy()
        grown[1:, :] |= region[:-1, :]
        grown[:-1, :] |= region[1:, :]
        grown[:, 1:] |= region[:, :-1]
        grown[:, :-1] |= region[:, 1:]
        grown[1:, 1:] |= region[:-1, :-1]
        grown[:-1, :-1] |= region[1:, 1:]
        grown[1:, :-1] |= region[:-1, 1:]
        grown[:-1, 1:] |= region[1:, :-1]
        grown &= cell_mask
        if (grown == region).all():
            break
        region = grown
    return bool((region == cell_mask).all())


def generate_voronoi_semantic(spec):
    """Generate a synthetic semantic map plus its ground truth.

    Returns:
        ``(semantic_map, ground_truth)``.

    Raises:
        SeedPlacementError: more seeds than pixels, or no accepted layout
            within the retry budget.
    """
    h, w = spec.height, spec.width
    if spec.n_seeds > h * w:
        raise SeedPlacementError(
            f"cannot place {spec.n_seeds} distinct seeds on {w}x{h} pixels"
        )
    rng = np.random.default_rng(spec.rng_seed)
    for _ in range(_MAX_ATTEMPTS):
        flat = rng.choice(h * w, size=spec.n_seeds, replace=False)
        seed_ys, seed_xs = np.divmod(flat, w)
        cell_labels = _nearest_seed_labels(h, w, seed_ys, seed_xs)
        sd = _sd_band(cell_labels, spec.sd_thickness)
        fp = ~sd
        y0, y1, x0, x1 = _cell_bboxes(cell_labels, spec.n_seeds)
        accepted = True
        cell_areas = []
        for idx in range(spec.n_seeds):
            window = (slice(y0[idx], y1[idx] + 1), slice(x0[idx], x1[idx] + 1))
            cell_fp = (cell_labels[window] == idx) & fp[window]
            area = int(cell_fp.sum())
            if area == 0 or not _cell_connected(cell_fp):
                accepted = False
                break
            cell_areas.append(area)
        if not accepted:
            continue
        labels = np.where(sd, np.uint8(2), np.uint8(1))
        truth = VoronoiGroundTruth(
            instance_count=spec.n_seeds,
            seeds=tuple((int(x), int(y)) for x, y in zip(seed_xs, seed_ys)),
            cell_areas_px=tuple(cell_areas),
        )
        return SemanticMap(labels), truth
    raise SeedPlacementError(
        f"no layout with connected cells within {_MAX_ATTEMPTS} attempts "
        f"for {spec.n_seeds} seeds on {w}x{h}"
    )


def write_ground_truth_json(truth, path):
    """Persist ground truth next to the generated map."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(truth.to_json_dict(), indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise MaskWriteError(f"cannot write ground truth {path}: {exc}") from exc
