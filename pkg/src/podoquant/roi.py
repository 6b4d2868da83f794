"""Region-of-interest detection around the slit-diaphragm network.

The ROI is grown from slit-diaphragm pixels by iterated disc dilation,
tightened by a few cross erosions, and cleaned by dropping small connected
components.  The result marks where the network is dense enough for
morphometry to be meaningful.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .imgio import SemanticMap
from .instances import label_components, sd_binary_mask


@dataclass(frozen=True)
class StructuringElement:
    """Pixel offset neighborhood used by dilation and erosion."""

    kind: str
    radius: int
    offsets: tuple

    def offset_array(self):
        return np.asarray(self.offsets, dtype=np.int32)


def disc(radius):
    """Disc of the given radius: offsets with dy^2 + dx^2 <= radius^2."""
    if radius < 0:
        raise ValueError(f"radius must be >= 0, got {radius}")
    r2 = radius * radius
    offsets = tuple(
        (dy, dx)
        for dy in range(-radius, radius + 1)
        for dx in range(-radius, radius + 1)
        if dy * dy + dx * dx <= r2
    )
    return StructuringElement("disc", radius, offsets)


def cross(arm=1):
    """Plus-shaped element: the origin and ``arm`` steps along each axis."""
    if arm < 0:
        raise ValueError(f"arm must be >= 0, got {arm}")
    offsets = [(0, 0)]
    for i in range(1, arm + 1):
        offsets += [(-i, 0), (i, 0), (0, -i), (0, i)]
    return StructuringElement("cross", arm, tuple(offsets))


def dilate(mask, se, iterations=1):
    """Binary dilation by a structuring element, iterated."""
    return kernels.binary_dilate(mask, se.offset_array(), iterations)


def erode(mask, se, iterations=1, border="zero"):
    """Binary erosion by a structuring element, iterated.

    ``border="zero"`` treats pixels beyond the image as background, so the
    mask shrinks away from the image edge; ``border="foreground"`` leaves
    border-touching regions intact.
    """
    return kernels.binary_erode(mask, se.offset_array(), iterations, border=border)


def filter_components_by_area(mask, min_area_px, connectivity=8):
    """Keep only connected components of at least ``min_area_px`` pixels."""
    if min_area_px < 0:
        raise ValueError(f"min_area_px must be >= 0, got {min_area_px}")
    arr = np.asarray(mask, dtype=bool)
    instances = label_components(arr, connectivity)
    if instances.count == 0:
        return np.zeros_like(arr)
    areas = np.bincount(instances.labels.ravel(), minlength=instances.count + 1)
    keep = np.zeros(instances.count + 1, dtype=bool)
    keep[1:] = areas[1:] >= min_area_px
    return keep[instances.labels]


@dataclass(frozen=True)
class RoiParams:
    """Knobs of :func:`detect_roi`.

    ``upsample_first`` controls whether reduced-scale semantic maps are
    brought to full resolution before (True) or after (False) morphology;
    before is the default because morphology radii are calibrated in
    full-resolution pixels.
    """

    dilation_radius: int = 5
    dilation_iterations: int = 10
    erosion_iterations: int = 2
    min_component_area: int = 20000
    upsample_first: bool = True

    def __post_init__(self):
        if self.dilation_radius < 0:
            raise ValueError(f"dilation_radius must be >= 0, got {self.dilation_radius}")
        if self.dilation_iterations < 0 or self.erosion_iterations < 0:
            raise ValueError("iteration counts must be >= 0")
        if self.min_component_area < 0:
            raise ValueError(f"min_component_area must be >= 0, got {self.min_component_area}")
        if self.erosion_iterations > self.dilation_radius * self.dilation_iterations:
            raise ValueError(
                "erosion_iterations must not exceed dilation_radius * "
                "dilation_iterations, otherwise erosion can escape the "
                "dilated region"
            )


@dataclass
class RoiMask:
    """Boolean region-of-interest raster at full resolution."""

    bits: np.ndarray

    def __post_init__(self):
        self.bits = np.asarray(self.bits, dtype=bool)
        if self.bits.ndim != 2:
            raise ValueError(f"ROI mask must be 2-D, got shape {self.bits.shape}")

    @property
    def area_px(self):
        return int(self.bits.sum())

    @property
    def height(self):
        return self.bits.shape[0]

    @property
    def width(self):
        return self.bits.shape[1]


def upsample_nearest(semantic, factor):
    """Nearest-neighbor upsample: each pixel becomes a factor-square block.

    The scale factor of the result shrinks accordingly; upsampling by the
    map's own scale factor restores full resolution.
    """
    if factor < 1:
        raise ValueError(f"factor must be >= 1, got {factor}")
    if factor == 1:
        return SemanticMap(semantic.labels.copy(), semantic.scale_factor)
    if semantic.scale_factor % factor:
        raise ValueError(
            f"factor {factor} does not divide scale factor {semantic.scale_factor}"
        )
    grown = np.repeat(np.repeat(semantic.labels, factor, axis=0), factor, axis=1)
    return SemanticMap(grown, semantic.scale_factor // factor)


def detect_roi(semantic, params=RoiParams(), connectivity=8):
    """Detect the analysis region around the slit-diaphragm network.

    Steps: restore full resolution (position controlled by
    ``params.upsample_first``), dilate slit-diaphragm pixels with a disc,
    erode with a cross, then drop components below the area threshold.
    Erosion treats out-of-image probes as foreground so regions at the image
    border survive; together with the much wider dilation this keeps the
    eroded region inside the dilated one, hence slit-diaphragm pixels stay
    inside the pre-filter ROI.

    Returns a full-resolution :class:`RoiMask`.
    """
    scale = semantic.scale_factor
    if params.upsample_first and scale > 1:
        semantic = upsample_nearest(semantic, scale)
        scale = 1
    sd = sd_binary_mask(semantic)
    grown = dilate(sd, disc(params.dilation_radius), params.dilation_iterations)
    tightened = erode(grown, cross(1), params.erosion_iterations, border="foreground")
    if scale > 1:
        tightened = np.repeat(np.repeat(tightened, scale, axis=0), scale, axis=1)
    kept = filter_components_by_area(tightened, params.min_component_area, connectivity)
    return RoiMask(kept)
