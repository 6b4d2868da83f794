"""Raster data types and file IO for microscopy images and masks.

Images load from TIFF (8- or 16-bit, optional channel and Z axes) into
float32 intensities in [0, 1].  Semantic maps travel as 8-bit PNG/TIFF with
the class vocabulary {0 background, 1 foot process, 2 slit diaphragm};
instance maps as 32-bit single-channel TIFF; ROI masks as 8-bit 0/255.
"""

from dataclasses import dataclass, field
from enum import IntEnum
from pathlib import Path

import numpy as np
import tifffile
from PIL import Image as _PilImage
from PIL import UnidentifiedImageError

from .errors import (
    ChannelOutOfRangeError,
    InputFileNotFoundError,
    MalformedMaskError,
    MalformedTiffError,
    MaskWriteError,
    SliceOutOfRangeError,
)

DEFAULT_PIXEL_SIZE_UM = 0.0227

# TIFF axis labels that denote a channel dimension ('S' wins over 'C' when
# both appear) and labels collapsed into the Z stack.
_CHANNEL_AXES = ("S", "C")
_STACK_AXES = frozenset("ZIQT")


class SemanticClass(IntEnum):
    """Pixel vocabulary of a semantic map."""

    BACKGROUND = 0
    FOOT_PROCESS = 1
    SLIT_DIAPHRAGM = 2


@dataclass
class Image:
    """Single-channel 2-D intensity raster.

    Attributes:
        pixels: float32 array of shape (height, width), values in [0, 1].
        pixel_size_um: physical edge length of one pixel in micrometers.
    """

    pixels: np.ndarray
    pixel_size_um: float = DEFAULT_PIXEL_SIZE_UM

    def __post_init__(self):
        self.pixels = np.asarray(self.pixels, dtype=np.float32)
        if self.pixels.ndim != 2 or self.pixels.size == 0:
            raise ValueError(f"image must be non-empty 2-D, got shape {self.pixels.shape}")
        lo = float(self.pixels.min())
        hi = float(self.pixels.max())
        if not (np.isfinite(lo) and np.isfinite(hi)) or lo < 0.0 or hi > 1.0:
            raise ValueError(f"intensities must lie in [0, 1], got [{lo}, {hi}]")
        if not self.pixel_size_um > 0:
            raise ValueError(f"pixel_size_um must be positive, got {self.pixel_size_um}")

    @property
    def height(self):
        return self.pixels.shape[0]

    @property
    def width(self):
        return self.pixels.shape[1]


@dataclass
class ImageStack:
    """Z stack of same-sized images sharing one pixel size."""

    slices: list = field(default_factory=list)

    def __post_init__(self):
        if not self.slices:
            raise ValueError("stack must contain at least one slice")
        first = self.slices[0]
        for img in self.slices[1:]:
            if img.pixels.shape != first.pixels.shape:
                raise ValueError("stack slices must share one shape")
            if img.pixel_size_um != first.pixel_size_um:
                raise ValueError("stack slices must share one pixel size")

    @property
    def depth(self):
        return len(self.slices)

    @property
    def pixel_size_um(self):
        return self.slices[0].pixel_size_um


@dataclass
class SemanticMap:
    """Per-pixel class raster, possibly at reduced resolution.

    ``scale_factor`` s means each map pixel covers an s-by-s block of source
    pixels; full resolution is s = 1.
    """

    labels: np.ndarray
    scale_factor: int = 1

    def __post_init__(self):
        arr = np.asarray(self.labels)
        if arr.ndim != 2 or arr.size == 0:
            raise ValueError(f"semantic map must be non-empty 2-D, got shape {arr.shape}")
        if arr.dtype != bool and not np.issubdtype(arr.dtype, np.integer):
            raise ValueError(f"semantic map values must be integers, got {arr.dtype}")
        if int(arr.min()) < 0 or int(arr.max()) > 2:
            raise ValueError("semantic map values must be in {0, 1, 2}")
        self.labels = arr.astype(np.uint8)
        if not (isinstance(self.scale_factor, (int, np.integer)) and self.scale_factor >= 1):
            raise ValueError(f"scale_factor must be an integer >= 1, got {self.scale_factor}")
        self.scale_factor = int(self.scale_factor)

    @property
    def height(self):
        return self.labels.shape[0]

    @property
    def width(self):
        return self.labels.shape[1]


@dataclass
class InstanceMap:
    """Labeled instances: background 0, instance ids 1..count."""

    labels: np.ndarray
    count: int

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=np.int32)
        if self.labels.ndim != 2 or self.labels.size == 0:
            raise ValueError(f"instance map must be non-empty 2-D, got shape {self.labels.shape}")
        if self.count < 0:
            raise ValueError(f"count must be >= 0, got {self.count}")
        if int(self.labels.max(initial=0)) > self.count or int(self.labels.min(initial=0)) < 0:
            raise ValueError("instance labels must lie in 0..count")

    @property
    def height(self):
        return self.labels.shape[0]

    @property
    def width(self):
        return self.labels.shape[1]


def _normalize_intensities(data):
    if data.dtype == np.uint8:
        return data.astype(np.float32) / 255.0
    if data.dtype == np.uint16:
        return data.astype(np.float32) / 65535.0
    if data.dtype == bool:
        return data.astype(np.float32)
    if np.issubdtype(data.dtype, np.floating):
        arr = data.astype(np.float32)
        if arr.size and (not np.isfinite(arr).all() or arr.min() < 0.0 or arr.max() > 1.0):
            raise MalformedTiffError("float TIFF intensities must lie in [0, 1]")
        return arr
    raise MalformedTiffError(f"unsupported TIFF dtype {data.dtype}")


def _split_axes(data, axes):
    """Reorder TIFF series data to (stack, height, width, channel)."""
    axes = axes.upper()
    if len(axes) != data.ndim:
        raise MalformedTiffError(f"axes {axes!r} do not match data shape {data.shape}")
    if "Y" not in axes or "X" not in axes:
        raise MalformedTiffError(f"TIFF series lacks spatial axes (axes {axes!r})")
    channel_axis = None
    for label in _CHANNEL_AXES:
        if label in axes:
            channel_axis = axes.index(label)
            break
    stack_axes = [
        i for i, label in enumerate(axes) if label not in ("Y", "X") and i != channel_axis
    ]
    for i in stack_axes:
        if axes[i] not in _STACK_AXES:
            raise MalformedTiffError(f"unsupported TIFF axis {axes[i]!r} in {axes!r}")
    order = stack_axes + [axes.index("Y"), axes.index("X")]
    if channel_axis is not None:
        order.append(channel_axis)
    data = np.transpose(data, order)
    n_stack = len(stack_axes)
    depth = 1
    for i in range(n_stack):
        depth *= data.shape[i]
    height, width = data.shape[n_stack], data.shape[n_stack + 1]
    channels = data.shape[-1] if channel_axis is not None else 1
    return data.reshape(depth, height, width, channels)


def load_tiff(path, channel=0, z_mode="max", z_index=None, pixel_size_um=DEFAULT_PIXEL_SIZE_UM):
    """Load one channel of a TIFF as a 2-D image.

    Args:
        path: file to read.
        channel: channel index to keep (0 when the file has no channel axis).
        z_mode: ``"max"`` for a maximum-intensity projection over the stack,
            ``"slice"`` to keep a single Z plane.
        z_index: plane to keep when ``z_mode="slice"``.
        pixel_size_um: physical pixel size to attach.

    Returns:
        :class:`Image` with float32 intensities in [0, 1].
    """
    path = Path(path)
    if not path.is_file():
        raise InputFileNotFoundError(f"input TIFF not found: {path}")
    if z_mode not in ("max", "slice"):
        raise ValueError(f"z_mode must be 'max' or 'slice', got {z_mode!r}")
    if z_mode == "slice" and z_index is None:
        raise ValueError("z_mode='slice' requires z_index")
    try:
        with tifffile.TiffFile(path) as tif:
            series = tif.series[0]
            data = np.asarray(series.asarray())
            axes = series.axes
    except MalformedTiffError:
        raise
    except Exception as exc:
        raise MalformedTiffError(f"cannot parse TIFF {path}: {exc}") from exc
    if data.size == 0:
        raise MalformedTiffError(f"TIFF {path} has an empty image extent")
    cube = _split_axes(data, axes)
    depth, _, _, channels = cube.shape
    if not 0 <= channel < channels:
        raise ChannelOutOfRangeError(
            f"channel {channel} out of range for {channels}-channel file {path}"
        )
    cube = cube[:, :, :, channel]
    if z_mode == "slice":
        if not 0 <= z_index < depth:
            raise SliceOutOfRangeError(f"z index {z_index} out of range for depth {depth}")
        plane = cube[z_index]
    else:
        plane = cube.max(axis=0)
    return Image(_normalize_intensities(plane), pixel_size_um=pixel_size_um)


def load_tiff_stack(path, channel=0, pixel_size_um=DEFAULT_PIXEL_SIZE_UM):
    """Load one channel of a TIFF as an :class:`ImageStack` (depth >= 1)."""
    path = Path(path)
    if not path.is_file():
        raise InputFileNotFoundError(f"input TIFF not found: {path}")
    try:
        with tifffile.TiffFile(path) as tif:
            series = tif.series[0]
            data = np.asarray(series.asarray())
            axes = series.axes
    except MalformedTiffError:
        raise
    except Exception as exc:
        raise MalformedTiffError(f"cannot parse TIFF {path}: {exc}") from exc
    if data.size == 0:
        raise MalformedTiffError(f"TIFF {path} has an empty image extent")
    cube = _split_axes(data, axes)
    depth, _, _, channels = cube.shape
    if not 0 <= channel < channels:
        raise ChannelOutOfRangeError(
            f"channel {channel} out of range for {channels}-channel file {path}"
        )
    planes = [
        Image(_normalize_intensities(cube[z, :, :, channel]), pixel_size_um=pixel_size_um)
        for z in range(depth)
    ]
    return ImageStack(planes)


def max_project(stack):
    """Maximum-intensity projection of a stack: per-pixel max over Z."""
    acc = stack.slices[0].pixels
    for img in stack.slices[1:]:
        acc = np.maximum(acc, img.pixels)
    return Image(acc, pixel_size_um=stack.pixel_size_um)


def _open_mask_array(path):
    path = Path(path)
    if not path.is_file():
        raise InputFileNotFoundError(f"mask not found: {path}")
    try:
        with _PilImage.open(path) as img:
            arr = np.asarray(img)
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError) as exc:
        raise MalformedMaskError(f"cannot parse mask {path}: {exc}") from exc
    if arr.ndim != 2 or arr.size == 0:
        raise MalformedMaskError(
            f"mask {path} must be non-empty single-channel 2-D, got shape {arr.shape}"
        )
    return arr


def read_semantic_map(path):
    """Read an 8-bit semantic map (values 0/1/2) from PNG or TIFF."""
    arr = _open_mask_array(path)
    if arr.dtype != np.uint8:
        raise MalformedMaskError(f"semantic map {path} must be 8-bit, got {arr.dtype}")
    if arr.max(initial=0) > 2:
        bad = sorted(int(v) for v in np.unique(arr) if v > 2)
        raise MalformedMaskError(f"semantic map {path} contains values outside 0..2: {bad}")
    return SemanticMap(arr.copy())


def write_semantic_map(semantic, path):
    """Write a semantic map as 8-bit grayscale PNG or TIFF."""
    _write_pil(semantic.labels, "L", path)


def read_instance_map(path):
    """Read a 32-bit instance map from TIFF."""
    arr = _open_mask_array(path)
    if not np.issubdtype(arr.dtype, np.integer):
        raise MalformedMaskError(f"instance map {path} must be integer, got {arr.dtype}")
    if arr.min(initial=0) < 0:
        raise MalformedMaskError(f"instance map {path} contains negative labels")
    arr = arr.astype(np.int32)
    count = int(arr.max(initial=0))
    present = np.unique(arr)
    ids = present[present > 0]
    if ids.size != count or (count and (ids != np.arange(1, count + 1)).any()):
        raise MalformedMaskError(f"instance map {path} ids are not dense 1..{count}")
    return InstanceMap(arr, count=count)


def write_instance_map(instances, path):
    """Write an instance map as 32-bit single-channel TIFF."""
    path = Path(path)
    if path.suffix.lower() not in (".tif", ".tiff"):
        raise MaskWriteError(f"instance maps are written as TIFF, got {path.suffix!r}")
    _write_pil(instances.labels, "I", path)


def read_roi_mask(path):
    """Read an ROI mask stored as 8-bit 0/255."""
    arr = _open_mask_array(path)
    if arr.dtype != np.uint8:
        raise MalformedMaskError(f"ROI mask {path} must be 8-bit, got {arr.dtype}")
    extra = set(np.unique(arr)) - {0, 255}
    if extra:
        raise MalformedMaskError(f"ROI mask {path} must be 0/255, found {sorted(extra)}")
    return arr == 255


def write_roi_mask(mask, path):
    """Write a boolean ROI mask as 8-bit 0/255."""
    arr = np.where(np.asarray(mask, dtype=bool), np.uint8(255), np.uint8(0))
    _write_pil(arr, "L", path)


def _write_pil(arr, mode, path):
    path = Path(path)
    try:
        img = _PilImage.fromarray(arr, mode=mode)
        path.parent.mkdir(parents=True, exist_ok=True)
        img.save(path)
    except (OSError, ValueError) as exc:
        raise MaskWriteError(f"cannot write mask {path}: {exc}") from exc
