"""Overlapping patch planning and per-pixel consensus stitching.

Patches march with stride ``patch_size - overlap``; the last patch on each
axis is clamped flush with the border so every pixel is covered.  Stitching
counts per-class votes from all patches covering a pixel and resolves ties
in favor of rarer classes (slit diaphragm over foot process over
background).
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    ImageSmallerThanPatchError,
    PatchOutOfBoundsError,
    UncoveredPixelError,
)
from .imgio import Image, SemanticMap


@dataclass(frozen=True)
class PatchPlan:
    """Origins (x, y) of every patch over a width-by-height image."""

    width: int
    height: int
    patch_size: int
    overlap: int
    origins: tuple

    def __len__(self):
        return len(self.origins)


def _axis_origins(extent, patch_size, stride):
    origins = list(range(0, extent - patch_size + 1, stride))
    if origins[-1] != extent - patch_size:
        origins.append(extent - patch_size)
    return origins


def plan_patches(width, height, patch_size=384, overlap=256):
    """Plan flush-to-border patch origins in raster order.

    Raises:
        ImageSmallerThanPatchError: image extent below ``patch_size``.
        ValueError: ``overlap`` not in ``[0, patch_size)`` or sizes not positive.
    """
    if patch_size <= 0:
        raise ValueError(f"patch_size must be positive, got {patch_size}")
    if not 0 <= overlap < patch_size:
        raise ValueError(f"overlap must be in [0, patch_size), got {overlap}")
    if width < patch_size or height < patch_size:
        raise ImageSmallerThanPatchError(
            f"image {width}x{height} is smaller than patch size {patch_size}"
        )
    stride = patch_size - overlap
    xs = _axis_origins(width, patch_size, stride)
    ys = _axis_origins(height, patch_size, stride)
    origins = tuple((x, y) for y in ys for x in xs)
    return PatchPlan(width, height, patch_size, overlap, origins)


def extract_patch(image, origin, patch_size):
    """Crop a ``patch_size`` square of ``image`` at origin (x, y)."""
    x, y = origin
    if x < 0 or y < 0 or x + patch_size > image.width or y + patch_size > image.height:
        raise PatchOutOfBoundsError(
            f"patch at ({x}, {y}) size {patch_size} exceeds image "
            f"{image.width}x{image.height}"
        )
    return Image(
        image.pixels[y : y + patch_size, x : x + patch_size],
        pixel_size_um=image.pixel_size_um,
    )


def stitch_consensus(patches, width, height):
    """Fuse per-patch semantic maps into one map by per-pixel vote.

    Args:
        patches: iterable of ``(semantic_map, origin)`` with origins in full
            resolution (x, y) coordinates.  All maps must share one scale
            factor, and origins and the output extent must be divisible by it.
        width: output extent in full-resolution pixels.
        height: output extent in full-resolution pixels.

    Returns:
        :class:`SemanticMap` at the shared scale factor.  For each pixel the
        class with the most votes wins; ties go to the higher class value.

    Raises:
        UncoveredPixelError: some output pixel receives no vote.
        DimensionMismatchError: inconsistent scales, misaligned origins, or
            patches poking outside the output extent.
    """
    patches = list(patches)
    if not patches:
        raise UncoveredPixelError("no patches to stitch")
    scale = patches[0][0].scale_factor
    if width % scale or height % scale:
        raise DimensionMismatchError(
            f"extent {width}x{height} is not divisible by scale factor {scale}"
        )
    out_h, out_w = height // scale, width // scale
    votes = np.zeros((3, out_h, out_w), dtype=np.int32)
    for semantic, origin in patches:
        if semantic.scale_factor != scale:
            raise DimensionMismatchError(
                f"mixed scale factors {scale} and {semantic.scale_factor}"
            )
        x, y = origin
        if x % scale or y % scale:
            raise DimensionMismatchError(
                f"origin ({x}, {y}) is not aligned to scale factor {scale}"
            )
        px, py = x // scale, y // scale
        ph, pw = semantic.height, semantic.width
        if px < 0 or py < 0 or px + pw > out_w or py + ph > out_h:
            raise DimensionMismatchError(
                f"patch at ({x}, {y}) size {pw * scale}x{ph * scale} exceeds "
                f"extent {width}x{height}"
            )
        window = (slice(py, py + ph), slice(px, px + pw))
        for cls in range(3):
            votes[cls][window] += semantic.labels == cls
    total = votes.sum(axis=0)
    if (total == 0).any():
        n = int((total == 0).sum())
        raise UncoveredPixelError(f"{n} output pixels received no patch vote")
    # Ties resolve toward the higher class: slit diaphragm > foot process >
    # background.
    winner = np.zeros((out_h, out_w), dtype=np.uint8)
    winner[votes[1] >= votes[0]] = 1
    fused = np.where((votes[2] >= votes[1]) & (votes[2] >= votes[0]), np.uint8(2), winner)
    return SemanticMap(fused, scale_factor=scale)
