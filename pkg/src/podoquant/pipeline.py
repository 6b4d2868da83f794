"""End-to-end composition of the per-image processing stages.

One call takes an image from patches through stitching, instance labeling,
ROI detection and morphometry.  The CLI and the benchmark harness both run
through this module so they measure and ship the same code path.
"""

from dataclasses import dataclass

from .errors import DimensionMismatchError
from .imgio import Image
from .instances import fp_binary_mask, filter_small_instances, label_components
from .morphometry import quantify
from .roi import RoiParams, detect_roi
from .tiling import extract_patch, plan_patches, stitch_consensus


@dataclass
class SegmentationResult:
    """Fused semantic map and foot-process instances for one image."""

    semantic: object
    instances: object


def segment_image(image, provider, patch_size=384, overlap=256, connectivity=8,
                  min_instance_area_px=0):
    """Segment a full image with an overlapping-patch provider.

    Args:
        image: :class:`~podoquant.imgio.Image`.
        provider: a :class:`~podoquant.providers.SegmentationProvider`.
        patch_size: square patch edge in pixels.
        overlap: patch overlap in pixels.
        connectivity: 4 or 8, for instance labeling.
        min_instance_area_px: drop foot-process instances below this size.

    Returns:
        :class:`SegmentationResult` with the fused map at the provider's
        scale and instances at that same scale.
    """
    expected = provider.expected_image_size()
    if expected is not None and expected != (image.width, image.height):
        raise DimensionMismatchError(
            f"provider is bound to {expected[0]}x{expected[1]} but the image "
            f"is {image.width}x{image.height}"
        )
    plan = plan_patches(image.width, image.height, patch_size, overlap)
    patches = []
    for origin in plan.origins:
        patch = extract_patch(image, origin, patch_size)
        patches.append((provider.segment_patch(patch, origin), origin))
    semantic = stitch_consensus(patches, image.width, image.height)
    instances = label_components(fp_binary_mask(semantic), connectivity)
    if min_instance_area_px > 0:
        instances = filter_small_instances(instances, min_instance_area_px)
    return SegmentationResult(semantic=semantic, instances=instances)


def analyze_semantic(semantic, pixel_size_um, roi_params=RoiParams(), connectivity=8,
                     min_instance_area_px=0):
    """Instance labeling, ROI detection and morphometry from a semantic map.

    The map must be at full resolution (scale factor 1).

    Returns:
        ``(instances, roi_mask, table)``.
    """
    if semantic.scale_factor != 1:
        raise DimensionMismatchError("analysis needs a full-resolution semantic map")
    instances = label_components(fp_binary_mask(semantic), connectivity)
    if min_instance_area_px > 0:
        instances = filter_small_instances(instances, min_instance_area_px)
    roi_mask = detect_roi(semantic, roi_params, connectivity)
    table = quantify(instances, semantic, roi_mask, pixel_size_um)
    return instances, roi_mask, table
