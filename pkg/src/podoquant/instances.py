"""Instance segmentation of foot processes from a semantic map."""

import numpy as np

from . import kernels
from .imgio import InstanceMap, SemanticClass


def fp_binary_mask(semantic):
    """Boolean mask of foot-process pixels."""
    return semantic.labels == SemanticClass.FOOT_PROCESS


def sd_binary_mask(semantic):
    """Boolean mask of slit-diaphragm pixels."""
    return semantic.labels == SemanticClass.SLIT_DIAPHRAGM


def label_components(mask, connectivity=8):
    """Label connected components of a boolean mask into an instance map.

    Ids are assigned 1..count by each component's first pixel in raster
    order, so the labeling is deterministic and canonical.
    """
    labels, count = kernels.label_components(mask, connectivity)
    return InstanceMap(labels, count)


def filter_small_instances(instances, min_area_px):
    """Drop instances smaller than ``min_area_px`` pixels and relabel densely.

    Surviving instances keep their relative order, so the result is again
    canonical with respect to raster order.
    """
    if min_area_px < 0:
        raise ValueError(f"min_area_px must be >= 0, got {min_area_px}")
    if instances.count == 0 or min_area_px <= 1:
        return InstanceMap(instances.labels.copy(), instances.count)
    areas = np.bincount(instances.labels.ravel(), minlength=instances.count + 1)
    keep = areas[1:] >= min_area_px
    remap = np.zeros(instances.count + 1, dtype=np.int32)
    remap[1:][keep] = np.arange(1, int(keep.sum()) + 1, dtype=np.int32)
    return InstanceMap(remap[instances.labels], int(keep.sum()))


def instance_areas_px(instances):
    """Pixel areas indexed by instance id (entry 0 is the background)."""
    return np.bincount(instances.labels.ravel(), minlength=instances.count + 1)
