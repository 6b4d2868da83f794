"""Podocyte segmentation post-processing, morphometry and agreement stats."""

__version__ = "0.1.0"

from .errors import PipelineError
from .imgio import (
    DEFAULT_PIXEL_SIZE_UM,
    Image,
    ImageStack,
    InstanceMap,
    SemanticClass,
    SemanticMap,
    load_tiff,
    max_project,
)
from .instances import filter_small_instances, fp_binary_mask, label_components
from .morphometry import MorphometryTable, quantify, skeleton_length, skeletonize
from .pipeline import analyze_semantic, segment_image
from .providers import (
    ConstantClassProvider,
    MaskLoaderProvider,
    SegmentationProvider,
    create_provider,
    register_provider,
)
from .roi import RoiMask, RoiParams, detect_roi
from .stats import bland_altman, compare_series, pearson, tost_paired
from .synth import SynthSpec, generate_voronoi_semantic
from .tiling import plan_patches, stitch_consensus

__all__ = [
    "DEFAULT_PIXEL_SIZE_UM",
    "ConstantClassProvider",
    "Image",
    "ImageStack",
    "InstanceMap",
    "MaskLoaderProvider",
    "MorphometryTable",
    "PipelineError",
    "RoiMask",
    "RoiParams",
    "SegmentationProvider",
    "SemanticClass",
    "SemanticMap",
    "SynthSpec",
    "analyze_semantic",
    "bland_altman",
    "compare_series",
    "create_provider",
    "detect_roi",
    "filter_small_instances",
    "fp_binary_mask",
    "generate_voronoi_semantic",
    "label_components",
    "load_tiff",
    "max_project",
    "pearson",
    "plan_patches",
    "quantify",
    "register_provider",
    "segment_image",
    "skeleton_length",
    "skeletonize",
    "stitch_consensus",
    "tost_paired",
]
