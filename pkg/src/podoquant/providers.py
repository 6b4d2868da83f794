"""Segmentation providers: sources of per-patch semantic maps.

The pipeline is agnostic to where semantic labels come from.  A provider
receives a patch (plus its origin in the full image) and must return a
semantic map for exactly that patch, possibly at a reduced scale.  The
bundled providers replay a precomputed full-image map (``mask:<path>``) or
emit a constant class (``const`` / ``const:<label>``); model-backed
providers can be registered by name.
"""

from abc import ABC, abstractmethod

import numpy as np

from .errors import PatchSizeMismatchError, PipelineError, ProviderFailureError
from .imgio import SemanticMap, read_semantic_map


class SegmentationProvider(ABC):
    """Base class for per-patch semantic segmentation sources.

    Subclasses implement :meth:`_segment` and may set ``scale_factor`` > 1
    when they emit maps at reduced resolution (``patch_size`` must then be
    divisible by it).  Providers must be deterministic per (patch, origin).
    """

    name = "provider"
    scale_factor = 1

    def __init__(self, patch_size):
        if patch_size <= 0:
            raise ValueError(f"patch_size must be positive, got {patch_size}")
        if patch_size % self.scale_factor:
            raise ValueError(
                f"patch_size {patch_size} is not divisible by scale factor "
                f"{self.scale_factor}"
            )
        self.patch_size = patch_size

    def expected_image_size(self):
        """(width, height) the provider is bound to, or None if unconstrained."""
        return None

    @abstractmethod
    def _segment(self, patch, origin):
        """Return a label array for the patch; may raise on internal failure."""

    def segment_patch(self, patch, origin=(0, 0)):
        """Segment one patch into a semantic map.

        Args:
            patch: :class:`~podoquant.imgio.Image` of exactly
                ``patch_size`` by ``patch_size`` pixels.
            origin: (x, y) of the patch in the full image.

        Returns:
            :class:`SemanticMap` of edge ``patch_size // scale_factor``.
        """
        if patch.width != self.patch_size or patch.height != self.patch_size:
            raise PatchSizeMismatchError(
                f"provider {self.name!r} expects {self.patch_size}-px patches, "
                f"got {patch.width}x{patch.height}"
            )
        try:
            labels = self._segment(patch, origin)
        except PipelineError:
            raise
        except Exception as exc:
            raise ProviderFailureError(f"provider {self.name!r} failed: {exc}") from exc
        expected = self.patch_size // self.scale_factor
        arr = np.asarray(labels)
        if arr.shape != (expected, expected):
            raise ProviderFailureError(
                f"provider {self.name!r} returned shape {arr.shape}, "
                f"expected ({expected}, {expected})"
            )
        try:
            return SemanticMap(arr, scale_factor=self.scale_factor)
        except ValueError as exc:
            raise ProviderFailureError(f"provider {self.name!r} returned {exc}") from exc


class MaskLoaderProvider(SegmentationProvider):
    """Replays crops of a precomputed full-image semantic map."""

    name = "mask"

    def __init__(self, semantic, patch_size):
        super().__init__(patch_size)
        self._semantic = semantic

    def expected_image_size(self):
        s = self._semantic.scale_factor
        return self._semantic.width * s, self._semantic.height * s

    def _segment(self, patch, origin):
        s = self._semantic.scale_factor
        x, y = origin
        if x % s or y % s:
            raise ProviderFailureError(
                f"origin ({x}, {y}) is not aligned to the stored map scale {s}"
            )
        px, py = x // s, y // s
        edge = self.patch_size // s
        if px < 0 or py < 0 or px + edge > self._semantic.width or py + edge > self._semantic.height:
            raise ProviderFailureError(
                f"patch at ({x}, {y}) falls outside the stored map "
                f"({self._semantic.width * s}x{self._semantic.height * s} source px)"
            )
        return self._semantic.labels[py : py + edge, px : px + edge]


class ConstantClassProvider(SegmentationProvider):
    """Labels every pixel with one fixed class; useful for tests and demos."""

    name = "const"

    def __init__(self, patch_size, label=1):
        super().__init__(patch_size)
        if label not in (0, 1, 2):
            raise ValueError(f"label must be 0, 1 or 2, got {label}")
        self._label = int(label)

    def _segment(self, patch, origin):
        edge = self.patch_size // self.scale_factor
        return np.full((edge, edge), self._label, dtype=np.uint8)


def _make_mask_provider(arg, patch_size):
    if not arg:
        raise ValueError("mask provider needs a path: mask:<path>")
    return MaskLoaderProvider(read_semantic_map(arg), patch_size)


def _make_const_provider(arg, patch_size):
    label = int(arg) if arg else 1
    return ConstantClassProvider(patch_size, label=label)


_FACTORIES = {
    "mask": _make_mask_provider,
    "const": _make_const_provider,
}


def register_provider(name, factory):
    """Register a provider factory ``(arg, patch_size) -> provider``."""
    if not name or ":" in name:
        raise ValueError(f"invalid provider name {name!r}")
    _FACTORIES[name] = factory


def create_provider(spec, patch_size):
    """Instantiate a provider from a ``name`` or ``name:arg`` spec string."""
    name, _, arg = spec.partition(":")
    factory = _FACTORIES.get(name)
    if factory is None:
        raise ValueError(f"unknown provider {name!r}; registered: {sorted(_FACTORIES)}")
    return factory(arg, patch_size)
