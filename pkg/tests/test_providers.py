"""Segmentation providers: contracts, mask replay, registry."""

import numpy as np
import pytest

from podoquant.errors import (
    MalformedMaskError,
    PatchSizeMismatchError,
    ProviderFailureError,
)
from podoquant.imgio import Image, SemanticMap, write_semantic_map
from podoquant.providers import (
    ConstantClassProvider,
    MaskLoaderProvider,
    SegmentationProvider,
    create_provider,
    register_provider,
)
from podoquant.tiling import extract_patch, plan_patches


def _image(h, w, seed=0):
    return Image(np.random.default_rng(seed).random((h, w)).astype(np.float32))


def test_mask_loader_serves_exact_crops():
    rng = np.random.default_rng(7)
    labels = rng.integers(0, 3, (40, 56), dtype=np.uint8)
    provider = MaskLoaderProvider(SemanticMap(labels), patch_size=16)
    image = _image(40, 56)
    for origin in plan_patches(56, 40, 16, 8).origins:
        patch = extract_patch(image, origin, 16)
        out = provider.segment_patch(patch, origin)
        x, y = origin
        assert np.array_equal(out.labels, labels[y : y + 16, x : x + 16])
    assert provider.expected_image_size() == (56, 40)


def test_patch_size_mismatch():
    provider = ConstantClassProvider(patch_size=16)
    with pytest.raises(PatchSizeMismatchError):
        provider.segment_patch(_image(8, 8))


def test_mask_loader_rejects_out_of_map_crops():
    provider = MaskLoaderProvider(SemanticMap(np.zeros((16, 16), dtype=np.uint8)), 16)
    with pytest.raises(ProviderFailureError):
        provider.segment_patch(_image(16, 16), origin=(8, 0))


def test_provider_exceptions_become_provider_failures():
    class Broken(SegmentationProvider):
        name = "broken"

        def _segment(self, patch, origin):
            raise RuntimeError("model exploded")

    provider = Broken(patch_size=8)
    with pytest.raises(ProviderFailureError, match="model exploded"):
        provider.segment_patch(_image(8, 8))


def test_provider_bad_output_shape_and_values():
    class WrongShape(SegmentationProvider):
        name = "wrong-shape"

        def _segment(self, patch, origin):
            return np.zeros((4, 4), dtype=np.uint8)

    with pytest.raises(ProviderFailureError):
        WrongShape(patch_size=8).segment_patch(_image(8, 8))

    class WrongValues(SegmentationProvider):
        name = "wrong-values"

        def _segment(self, patch, origin):
            return np.full((8, 8), 9, dtype=np.uint8)

    with pytest.raises(ProviderFailureError):
        WrongValues(patch_size=8).segment_patch(_image(8, 8))


def test_scaled_provider_output_edge():
    class HalfScale(SegmentationProvider):
        name = "half"
        scale_factor = 2

        def _segment(self, patch, origin):
            return np.ones((self.patch_size // 2, self.patch_size // 2), dtype=np.uint8)

    provider = HalfScale(patch_size=16)
    out = provider.segment_patch(_image(16, 16))
    assert out.labels.shape == (8, 8)
    assert out.scale_factor == 2
    with pytest.raises(ValueError):
        HalfScale(patch_size=15)


def test_constant_provider_and_spec_parsing():
    provider = create_provider("const:2", 8)
    out = provider.segment_patch(_image(8, 8))
    assert (out.labels == 2).all()
    assert (create_provider("const", 8).segment_patch(_image(8, 8)).labels == 1).all()
    with pytest.raises(ValueError):
        ConstantClassProvider(8, label=5)


def test_create_provider_mask_spec(tmp_path):
    labels = np.random.default_rng(1).integers(0, 3, (8, 8), dtype=np.uint8)
    path = tmp_path / "map.png"
    write_semantic_map(SemanticMap(labels), path)
    provider = create_provider(f"mask:{path}", 8)
    out = provider.segment_patch(_image(8, 8), (0, 0))
    assert np.array_equal(out.labels, labels)
    with pytest.raises(ValueError):
        create_provider("mask:", 8)


def test_create_provider_mask_propagates_mask_errors(tmp_path):
    from PIL import Image as PilImage

    bad = tmp_path / "bad.png"
    PilImage.fromarray(np.full((4, 4), 9, dtype=np.uint8), mode="L").save(bad)
    with pytest.raises(MalformedMaskError):
        create_provider(f"mask:{bad}", 4)


def test_unknown_provider_name():
    with pytest.raises(ValueError, match="unknown provider"):
        create_provider("magic:thing", 8)


def test_register_provider_round_trip():
    calls = []

    def factory(arg, patch_size):
        calls.append((arg, patch_size))
        return ConstantClassProvider(patch_size, label=0)

    register_provider("blank", factory)
    provider = create_provider("blank:xyz", 8)
    assert calls == [("xyz", 8)]
    assert (provider.segment_patch(_image(8, 8)).labels == 0).all()
    with pytest.raises(ValueError):
        register_provider("bad:name", factory)


def test_patch_size_must_be_positive():
    with pytest.raises(ValueError):
        ConstantClassProvider(patch_size=0)
