"""Pixel kernels with a compiled core and a NumPy fallback.

The compiled extension is preferred when importable; the environment
variable ``PODOQUANT_KERNELS`` (``compiled`` or ``python``) or
:func:`set_backend` overrides the choice.  Both backends implement the same
contracts and the test suite holds them to identical outputs.

Offset sets passed to the morphology kernels must contain the origin
``(0, 0)``; both backends exploit that to skip work.
"""

import os

import numpy as np

from . import _pyimpl

try:
    from . import _core
except ImportError:  # pragma: no cover - depends on build environment
    _core = None

_BACKENDS = {"python": _pyimpl}
if _core is not None:
    _BACKENDS["compiled"] = _core


def _initial_backend():
    requested = os.environ.get("PODOQUANT_KERNELS", "").strip().lower()
    if requested:
        if requested not in _BACKENDS:
            raise ImportError(
                f"PODOQUANT_KERNELS={requested!r} is not available; "
                f"choose from {sorted(_BACKENDS)}"
            )
        return requested
    return "compiled" if "compiled" in _BACKENDS else "python"


_active = _initial_backend()


def available_backends():
    """Names of the backends importable in this environment."""
    return tuple(sorted(_BACKENDS))


def get_backend():
    """Name of the backend currently serving kernel calls."""
    return _active


def set_backend(name):
    """Switch kernel backend; raises ``ValueError`` for unknown names."""
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"unknown kernel backend {name!r}; choose from {sorted(_BACKENDS)}")
    _active = name


def _impl():
    return _BACKENDS[_active]


def _as_mask(mask):
    arr = np.ascontiguousarray(mask)
    if arr.ndim != 2:
        raise ValueError(f"mask must be 2-D, got shape {arr.shape}")
    if arr.dtype == bool:
        return arr.astype(np.uint8)
    arr = arr.astype(np.uint8, copy=False)
    return arr


def _as_offsets(offsets):
    offs = np.ascontiguousarray(offsets, dtype=np.int32)
    if offs.ndim != 2 or offs.shape[1] != 2:
        raise ValueError("offsets must be an (n, 2) array of (dy, dx) pairs")
    if not ((offs[:, 0] == 0) & (offs[:, 1] == 0)).any():
        raise ValueError("offset set must contain the origin (0, 0)")
    return offs


def label_components(mask, connectivity=8):
    """Label connected foreground components.

    Args:
        mask: 2-D binary array.
        connectivity: 4 or 8.

    Returns:
        ``(labels, count)``; ``labels`` is int32 with background 0 and
        component ids 1..count ordered by first pixel in raster order.
    """
    if connectivity not in (4, 8):
        raise ValueError(f"connectivity must be 4 or 8, got {connectivity}")
    labels, count = _impl().label_components(_as_mask(mask), connectivity)
    return labels, count


def binary_dilate(mask, offsets, iterations=1):
    """Dilate ``mask`` by the offset set, ``iterations`` times."""
    if iterations < 0:
        raise ValueError("iterations must be >= 0")
    out = _impl().binary_dilate(_as_mask(mask), _as_offsets(offsets), int(iterations))
    return out.astype(bool)


def binary_erode(mask, offsets, iterations=1, border="zero"):
    """Erode ``mask`` by the offset set, ``iterations`` times.

    ``border`` selects the value probes read outside the image: ``"zero"``
    (strict, shrinks from the border) or ``"foreground"`` (the border does
    not erode the mask by itself).
    """
    if iterations < 0:
        raise ValueError("iterations must be >= 0")
    if border not in ("zero", "foreground"):
        raise ValueError(f"border must be 'zero' or 'foreground', got {border!r}")
    out = _impl().binary_erode(
        _as_mask(mask), _as_offsets(offsets), int(iterations), border == "foreground"
    )
    return out.astype(bool)


def skeletonize(mask):
    """Thin a binary mask to 1-px curves, preserving component count.

    Runs two-sub-iteration parallel thinning until a fixpoint.  Whenever a
    sub-iteration would delete a component outright (small blobs die under
    the classic rules), its first pixel in raster order is retained instead,
    so every input component keeps at least one pixel.
    """
    impl = _impl()
    m = _as_mask(mask).copy()
    while True:
        changed = False
        for step in (0, 1):
            cand = impl.thin_candidates(m, step)
            if not cand.any():
                continue
            labels, count = impl.label_components(m, 8)
            if count:
                flat_labels = labels.ravel()
                sizes = np.bincount(flat_labels, minlength=count + 1)
                hits = np.bincount(
                    flat_labels, weights=cand.ravel().astype(np.float64), minlength=count + 1
                )
                doomed = np.flatnonzero(sizes[1:] == hits[1:].astype(np.int64)) + 1
                if doomed.size:
                    flat_cand = cand.ravel()
                    for lbl in doomed:
                        flat_cand[np.argmax(flat_labels == lbl)] = 0
            if cand.any():
                m[cand.astype(bool)] = 0
                changed = True
        if not changed:
            return m.astype(bool)
