"""Pure NumPy implementations of the per-pixel kernels.

This module mirrors the compiled extension ``_core`` function for function.
It is the fallback used when the extension is unavailable and the reference
the equivalence tests compare against, so the two must stay in lockstep.

All functions take 2-D ``uint8`` arrays with values in {0, 1} and return
``uint8`` arrays of the same shape (plus a count for labeling).
"""

import numpy as np


def _translate(mask, dy, dx, fill):
    """Shift ``mask`` by (dy, dx), padding vacated cells with ``fill``."""
    h, w = mask.shape
    out = np.full((h, w), fill, dtype=mask.dtype)
    if abs(dy) >= h or abs(dx) >= w:
        # the whole frame shifts out of view
        return out
    ys = slice(max(dy, 0), h + min(dy, 0))
    xs = slice(max(dx, 0), w + min(dx, 0))
    src_ys = slice(max(-dy, 0), h + min(-dy, 0))
    src_xs = slice(max(-dx, 0), w + min(-dx, 0))
    out[ys, xs] = mask[src_ys, src_xs]
    return out


def label_components(mask, connectivity):
    """Two-pass union-find connected component labeling.

    Returns ``(labels, count)`` where labels are assigned 1..count in order
    of each component's first pixel in raster scan order.
    """
    h, w = mask.shape
    labels = np.zeros((h, w), dtype=np.int32)
    parent = [0]

    def find(x):
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    if connectivity == 4:
        nbrs = ((-1, 0), (0, -1))
    else:
        nbrs = ((-1, -1), (-1, 0), (-1, 1), (0, -1))

    ys, xs = np.nonzero(mask)
    for y, x in zip(ys.tolist(), xs.tolist()):
        roots = []
        for dy, dx in nbrs:
            ny, nx = y + dy, x + dx
            if 0 <= ny < h and 0 <= nx < w:
                lbl = int(labels[ny, nx])
                if lbl:
                    roots.append(find(lbl))
        if not roots:
            new = len(parent)
            parent.append(new)
            labels[y, x] = new
        else:
            best = min(roots)
            for r in roots:
                if r != best:
                    parent[r] = best
            labels[y, x] = best

    # Second pass: canonical ids in raster order of first occurrence.
    canon = np.zeros(len(parent), dtype=np.int32)
    count = 0
    for y, x in zip(ys.tolist(), xs.tolist()):
        root = find(int(labels[y, x]))
        if canon[root] == 0:
            count += 1
            canon[root] = count
        labels[y, x] = canon[root]
    return labels, count


def binary_dilate(mask, offsets, iterations):
    """Iterated Minkowski dilation by the offset set (outside is background)."""
    cur = mask.astype(np.uint8, copy=True)
    offs = [(int(dy), int(dx)) for dy, dx in np.asarray(offsets)]
    for _ in range(iterations):
        prev = cur
        acc = cur
        for dy, dx in offs:
            if dy == 0 and dx == 0:
                continue
            acc = acc | _translate(cur, dy, dx, np.uint8(0))
        cur = acc
        if np.array_equal(cur, prev):
            break
    return cur


def binary_erode(mask, offsets, iterations, border_foreground):
    """Iterated Minkowski erosion by the offset set.

    ``border_foreground`` chooses how pixels outside the image count when a
    probe lands there: background (strict) or foreground (border-preserving).
    """
    cur = mask.astype(np.uint8, copy=True)
    fill = np.uint8(1) if border_foreground else np.uint8(0)
    offs = [(int(dy), int(dx)) for dy, dx in np.asarray(offsets)]
    for _ in range(iterations):
        acc = cur
        for dy, dx in offs:
            if dy == 0 and dx == 0:
                continue
            # erosion probes at p + (dy, dx), i.e. the translate by -(dy, dx)
            acc = acc & _translate(cur, -dy, -dx, fill)
        if np.array_equal(acc, cur):
            cur = acc
            break
        cur = acc
    return cur


def _neighbors(mask):
    """P2..P9 neighbor planes (N, NE, E, SE, S, SW, W, NW), outside = 0."""
    z = np.uint8(0)
    return (
        _translate(mask, 1, 0, z),    # N
        _translate(mask, 1, -1, z),   # NE
        _translate(mask, 0, -1, z),   # E
        _translate(mask, -1, -1, z),  # SE
        _translate(mask, -1, 0, z),   # S
        _translate(mask, -1, 1, z),   # SW
        _translate(mask, 0, 1, z),    # W
        _translate(mask, 1, 1, z),    # NW
    )


def thin_candidates(mask, step):
    """Deletion candidates for one thinning sub-iteration (0 or 1).

    Conditions follow the classic two-sub-iteration parallel thinning rules:
    2..6 foreground neighbors, exactly one 0-to-1 transition around the ring,
    and the step-specific corner products zero.
    """
    m = mask.astype(np.uint8, copy=False)
    p = _neighbors(m)
    b = np.zeros(m.shape, dtype=np.int32)
    for plane in p:
        b += plane
    ring = p + (p[0],)
    a = np.zeros(m.shape, dtype=np.int32)
    for i in range(8):
        a += (ring[i] == 0) & (ring[i + 1] == 1)
    p2, _, p4, _, p6, _, p8, _ = p
    cond = (m == 1) & (b >= 2) & (b <= 6) & (a == 1)
    if step == 0:
        cond &= (p2 & p4 & p6) == 0
        cond &= (p4 & p6 & p8) == 0
    else:
        cond &= (p2 & p4 & p8) == 0
        cond &= (p2 & p6 & p8) == 0
    return cond.astype(np.uint8)
