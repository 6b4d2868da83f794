# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled per-pixel kernels: labeling, binary morphology, thinning.

Function for function this mirrors ``_pyimpl``; the equivalence tests hold
the two to identical outputs.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

ctypedef cnp.uint8_t u8
ctypedef cnp.int32_t i32
ctypedef cnp.int64_t i64


cdef inline i32 _find(i32[::1] parent, i32 x) noexcept:
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def label_components(object mask, int connectivity):
    """Two-pass union-find labeling; ids follow raster order of first pixels."""
    arr = np.ascontiguousarray(mask, dtype=np.uint8)
    cdef u8[:, ::1] m = arr
    cdef Py_ssize_t h = m.shape[0], w = m.shape[1]
    labels_arr = np.zeros((h, w), dtype=np.int32)
    cdef i32[:, ::1] lab = labels_arr
    parent_arr = np.zeros(h * w // 2 + 2, dtype=np.int32)
    cdef i32[::1] parent = parent_arr
    cdef Py_ssize_t y, x, ny, nx, k
    cdef int n_nbr
    cdef Py_ssize_t[4] dys
    cdef Py_ssize_t[4] dxs
    cdef i32[4] roots
    cdef int nr
    cdef i32 nxt = 1, best, lbl, r

    if connectivity == 4:
        n_nbr = 2
        dys[0] = -1; dxs[0] = 0
        dys[1] = 0; dxs[1] = -1
    else:
        n_nbr = 4
        dys[0] = -1; dxs[0] = -1
        dys[1] = -1; dxs[1] = 0
        dys[2] = -1; dxs[2] = 1
        dys[3] = 0; dxs[3] = -1

    for y in range(h):
        for x in range(w):
            if m[y, x] == 0:
                continue
            nr = 0
            for k in range(n_nbr):
                ny = y + dys[k]
                nx = x + dxs[k]
                if ny >= 0 and nx >= 0 and nx < w:
                    lbl = lab[ny, nx]
                    if lbl != 0:
                        roots[nr] = _find(parent, lbl)
                        nr += 1
            if nr == 0:
                parent[nxt] = nxt
                lab[y, x] = nxt
                nxt += 1
            else:
                best = roots[0]
                for k in range(1, nr):
                    if roots[k] < best:
                        best = roots[k]
                for k in range(nr):
                    if roots[k] != best:
                        parent[roots[k]] = best
                lab[y, x] = best

    canon_arr = np.zeros(nxt, dtype=np.int32)
    cdef i32[::1] canon = canon_arr
    cdef i32 count = 0
    for y in range(h):
        for x in range(w):
            if lab[y, x] != 0:
                r = _find(parent, lab[y, x])
                if canon[r] == 0:
                    count += 1
                    canon[r] = count
                lab[y, x] = canon[r]
    return labels_arr, int(count)


def binary_dilate(object mask, object offsets, int iterations):
    """Iterated dilation; grows only from the newly added frontier."""
    arr = np.array(mask, dtype=np.uint8, order="C", copy=True)
    cdef u8[:, ::1] cur = arr
    offs = np.ascontiguousarray(offsets, dtype=np.int32)
    cdef i32[:, ::1] off = offs
    cdef Py_ssize_t h = cur.shape[0], w = cur.shape[1]
    cdef Py_ssize_t n_off = off.shape[0]
    cdef Py_ssize_t y, x, i, k, qy, qx, fn, nn
    cdef int it

    if iterations <= 0 or h == 0 or w == 0:
        return arr

    front_arr = np.empty(h * w, dtype=np.int64)
    new_arr = np.empty(h * w, dtype=np.int64)
    cdef i64[::1] front = front_arr
    cdef i64[::1] fresh = new_arr
    cdef i64[::1] tmp

    fn = 0
    for y in range(h):
        for x in range(w):
            if cur[y, x]:
                front[fn] = y * w + x
                fn += 1

    # Stamping from the frontier alone is exact because the offset set
    # contains (0, 0): pixels already set stay set, and any pixel reachable
    # from an old pixel in iteration i+1 was reachable from the frontier.
    for it in range(iterations):
        if fn == 0:
            break
        nn = 0
        for i in range(fn):
            y = front[i] // w
            x = front[i] % w
            for k in range(n_off):
                qy = y + off[k, 0]
                qx = x + off[k, 1]
                if 0 <= qy < h and 0 <= qx < w and cur[qy, qx] == 0:
                    cur[qy, qx] = 1
                    fresh[nn] = qy * w + qx
                    nn += 1
        tmp = front
        front = fresh
        fresh = tmp
        fn = nn
    return arr


def binary_erode(object mask, object offsets, int iterations, bint border_foreground):
    """Iterated erosion; out-of-image probes read as ``border_foreground``."""
    a = np.array(mask, dtype=np.uint8, order="C", copy=True)
    b = np.zeros_like(a)
    cdef u8[:, ::1] cur = a
    cdef u8[:, ::1] nxt = b
    cdef u8[:, ::1] tmp
    offs = np.ascontiguousarray(offsets, dtype=np.int32)
    cdef i32[:, ::1] off = offs
    cdef Py_ssize_t h = cur.shape[0], w = cur.shape[1]
    cdef Py_ssize_t n_off = off.shape[0]
    cdef Py_ssize_t y, x, k, qy, qx
    cdef int it, ok
    cdef bint flipped = False

    if h == 0 or w == 0:
        return a

    for it in range(iterations):
        for y in range(h):
            for x in range(w):
                if cur[y, x] == 0:
                    nxt[y, x] = 0
                    continue
                ok = 1
                for k in range(n_off):
                    qy = y + off[k, 0]
                    qx = x + off[k, 1]
                    if qy < 0 or qy >= h or qx < 0 or qx >= w:
                        if not border_foreground:
                            ok = 0
                            break
                    elif cur[qy, qx] == 0:
                        ok = 0
                        break
                nxt[y, x] = ok
        tmp = cur
        cur = nxt
        nxt = tmp
        flipped = not flipped
    return a if not flipped else b


def thin_candidates(object mask, int step):
    """Deletion candidates for one thinning sub-iteration (0 or 1)."""
    arr = np.ascontiguousarray(mask, dtype=np.uint8)
    cdef u8[:, ::1] m = arr
    cdef Py_ssize_t h = m.shape[0], w = m.shape[1]
    out = np.zeros((h, w), dtype=np.uint8)
    cdef u8[:, ::1] cand = out
    cdef Py_ssize_t y, x
    cdef int b, a, i
    cdef u8[9] ring

    for y in range(h):
        for x in range(w):
            if m[y, x] == 0:
                continue
            # ring = P2..P9: N, NE, E, SE, S, SW, W, NW
            ring[0] = m[y - 1, x] if y > 0 else 0
            ring[1] = m[y - 1, x + 1] if (y > 0 and x + 1 < w) else 0
            ring[2] = m[y, x + 1] if x + 1 < w else 0
            ring[3] = m[y + 1, x + 1] if (y + 1 < h and x + 1 < w) else 0
            ring[4] = m[y + 1, x] if y + 1 < h else 0
            ring[5] = m[y + 1, x - 1] if (y + 1 < h and x > 0) else 0
            ring[6] = m[y, x - 1] if x > 0 else 0
            ring[7] = m[y - 1, x - 1] if (y > 0 and x > 0) else 0
            ring[8] = ring[0]
            b = 0
            for i in range(8):
                b += ring[i]
            if b < 2 or b > 6:
                continue
            a = 0
            for i in range(8):
                if ring[i] == 0 and ring[i + 1] == 1:
                    a += 1
            if a != 1:
                continue
            if step == 0:
                if ring[0] and ring[2] and ring[4]:
                    continue
                if ring[2] and ring[4] and ring[6]:
                    continue
            else:
                if ring[0] and ring[2] and ring[6]:
                    continue
                if ring[0] and ring[4] and ring[6]:
                    continue
            cand[y, x] = 1
    return out
