"""Independent reference implementations the test suite checks against.

Everything here deliberately takes a different route from the package code:
flood-fill labeling instead of union-find, footprint-window morphology
instead of shift accumulation, numerical integration of the t density
instead of incomplete-beta identities.
"""

import math
from collections import deque

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.integrate import quad


def flood_fill_label(mask, connectivity):
    """Label components by breadth-first flood fill, canonical raster ids."""
    mask = np.asarray(mask, dtype=bool)
    h, w = mask.shape
    labels = np.zeros((h, w), dtype=np.int32)
    if connectivity == 4:
        steps = ((-1, 0), (1, 0), (0, -1), (0, 1))
    else:
        steps = ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1))
    count = 0
    for sy in range(h):
        for sx in range(w):
            if not mask[sy, sx] or labels[sy, sx]:
                continue
            count += 1
            labels[sy, sx] = count
            queue = deque([(sy, sx)])
            while queue:
                y, x = queue.popleft()
                for dy, dx in steps:
                    ny, nx = y + dy, x + dx
                    if 0 <= ny < h and 0 <= nx < w and mask[ny, nx] and not labels[ny, nx]:
                        labels[ny, nx] = count
                        queue.append((ny, nx))
    return labels, count


def canonicalize_labels(labels):
    """Renumber labels 1..n by raster order of each component's first pixel."""
    labels = np.asarray(labels)
    out = np.zeros_like(labels, dtype=np.int32)
    mapping = {}
    flat = labels.ravel()
    out_flat = out.ravel()
    for i in np.flatnonzero(flat):
        lbl = flat[i]
        if lbl not in mapping:
            mapping[lbl] = len(mapping) + 1
        out_flat[i] = mapping[lbl]
    return out, len(mapping)


def offsets_to_footprint(offsets):
    """Offset list to a centered boolean footprint plus its radius."""
    offsets = np.asarray(offsets)
    r = int(np.abs(offsets).max(initial=0))
    fp = np.zeros((2 * r + 1, 2 * r + 1), dtype=bool)
    for dy, dx in offsets:
        fp[r + dy, r + dx] = True
    return fp, r


def dilate_oracle(mask, offsets, iterations):
    """Set-definition dilation: p is set iff some q in SE has mask[p - q]."""
    mask = np.asarray(mask, dtype=bool)
    fp, r = offsets_to_footprint(offsets)
    # out[p] = OR_{q in SE} in[p - q]: examine the window around p with the
    # footprint flipped, since window[p][r + d] = in[p + d].
    fp_flipped = fp[::-1, ::-1]
    for _ in range(iterations):
        padded = np.pad(mask, r, mode="constant", constant_values=False)
        windows = sliding_window_view(padded, (2 * r + 1, 2 * r + 1))
        mask = (windows & fp_flipped).any(axis=(2, 3))
    return mask


def erode_oracle(mask, offsets, iterations, border_foreground):
    """Set-definition erosion: p survives iff mask[p + q] for every q in SE."""
    mask = np.asarray(mask, dtype=bool)
    fp, r = offsets_to_footprint(offsets)
    fill = bool(border_foreground)
    for _ in range(iterations):
        padded = np.pad(mask, r, mode="constant", constant_values=fill)
        windows = sliding_window_view(padded, (2 * r + 1, 2 * r + 1))
        mask = (windows | ~fp).all(axis=(2, 3))
    return mask


def t_pdf(x, df):
    """Student's t density, written out from the gamma-function definition."""
    log_c = (
        math.lgamma((df + 1) / 2.0)
        - math.lgamma(df / 2.0)
        - 0.5 * math.log(df * math.pi)
    )
    return math.exp(log_c - ((df + 1) / 2.0) * math.log1p(x * x / df))


def t_cdf_quad(t, df):
    """t CDF by adaptive quadrature of the density."""
    if t <= 0:
        tail, _ = quad(t_pdf, -np.inf, t, args=(df,))
        return tail
    tail, _ = quad(t_pdf, t, np.inf, args=(df,))
    return 1.0 - tail


def t_sf_quad(t, df):
    """Upper tail probability by quadrature."""
    if t >= 0:
        tail, _ = quad(t_pdf, t, np.inf, args=(df,))
        return tail
    tail, _ = quad(t_pdf, -np.inf, t, args=(df,))
    return 1.0 - tail


def pearson_oracle(a, b):
    """Correlation through numpy's covariance route, p by quadrature."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    n = a.size
    r = float(np.corrcoef(a, b)[0, 1])
    if abs(r) >= 1.0:
        return r, 0.0
    t = r * math.sqrt((n - 2) / (1.0 - r * r))
    return r, 2.0 * t_sf_quad(abs(t), n - 2)


def bland_altman_oracle(a, b):
    """Bias and limits of agreement via the stdlib statistics module."""
    import statistics

    diffs = [float(x) - float(y) for x, y in zip(a, b)]
    bias = statistics.fmean(diffs)
    sd = statistics.stdev(diffs)
    return bias, bias - 1.96 * sd, bias + 1.96 * sd


def tost_oracle(a, b, margin):
    """Paired TOST p-values via statsmodels."""
    from statsmodels.stats.weightstats import ttost_paired

    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    p_tost, lower, upper = ttost_paired(a, b, -margin, margin)
    # statsmodels returns (pvalue, (t_lower, p_lower, df), (t_upper, p_upper, df))
    return float(p_tost), float(lower[1]), float(upper[1])
