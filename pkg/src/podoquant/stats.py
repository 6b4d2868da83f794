"""Method-agreement statistics for paired feature series.

Covers Pearson correlation, Bland-Altman bias with 95% limits of
agreement, and paired two-one-sided-tests (TOST) equivalence at a fixed
absolute margin.  The t distribution comes from the regularized incomplete
beta function, so results carry full double precision.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import betainc
from scipy.stats import t as _student_t

from .errors import (
    InvalidDofError,
    NonPositiveMarginError,
    TooFewPointsError,
    ZeroVarianceError,
)


def _paired(a, b, min_n):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 1 or b.ndim != 1:
        raise ValueError("series must be 1-D")
    if a.shape != b.shape:
        raise ValueError(f"paired series differ in length: {a.size} vs {b.size}")
    if a.size < min_n:
        raise TooFewPointsError(f"need at least {min_n} pairs, got {a.size}")
    if not (np.isfinite(a).all() and np.isfinite(b).all()):
        raise ValueError("series must be finite")
    return a, b


def t_cdf(t, df):
    """CDF of Student's t via the regularized incomplete beta function."""
    if df < 1:
        raise InvalidDofError(f"degrees of freedom must be >= 1, got {df}")
    x = df / (df + t * t)
    half_tail = 0.5 * float(betainc(0.5 * df, 0.5, x))
    return half_tail if t <= 0 else 1.0 - half_tail


def _t_quantile(p, df):
    return float(_student_t.ppf(p, df))


def pearson(a, b):
    """Pearson correlation with a two-sided t-test p-value.

    Returns:
        ``(r, p_value)``.

    Raises:
        TooFewPointsError: fewer than 3 pairs.
        ZeroVarianceError: either series is constant.
    """
    a, b = _paired(a, b, 3)
    n = a.size
    da = a - a.mean()
    db = b - b.mean()
    ssa = float(da @ da)
    ssb = float(db @ db)
    if ssa == 0.0 or ssb == 0.0:
        raise ZeroVarianceError("correlation is undefined for a constant series")
    r = float(da @ db) / math.sqrt(ssa * ssb)
    r = max(-1.0, min(1.0, r))
    if abs(r) == 1.0:
        return r, 0.0
    t = r * math.sqrt((n - 2) / (1.0 - r * r))
    p = 2.0 * t_cdf(-abs(t), n - 2)
    return r, p


@dataclass(frozen=True)
class BlandAltmanResult:
    """Bias and 95% limits of agreement for paired differences a - b."""

    bias: float
    loa_low: float
    loa_high: float
    means: np.ndarray
    diffs: np.ndarray


def bland_altman(a, b):
    """Bland-Altman agreement of two paired series.

    The limits of agreement are bias +/- 1.96 sample standard deviations of
    the differences.
    """
    a, b = _paired(a, b, 2)
    diffs = a - b
    means = (a + b) / 2.0
    bias = float(diffs.mean())
    sd = float(diffs.std(ddof=1))
    return BlandAltmanResult(
        bias=bias,
        loa_low=bias - 1.96 * sd,
        loa_high=bias + 1.96 * sd,
        means=means,
        diffs=diffs,
    )


@dataclass(frozen=True)
class TostResult:
    """Outcome of a paired TOST equivalence test at an absolute margin."""

    mean_diff: float
    margin: float
    bounds: tuple
    p_lower: float
    p_upper: float
    p_tost: float
    ci90: tuple
    ci95: tuple
    equivalent: bool


def tost_paired(a, b, margin):
    """Paired TOST: are the means of a and b equivalent within +/- margin?

    Both one-sided tests run at alpha 0.05; ``p_tost`` is the larger
    p-value and equivalence requires ``p_tost < 0.05``.  With zero variance
    the test degenerates to comparing the mean difference against the
    margin directly.
    """
    a, b = _paired(a, b, 3)
    if not margin > 0:
        raise NonPositiveMarginError(f"margin must be positive, got {margin}")
    d = a - b
    n = d.size
    df = n - 1
    mean_diff = float(d.mean())
    se = float(d.std(ddof=1)) / math.sqrt(n)
    bounds = (-margin, margin)
    if se == 0.0:
        p_lower = 0.0 if mean_diff > -margin else 1.0
        p_upper = 0.0 if mean_diff < margin else 1.0
        p_tost = max(p_lower, p_upper)
        point = (mean_diff, mean_diff)
        return TostResult(
            mean_diff=mean_diff,
            margin=margin,
            bounds=bounds,
            p_lower=p_lower,
            p_upper=p_upper,
            p_tost=p_tost,
            ci90=point,
            ci95=point,
            equivalent=p_tost < 0.05,
        )
    t_lower = (mean_diff + margin) / se
    t_upper = (mean_diff - margin) / se
    p_lower = t_cdf(-t_lower, df)
    p_upper = t_cdf(t_upper, df)
    p_tost = max(p_lower, p_upper)
    q90 = _t_quantile(0.95, df)
    q95 = _t_quantile(0.975, df)
    return TostResult(
        mean_diff=mean_diff,
        margin=margin,
        bounds=bounds,
        p_lower=p_lower,
        p_upper=p_upper,
        p_tost=p_tost,
        ci90=(mean_diff - q90 * se, mean_diff + q90 * se),
        ci95=(mean_diff - q95 * se, mean_diff + q95 * se),
        equivalent=p_tost < 0.05,
    )


def equivalence_decision(ci, bounds):
    """True when the confidence interval lies inside the equivalence bounds."""
    lo, hi = float(ci[0]), float(ci[1])
    blo, bhi = float(bounds[0]), float(bounds[1])
    if lo > hi or blo > bhi:
        raise ValueError("intervals must be ordered (low, high)")
    return blo <= lo and hi <= bhi


def compare_series(a, b, margin_fraction, margin_basis="a"):
    """Full agreement report between two paired series of one feature.

    The absolute TOST margin is ``margin_fraction`` times the mean of the
    basis series (``"a"`` or ``"b"``).

    Returns:
        dict with Pearson, Bland-Altman, the TOST result, and the margin
        actually used.
    """
    if margin_basis not in ("a", "b"):
        raise ValueError(f"margin_basis must be 'a' or 'b', got {margin_basis!r}")
    a_arr, b_arr = _paired(a, b, 3)
    basis = a_arr if margin_basis == "a" else b_arr
    margin = margin_fraction * abs(float(basis.mean()))
    r, p = pearson(a_arr, b_arr)
    ba = bland_altman(a_arr, b_arr)
    tost = tost_paired(a_arr, b_arr, margin)
    return {
        "n": int(a_arr.size),
        "pearson_r": r,
        "pearson_p": p,
        "bias": ba.bias,
        "loa_low": ba.loa_low,
        "loa_high": ba.loa_high,
        "margin": margin,
        "margin_fraction": margin_fraction,
        "margin_basis": margin_basis,
        "mean_diff": tost.mean_diff,
        "p_lower": tost.p_lower,
        "p_upper": tost.p_upper,
        "p_tost": tost.p_tost,
        "ci90": list(tost.ci90),
        "ci95": list(tost.ci95),
        "equivalent": tost.equivalent,
    }
