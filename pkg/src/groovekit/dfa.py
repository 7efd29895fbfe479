"""Detrended fluctuation analysis.

The series is mean-centered and integrated into a profile; for each scale the
profile is split into non-overlapping windows, an order-n polynomial trend is
removed per window, and the square root of the mean residual variance gives
the fluctuation function F(s). Scaling exponents are least-squares slopes of
log F against log s, fitted globally, over short/long ranges, or in a sliding
window for a scale-resolved alpha(s).

Windows are tiled from both ends of the profile and their variances averaged,
so no tail samples are dropped. The profile starts at an explicit zero, which
makes it exactly antisymmetric under time reversal; reversing the input
therefore swaps the two tiling passes and leaves every F(s) unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import FitError, ParameterError

__all__ = [
    "FluctuationResult",
    "default_scales",
    "dfa_fluctuation",
    "fit_alpha",
    "fit_loglog",
    "local_alpha",
    "dfa_analyze",
    "SHORT_RANGE",
    "LONG_RANGE",
]

# conventional short/long fit ranges for the scaling exponent
SHORT_RANGE = (4, 16)
LONG_RANGE = (16, 100)


@dataclass(frozen=True)
class FluctuationResult:
    scales: np.ndarray
    F: np.ndarray
    detrend_order: int
    degenerate: bool = False
    alpha1: float | None = None
    alpha2: float | None = None
    alpha1_range: tuple[int, int] = SHORT_RANGE
    alpha2_range: tuple[int, int] = LONG_RANGE
    alpha_local: tuple[tuple[int, float], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "scales", np.asarray(self.scales, dtype=np.int64))
        object.__setattr__(self, "F", np.asarray(self.F, dtype=np.float64))


def default_scales(
    n: int,
    s_min: int = 4,
    s_max: int | None = None,
    per_decade: int = 16,
) -> np.ndarray:
    """Geometrically spaced integer scales, about ``per_decade`` per decade,
    spanning [s_min, n/4] by default."""
    if s_max is None:
        s_max = n // 4
    if s_max < s_min:
        raise ParameterError(f"series too short for scales >= {s_min} (max is {s_max})")
    if s_max == s_min:
        return np.array([s_min], dtype=np.int64)
    count = max(2, int(np.ceil(per_decade * np.log10(s_max / s_min))) + 1)
    grid = np.geomspace(s_min, s_max, num=count)
    return np.unique(np.round(grid).astype(np.int64))


def _pass_variances(profile: np.ndarray, s: int, vander: np.ndarray) -> np.ndarray:
    """Residual variance of each non-overlapping window, tiled from index 0."""
    n_win = len(profile) // s
    blocks = profile[: n_win * s].reshape(n_win, s).T  # (s, n_win)
    coef, *_ = np.linalg.lstsq(vander, blocks, rcond=None)
    resid = blocks - vander @ coef
    return np.mean(resid**2, axis=0)


def dfa_fluctuation(
    series,
    scales=None,
    detrend_order: int = 1,
) -> FluctuationResult:
    """Fluctuation function F(s) over the given scales (exponents unset).

    A constant input has zero fluctuation everywhere and is flagged
    degenerate. The series must be at least four times the largest scale, and
    every scale must exceed ``detrend_order + 1`` so windows keep residual
    degrees of freedom.
    """
    x = np.asarray(series, dtype=np.float64)
    if x.ndim != 1:
        raise ParameterError("series must be one-dimensional")
    n = len(x)
    if scales is None:
        scales = default_scales(n)
    scales = np.unique(np.asarray(scales, dtype=np.int64))
    if len(scales) == 0:
        raise ParameterError("no scales given")
    if int(scales[0]) < detrend_order + 2:
        raise ParameterError(f"scales must be at least detrend_order + 2 = {detrend_order + 2}")
    if n < 4 * int(scales[-1]):
        raise ParameterError(
            f"series of length {n} is too short for scale {int(scales[-1])} (need 4x)"
        )
    if np.all(x == x[0]):
        # exactly constant input: zero fluctuation at every scale
        return FluctuationResult(
            scales=scales,
            F=np.zeros(len(scales)),
            detrend_order=detrend_order,
            degenerate=True,
        )

    profile = np.concatenate(([0.0], np.cumsum(x - np.mean(x))))
    reversed_profile = profile[::-1]
    F = np.empty(len(scales), dtype=np.float64)
    for i, s in enumerate(scales):
        s = int(s)
        positions = np.arange(s, dtype=np.float64)
        vander = np.vander(positions, detrend_order + 1, increasing=True)
        fwd = _pass_variances(profile, s, vander)
        bwd = _pass_variances(reversed_profile, s, vander)
        F[i] = np.sqrt((fwd.sum() + bwd.sum()) / (len(fwd) + len(bwd)))
    degenerate = bool(np.all(F == 0.0))
    return FluctuationResult(
        scales=scales, F=F, detrend_order=detrend_order, degenerate=degenerate
    )


def fit_loglog(
    result: FluctuationResult,
    s_min: int,
    s_max: int,
) -> tuple[float, float, float]:
    """Least-squares line through (log s, log F) inside [s_min, s_max].

    Returns (slope, intercept, r_squared).
    """
    mask = (result.scales >= s_min) & (result.scales <= s_max)
    if int(mask.sum()) < 3:
        raise FitError(f"need at least 3 scales inside [{s_min}, {s_max}]")
    F = result.F[mask]
    if np.any(F <= 0.0):
        raise FitError("degenerate fluctuation values (F <= 0) in the fit range")
    log_s = np.log(result.scales[mask].astype(np.float64))
    log_f = np.log(F)
    slope, intercept = np.polyfit(log_s, log_f, 1)
    fitted = slope * log_s + intercept
    ss_res = float(np.sum((log_f - fitted) ** 2))
    ss_tot = float(np.sum((log_f - np.mean(log_f)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), r2


def fit_alpha(result: FluctuationResult, s_min: int, s_max: int) -> float:
    """Scaling exponent: slope of log F vs log s over [s_min, s_max]."""
    return fit_loglog(result, s_min, s_max)[0]


def local_alpha(
    result: FluctuationResult,
    half_window: int = 2,
) -> tuple[tuple[int, float], ...]:
    """Sliding log-log slope centered on each interior scale."""
    n = len(result.scales)
    width = 2 * half_window + 1
    if n < width:
        raise FitError(f"need at least {width} scales for half_window={half_window}")
    if np.any(result.F <= 0.0):
        raise FitError("degenerate fluctuation values (F <= 0)")
    log_s = np.log(result.scales.astype(np.float64))
    log_f = np.log(result.F)
    out = []
    for c in range(half_window, n - half_window):
        sl = slice(c - half_window, c + half_window + 1)
        slope = np.polyfit(log_s[sl], log_f[sl], 1)[0]
        out.append((int(result.scales[c]), float(slope)))
    return tuple(out)


def dfa_analyze(
    series,
    scales=None,
    detrend_order: int = 1,
    short_range: tuple[int, int] = SHORT_RANGE,
    long_range: tuple[int, int] = LONG_RANGE,
    half_window: int = 2,
) -> FluctuationResult:
    """Full analysis: F(s) plus fitted short/long exponents and alpha(s).

    Fit ranges are clipped to the available scales; a range left with fewer
    than three scales yields a None exponent rather than an error.
    """
    result = dfa_fluctuation(series, scales=scales, detrend_order=detrend_order)
    if result.degenerate:
        return result

    def try_fit(lo: int, hi: int) -> float | None:
        try:
            return fit_alpha(result, lo, hi)
        except FitError:
            return None

    s_max = int(result.scales[-1])
    a1_range = (short_range[0], min(short_range[1], s_max))
    a2_range = (long_range[0], min(long_range[1], s_max))
    alocal: tuple[tuple[int, float], ...] = ()
    if len(result.scales) >= 2 * half_window + 1:
        try:
            alocal = local_alpha(result, half_window=half_window)
        except FitError:
            alocal = ()
    return replace(
        result,
        alpha1=try_fit(*a1_range),
        alpha2=try_fit(*a2_range),
        alpha1_range=a1_range,
        alpha2_range=a2_range,
        alpha_local=alocal,
    )
