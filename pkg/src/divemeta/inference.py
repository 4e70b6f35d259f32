"""Wald intervals and two-sided p-values on the z or t(N-1) reference."""

import math

from .errors import InvalidAlpha, ZeroSE
from .special import norm_cdf, norm_ppf, t_ppf, t_sf

FLAVORS = ("z", "t")


def check_alpha(alpha):
    if not (0.0 < alpha < 1.0):
        raise InvalidAlpha(f"alpha must lie in (0, 1), got {alpha!r}")


def critical_value(alpha, flavor, df=None):
    check_alpha(alpha)
    p = 1.0 - alpha / 2.0
    if flavor == "z":
        return norm_ppf(p)
    if flavor == "t":
        if df is None or df < 1:
            raise ValueError("t intervals need at least two studies (df >= 1)")
        return t_ppf(p, float(df))
    raise ValueError(f"unknown interval flavor {flavor!r}")


def wald_ci(estimate, variance, alpha=0.05, flavor="z", df=None):
    if variance < 0:
        raise ValueError("variance must be nonnegative")
    half = critical_value(alpha, flavor, df) * math.sqrt(variance)
    return estimate - half, estimate + half


def two_sided_p(estimate, se, flavor="z", df=None):
    if not se > 0:
        raise ZeroSE("standard error must be positive for a p-value")
    stat = abs(estimate / se)
    if flavor == "z":
        p = 2.0 * norm_cdf(-stat)
    elif flavor == "t":
        if df is None or df < 1:
            raise ValueError("t p-values need df >= 1")
        p = 2.0 * t_sf(stat, float(df))
    else:
        raise ValueError(f"unknown flavor {flavor!r}")
    return min(1.0, p)
