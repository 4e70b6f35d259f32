"""Density, CDF, quantile and sampling for the outcome families, plus the
large-sample variance of a sample median.

Parameter conventions: normal (mean, sd); log-normal (meanlog, sdlog);
Weibull (shape, scale); gamma (shape, rate); skew-normal in the direct
parameterisation (location, scale, shape).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import integrate, optimize

from . import _kernels as K
from .errors import InvalidParams, ProbabilityOutOfRange, ZeroDensityAtMedian
from .special import norm_cdf, norm_pdf, norm_ppf


class FamilyTag(str, Enum):
    NORMAL = "normal"
    LOGNORMAL = "lognormal"
    WEIBULL = "weibull"
    GAMMA = "gamma"
    SKEWNORMAL = "skewnormal"


_CODES = {
    FamilyTag.NORMAL: K.NORMAL,
    FamilyTag.LOGNORMAL: K.LOGNORMAL,
    FamilyTag.WEIBULL: K.WEIBULL,
    FamilyTag.GAMMA: K.GAMMA,
}
TAG_BY_CODE = {v: k for k, v in _CODES.items()}

# quartile-fit candidates in tie-breaking order
QE_FAMILIES = (FamilyTag.NORMAL, FamilyTag.LOGNORMAL, FamilyTag.WEIBULL, FamilyTag.GAMMA)


@dataclass(frozen=True)
class Family:
    tag: FamilyTag
    params: tuple[float, ...]

    def __post_init__(self):
        tag = FamilyTag(self.tag)
        object.__setattr__(self, "tag", tag)
        params = tuple(float(p) for p in self.params)
        object.__setattr__(self, "params", params)
        want = 3 if tag is FamilyTag.SKEWNORMAL else 2
        if len(params) != want:
            raise InvalidParams(f"{tag.value} takes {want} parameters, got {len(params)}")
        if not all(math.isfinite(p) for p in params):
            raise InvalidParams(f"{tag.value} parameters must be finite: {params}")
        if tag in (FamilyTag.NORMAL, FamilyTag.LOGNORMAL, FamilyTag.SKEWNORMAL):
            positive = params[1:2]
        else:
            positive = params
        if any(p <= 0 for p in positive):
            raise InvalidParams(f"{tag.value} scale-type parameters must be positive: {params}")

    @classmethod
    def normal(cls, mean, sd):
        return cls(FamilyTag.NORMAL, (mean, sd))

    @classmethod
    def lognormal(cls, meanlog, sdlog):
        return cls(FamilyTag.LOGNORMAL, (meanlog, sdlog))

    @classmethod
    def weibull(cls, shape, scale):
        return cls(FamilyTag.WEIBULL, (shape, scale))

    @classmethod
    def gamma(cls, shape, rate):
        return cls(FamilyTag.GAMMA, (shape, rate))

    @classmethod
    def skewnormal(cls, location, scale, shape):
        return cls(FamilyTag.SKEWNORMAL, (location, scale, shape))

    @property
    def code(self) -> int:
        return _CODES[self.tag]


# skew-normal ---------------------------------------------------------------

def _sn_pdf_std(z, alpha):
    return 2.0 * norm_pdf(z) * norm_cdf(alpha * z)


def _sn_cdf_std(z, alpha):
    # mass below 0 is 1/2 - arctan(alpha)/pi; integrate only the finite rest
    base = 0.5 - math.atan(alpha) / math.pi
    if z == 0.0:
        return base
    part, _ = integrate.quad(_sn_pdf_std, 0.0, z, args=(alpha,), epsabs=1e-13, epsrel=1e-12, limit=200)
    return min(1.0, max(0.0, base + part))


def _sn_ppf_std(p, alpha):
    if alpha == 0.0:
        return norm_ppf(p)
    lo, hi = -1.0, 1.0
    while _sn_cdf_std(lo, alpha) > p:
        lo *= 2.0
    while _sn_cdf_std(hi, alpha) < p:
        hi *= 2.0
    return optimize.brentq(lambda z: _sn_cdf_std(z, alpha) - p, lo, hi, xtol=1e-13, rtol=1e-15, maxiter=200)


# public API ------------------------------------------------------------------

def pdf(family: Family, x: float) -> float:
    if family.tag is FamilyTag.SKEWNORMAL:
        loc, scale, shape = family.params
        return _sn_pdf_std((x - loc) / scale, shape) / scale
    a, b = family.params
    return float(K.family_pdf(family.code, a, b, float(x)))


def cdf(family: Family, x: float) -> float:
    if family.tag is FamilyTag.SKEWNORMAL:
        loc, scale, shape = family.params
        return _sn_cdf_std((x - loc) / scale, shape)
    a, b = family.params
    return float(K.family_cdf(family.code, a, b, float(x)))


def quantile(family: Family, p: float) -> float:
    if not (0.0 < p < 1.0):
        raise ProbabilityOutOfRange(f"p must lie in (0, 1), got {p!r}")
    if family.tag is FamilyTag.SKEWNORMAL:
        loc, scale, shape = family.params
        return loc + scale * _sn_ppf_std(p, shape)
    a, b = family.params
    return float(K.family_quantile(family.code, a, b, float(p)))


def median(family: Family) -> float:
    return quantile(family, 0.5)


def sample(family: Family, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``n`` i.i.d. values using ``rng``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    tag = family.tag
    if tag is FamilyTag.NORMAL:
        return rng.normal(family.params[0], family.params[1], n)
    if tag is FamilyTag.LOGNORMAL:
        return rng.lognormal(family.params[0], family.params[1], n)
    if tag is FamilyTag.WEIBULL:
        return family.params[1] * rng.weibull(family.params[0], n)
    if tag is FamilyTag.GAMMA:
        return rng.gamma(family.params[0], 1.0 / family.params[1], n)
    loc, scale, shape = family.params
    delta = shape / math.sqrt(1.0 + shape * shape)
    u = rng.standard_normal(n)
    v = rng.standard_normal(n)
    return loc + scale * (delta * np.abs(u) + math.sqrt(1.0 - delta * delta) * v)


def median_variance(family: Family, n: int) -> float:
    """Large-sample variance ``1 / (4 n f(m)^2)`` of a size-``n`` sample median."""
    if n < 1:
        raise ValueError("n must be at least 1")
    f = pdf(family, median(family))
    if not f > 0:
        raise ZeroDensityAtMedian(f"{family.tag.value} density at its median is {f}")
    return 1.0 / (4.0 * n * f * f)
