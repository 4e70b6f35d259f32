"""Scalar special functions used by the distribution toolkit and the CI code.

Everything here is written in the numba-compatible subset so it can be
called from compiled kernels.  Algorithms:

* standard normal quantile: rational initial approximation (Acklam) polished
  by two Halley steps against ``erfc``;
* regularized incomplete gamma: power series below ``a + 1``, modified Lentz
  continued fraction above;
* gamma quantile: bracketed Halley iteration on the regularized gamma;
* regularized incomplete beta: modified Lentz continued fraction with the
  usual symmetry switch;
* Student t CDF / quantile: incomplete beta plus bracketed Newton, accurate
  to about 1e-12 in probability.
"""

import math

from ._jit import kernel

SQRT2 = math.sqrt(2.0)
SQRT2PI = math.sqrt(2.0 * math.pi)
_TINY = 1e-300
_EPS = 1e-16

_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)


@kernel
def norm_pdf(x):
    return math.exp(-0.5 * x * x) / SQRT2PI


@kernel
def norm_cdf(x):
    return 0.5 * math.erfc(-x / SQRT2)


@kernel
def _norm_ppf_lower(p):
    # p in (0, 0.5]
    if p < 0.02425:
        q = math.sqrt(-2.0 * math.log(p))
        x = ((((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5])
             / ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0))
    else:
        q = p - 0.5
        r = q * q
        x = ((((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q
             / (((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0))
    for _ in range(2):
        e = 0.5 * math.erfc(-x / SQRT2) - p
        u = e * SQRT2PI * math.exp(0.5 * x * x)
        x = x - u / (1.0 + 0.5 * x * u)
    return x


@kernel
def norm_ppf(p):
    """Standard normal quantile; ``nan`` outside (0, 1)."""
    if not (0.0 < p < 1.0):
        if p == 0.0:
            return -math.inf
        if p == 1.0:
            return math.inf
        return math.nan
    if p > 0.5:
        # 1 - p is exact for p in [0.5, 1]
        return -_norm_ppf_lower(1.0 - p)
    return _norm_ppf_lower(p)


@kernel
def _gamma_series(a, x):
    ap = a
    term = 1.0 / a
    total = term
    for _ in range(100000):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * math.exp(a * math.log(x) - x - math.lgamma(a))


@kernel
def _gamma_contfrac(a, x):
    # upper tail Q(a, x) via modified Lentz
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, 100000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return math.exp(a * math.log(x) - x - math.lgamma(a)) * h


@kernel
def gammainc_lower(a, x):
    """Regularized lower incomplete gamma ``P(a, x)``."""
    if x <= 0.0:
        return 0.0
    if x < a + 1.0:
        return _gamma_series(a, x)
    return 1.0 - _gamma_contfrac(a, x)


@kernel
def gamma_std_pdf(a, x):
    if x <= 0.0:
        if x == 0.0 and a == 1.0:
            return 1.0
        return 0.0
    return math.exp((a - 1.0) * math.log(x) - x - math.lgamma(a))


@kernel
def gamma_std_ppf(p, a):
    """Quantile of Gamma(shape ``a``, rate 1)."""
    if not (0.0 < p < 1.0) or not (a > 0.0):
        return math.nan
    if a > 1.0:
        z = norm_ppf(p)
        t = 1.0 - 1.0 / (9.0 * a) + z / (3.0 * math.sqrt(a))
        x = a * t * t * t
        if x <= 0.0:
            x = math.exp((math.log(p * a) + math.lgamma(a)) / a)
    else:
        t = 1.0 - a * (0.253 + a * 0.12)
        if p < t:
            x = (p / t) ** (1.0 / a)
        else:
            x = 1.0 - math.log(1.0 - (p - t) / (1.0 - t))
    if not (x > 0.0) or not math.isfinite(x):
        x = a
    lo = 0.0
    hi = math.inf
    for _ in range(200):
        err = gammainc_lower(a, x) - p
        if err < 0.0:
            lo = x
        else:
            hi = x
        dens = gamma_std_pdf(a, x)
        if dens > 0.0:
            u = err / dens
            corr = u * ((a - 1.0) / x - 1.0)
            if corr > 1.0:
                corr = 1.0
            elif corr < -1.0:
                corr = -1.0
            xn = x - u / (1.0 - 0.5 * corr)
        else:
            xn = math.nan
        if not (lo < xn < hi):
            if math.isfinite(hi):
                xn = 0.5 * (lo + hi)
            else:
                xn = 2.0 * x
        if abs(xn - x) <= 1e-14 * xn:
            x = xn
            break
        if math.isfinite(hi) and hi - lo <= 1e-15 * hi:
            x = 0.5 * (lo + hi)
            break
        x = xn
    return x


@kernel
def _beta_contfrac(a, b, x):
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, 100000):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return h


@kernel
def betainc(a, b, x, y):
    """Regularized incomplete beta ``I_x(a, b)``; ``y`` must equal ``1 - x``.

    Passing the complement separately keeps precision when ``x`` is near 1.
    """
    if x <= 0.0:
        return 0.0
    if y <= 0.0:
        return 1.0
    lbt = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
           + a * math.log(x) + b * math.log(y))
    bt = math.exp(lbt)
    if x < (a + 1.0) / (a + b + 2.0):
        return bt * _beta_contfrac(a, b, x) / a
    return 1.0 - bt * _beta_contfrac(b, a, y) / b


@kernel
def t_sf(t, df):
    """Upper tail probability of Student t with ``df`` degrees of freedom."""
    if math.isinf(t):
        return 0.0 if t > 0 else 1.0
    t2 = t * t
    x = df / (df + t2)
    y = t2 / (df + t2)
    tail = 0.5 * betainc(0.5 * df, 0.5, x, y)
    if t > 0.0:
        return tail
    return 1.0 - tail


@kernel
def t_cdf(t, df):
    return t_sf(-t, df)


@kernel
def t_pdf(t, df):
    lc = math.lgamma(0.5 * (df + 1.0)) - math.lgamma(0.5 * df) - 0.5 * math.log(df * math.pi)
    return math.exp(lc - 0.5 * (df + 1.0) * math.log1p(t * t / df))


@kernel
def _t_isf_upper(q, df):
    # t > 0 with sf(t) = q, q in (0, 0.5)
    lo = 0.0
    hi = 1.0
    while t_sf(hi, df) > q:
        lo = hi
        hi *= 2.0
        if hi > 1e300:
            return math.inf
    x = 0.5 * (lo + hi)
    z = -norm_ppf(q)
    if lo < z < hi:
        x = z
    for _ in range(300):
        err = t_sf(x, df) - q
        if err > 0.0:
            lo = x
        else:
            hi = x
        dens = t_pdf(x, df)
        xn = x + err / dens if dens > 0.0 else math.nan
        if not (lo < xn < hi):
            xn = 0.5 * (lo + hi)
        if abs(xn - x) <= 1e-14 * abs(xn) or hi - lo <= 1e-15 * hi:
            return xn
        x = xn
    return x


@kernel
def t_ppf(p, df):
    """Student t quantile for real ``df > 0``; closed forms at df 1 and 2."""
    if not (0.0 < p < 1.0) or not (df > 0.0):
        return math.nan
    if p == 0.5:
        return 0.0
    if df == 1.0:
        return math.tan(math.pi * (p - 0.5))
    if df == 2.0:
        return (2.0 * p - 1.0) / math.sqrt(2.0 * p * (1.0 - p))
    if p > 0.5:
        return _t_isf_upper(1.0 - p, df)
    return -_t_isf_upper(p, df)
