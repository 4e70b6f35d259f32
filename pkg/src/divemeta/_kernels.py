"""Hot kernels: two-parameter family evaluation and quartile-matching fits.

Family codes
------------
0 normal       (mean, sd)
1 log-normal   (meanlog, sdlog)
2 Weibull      (shape, scale)
3 gamma        (shape, rate)

The optimiser works in an unconstrained space: the normal mean and the
log-normal meanlog are used as is, every positivity-constrained parameter
is optimised on the log scale.
"""

import math

import numpy as np

from ._jit import kernel
from .special import gamma_std_pdf, gamma_std_ppf, gammainc_lower, norm_cdf, norm_pdf, norm_ppf

NORMAL = 0
LOGNORMAL = 1
WEIBULL = 2
GAMMA = 3
N_FAMILIES = 4

QUARTILE_PROBS = (0.25, 0.5, 0.75)

# fit status codes
FIT_OK = 0
FIT_UNSUPPORTED = 1
FIT_DIVERGED = 2
FIT_NOT_CONVERGED = 3

NM_TOL = 1e-9
NM_MAXITER = 500
_LOG_BOUND = 30.0


@kernel
def family_quantile(code, a, b, p):
    if code == NORMAL:
        return a + b * norm_ppf(p)
    if code == LOGNORMAL:
        return math.exp(a + b * norm_ppf(p))
    if code == WEIBULL:
        return b * (-math.log1p(-p)) ** (1.0 / a)
    if code == GAMMA:
        return gamma_std_ppf(p, a) / b
    return math.nan


@kernel
def family_pdf(code, a, b, x):
    if code == NORMAL:
        return norm_pdf((x - a) / b) / b
    if x <= 0.0:
        return 0.0
    if code == LOGNORMAL:
        return norm_pdf((math.log(x) - a) / b) / (x * b)
    if code == WEIBULL:
        z = x / b
        return (a / b) * z ** (a - 1.0) * math.exp(-(z ** a))
    if code == GAMMA:
        return b * gamma_std_pdf(a, b * x)
    return math.nan


@kernel
def family_cdf(code, a, b, x):
    if code == NORMAL:
        return norm_cdf((x - a) / b)
    if x <= 0.0:
        return 0.0
    if code == LOGNORMAL:
        return norm_cdf((math.log(x) - a) / b)
    if code == WEIBULL:
        return -math.expm1(-((x / b) ** a))
    if code == GAMMA:
        return gammainc_lower(a, b * x)
    return math.nan


@kernel
def _to_natural(code, t0, t1):
    if code == NORMAL or code == LOGNORMAL:
        return t0, math.exp(t1)
    return math.exp(t0), math.exp(t1)


@kernel
def _to_free(code, a, b):
    if code == NORMAL or code == LOGNORMAL:
        return a, math.log(b)
    return math.log(a), math.log(b)


@kernel
def quartile_loss(code, t0, t1, q1, med, q3):
    """Sum of squared quartile mismatches at free-space point (t0, t1)."""
    if abs(t1) > _LOG_BOUND:
        return math.inf
    if code != NORMAL and code != LOGNORMAL and abs(t0) > _LOG_BOUND:
        return math.inf
    a, b = _to_natural(code, t0, t1)
    r1 = family_quantile(code, a, b, 0.25) - q1
    r2 = family_quantile(code, a, b, 0.5) - med
    r3 = family_quantile(code, a, b, 0.75) - q3
    s = r1 * r1 + r2 * r2 + r3 * r3
    if not math.isfinite(s):
        return math.inf
    return s


@kernel
def start_values(code, q1, med, q3):
    """Heuristic natural-scale starting point; fallbacks keep it valid."""
    iqr = q3 - q1
    if code == NORMAL:
        return med, iqr / 1.349
    if code == LOGNORMAL:
        return math.log(med), math.log(q3 / q1) / 1.349
    if code == WEIBULL:
        ratio = math.log(q3 / q1)
        shape = math.log(math.log(4.0) / math.log(4.0 / 3.0)) / ratio if ratio > 0.0 else math.nan
        if not (shape > 0.0) or not math.isfinite(shape):
            return 1.0, med / math.log(2.0)
        return shape, med / math.log(2.0) ** (1.0 / shape)
    sd = iqr / 1.349
    shape = (med / sd) ** 2 if sd > 0.0 else math.nan
    if not (shape > 0.0) or not math.isfinite(shape):
        return 1.0, math.log(2.0) / med
    return shape, shape / med


@kernel
def nelder_mead(code, x0, x1, s0, s1, q1, med, q3, tol, maxiter):
    """Minimise the quartile loss from (x0, x1) with initial steps (s0, s1).

    Returns (t0, t1, loss, iterations, converged) in free coordinates.
    Convergence: largest vertex distance from the best vertex below ``tol``.
    """
    xs = np.empty((3, 2))
    fs = np.empty(3)
    xs[0, 0] = x0
    xs[0, 1] = x1
    xs[1, 0] = x0 + s0
    xs[1, 1] = x1
    xs[2, 0] = x0
    xs[2, 1] = x1 + s1
    for k in range(3):
        fs[k] = quartile_loss(code, xs[k, 0], xs[k, 1], q1, med, q3)

    it = 0
    converged = False
    while it < maxiter:
        # order vertices: best, middle, worst
        for i in range(1, 3):
            j = i
            while j > 0 and fs[j] < fs[j - 1]:
                f = fs[j]
                fs[j] = fs[j - 1]
                fs[j - 1] = f
                for c in range(2):
                    v = xs[j, c]
                    xs[j, c] = xs[j - 1, c]
                    xs[j - 1, c] = v
                j -= 1
        diam = 0.0
        for k in range(1, 3):
            d = math.hypot(xs[k, 0] - xs[0, 0], xs[k, 1] - xs[0, 1])
            if d > diam:
                diam = d
        if diam < tol:
            converged = True
            break
        it += 1

        c0 = 0.5 * (xs[0, 0] + xs[1, 0])
        c1 = 0.5 * (xs[0, 1] + xs[1, 1])
        r0 = 2.0 * c0 - xs[2, 0]
        r1 = 2.0 * c1 - xs[2, 1]
        fr = quartile_loss(code, r0, r1, q1, med, q3)
        if fr < fs[0]:
            e0 = 3.0 * c0 - 2.0 * xs[2, 0]
            e1 = 3.0 * c1 - 2.0 * xs[2, 1]
            fe = quartile_loss(code, e0, e1, q1, med, q3)
            if fe < fr:
                xs[2, 0] = e0
                xs[2, 1] = e1
                fs[2] = fe
            else:
                xs[2, 0] = r0
                xs[2, 1] = r1
                fs[2] = fr
            continue
        if fr < fs[1]:
            xs[2, 0] = r0
            xs[2, 1] = r1
            fs[2] = fr
            continue
        if fr < fs[2]:
            # outside contraction
            k0 = c0 + 0.5 * (r0 - c0)
            k1 = c1 + 0.5 * (r1 - c1)
            fk = quartile_loss(code, k0, k1, q1, med, q3)
            if fk <= fr:
                xs[2, 0] = k0
                xs[2, 1] = k1
                fs[2] = fk
                continue
        else:
            k0 = c0 + 0.5 * (xs[2, 0] - c0)
            k1 = c1 + 0.5 * (xs[2, 1] - c1)
            fk = quartile_loss(code, k0, k1, q1, med, q3)
            if fk < fs[2]:
                xs[2, 0] = k0
                xs[2, 1] = k1
                fs[2] = fk
                continue
        # shrink towards the best vertex
        for k in range(1, 3):
            xs[k, 0] = xs[0, 0] + 0.5 * (xs[k, 0] - xs[0, 0])
            xs[k, 1] = xs[0, 1] + 0.5 * (xs[k, 1] - xs[0, 1])
            fs[k] = quartile_loss(code, xs[k, 0], xs[k, 1], q1, med, q3)

    best = 0
    for k in range(1, 3):
        if fs[k] < fs[best]:
            best = k
    return xs[best, 0], xs[best, 1], fs[best], it, converged


@kernel
def fit_family(code, q1, med, q3, tol, maxiter):
    """Fit one family to (q1, med, q3).

    Returns (a, b, loss, status) with natural-scale parameters.
    """
    if not (q1 < q3) or not (q1 <= med <= q3):
        return math.nan, math.nan, math.inf, FIT_UNSUPPORTED
    if code != NORMAL and not (q1 > 0.0):
        return math.nan, math.nan, math.inf, FIT_UNSUPPORTED
    a0, b0 = start_values(code, q1, med, q3)
    x0, x1 = _to_free(code, a0, b0)
    s0 = 0.1 * (q3 - q1) if code == NORMAL else 0.1
    s1 = 0.1
    t0, t1, loss, it, conv = nelder_mead(code, x0, x1, s0, s1, q1, med, q3, tol, maxiter)
    if not conv:
        # single restart from a perturbed copy of the best point
        t0, t1, loss, it, conv = nelder_mead(code, t0, t1, -0.5 * s0, 0.5 * s1,
                                             q1, med, q3, tol, maxiter)
    a, b = _to_natural(code, t0, t1)
    if not math.isfinite(loss) or not math.isfinite(a) or not math.isfinite(b):
        return a, b, loss, FIT_DIVERGED
    if not conv:
        return a, b, loss, FIT_NOT_CONVERGED
    return a, b, loss, FIT_OK


@kernel
def fit_groups(q1s, meds, q3s, tol, maxiter):
    """Fit every candidate family to every group's reported quartiles.

    Returns ``params`` (G, 4, 2), ``loss`` (G, 4), ``dens`` (G, 4) holding the
    fitted density at the reported median, and ``status`` (G, 4).
    """
    g = q1s.shape[0]
    params = np.full((g, N_FAMILIES, 2), np.nan)
    loss = np.full((g, N_FAMILIES), np.inf)
    dens = np.full((g, N_FAMILIES), np.nan)
    status = np.full((g, N_FAMILIES), FIT_UNSUPPORTED, dtype=np.int64)
    for i in range(g):
        for code in range(N_FAMILIES):
            a, b, s, st = fit_family(code, q1s[i], meds[i], q3s[i], tol, maxiter)
            status[i, code] = st
            if st == FIT_OK or st == FIT_NOT_CONVERGED:
                params[i, code, 0] = a
                params[i, code, 1] = b
                loss[i, code] = s
                dens[i, code] = family_pdf(code, a, b, meds[i])
    return params, loss, dens, status


@kernel
def sample_quartiles(x):
    """Median-unbiased (Hyndman-Fan type 8) quartiles of a 1-D sample.

    The 0.5 point coincides with the ordinary sample median.
    """
    y = np.sort(x)
    n = y.shape[0]
    out = np.empty(3)
    for k in range(3):
        p = 0.25 * (k + 1)
        h = (n + 1.0 / 3.0) * p + 1.0 / 3.0
        lo = int(math.floor(h))
        frac = h - lo
        if lo < 1:
            out[k] = y[0]
        elif lo >= n:
            out[k] = y[n - 1]
        else:
            out[k] = y[lo - 1] + frac * (y[lo] - y[lo - 1])
    return out
