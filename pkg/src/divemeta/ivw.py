"""Inverse-variance weighted pooling (fixed and random effects) and the
DerSimonian-Laird moment estimator of the between-study variance."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import LengthMismatch, NeedTwoStudies, NonPositiveVariance
from .inference import check_alpha, two_sided_p, wald_ci
from .core import PooledResult


@dataclass(frozen=True)
class IvwInput:
    effects: tuple[float, ...]
    within_var: tuple[float, ...]

    def __post_init__(self):
        y = tuple(float(v) for v in self.effects)
        s = tuple(float(v) for v in self.within_var)
        object.__setattr__(self, "effects", y)
        object.__setattr__(self, "within_var", s)
        if len(y) != len(s):
            raise LengthMismatch(f"{len(y)} effects but {len(s)} variances")
        if not y:
            raise ValueError("no studies")
        if any(not (v > 0) or not math.isfinite(v) for v in s):
            raise NonPositiveVariance("within-study variances must be finite and positive")

    def __len__(self):
        return len(self.effects)


@dataclass(frozen=True)
class HeterogeneityEstimate:
    tau2: float
    q_stat: float
    df: int
    tau2_raw: float  # before truncation at zero


def _arrays(inp: IvwInput):
    return np.asarray(inp.effects), np.asarray(inp.within_var)


def _weighted(y, w):
    sw = w.sum()
    return float(w @ y / sw), float(1.0 / sw)


def fe_estimate(inp: IvwInput) -> tuple[float, float]:
    y, v = _arrays(inp)
    return _weighted(y, 1.0 / v)


def re_estimate(inp: IvwInput, tau2: float) -> tuple[float, float]:
    if tau2 < 0:
        raise ValueError("tau2 must be nonnegative")
    y, v = _arrays(inp)
    return _weighted(y, 1.0 / (v + tau2))


def dl_tau2(inp: IvwInput) -> HeterogeneityEstimate:
    """DerSimonian-Laird moment estimator, truncated at zero."""
    if len(inp) < 2:
        raise NeedTwoStudies("between-study variance needs at least two studies")
    y, v = _arrays(inp)
    w = 1.0 / v
    sw = w.sum()
    mu = w @ y / sw
    q = float(w @ (y - mu) ** 2)
    denom = sw - (w @ w) / sw
    raw = float((q - (len(y) - 1)) / denom)
    return HeterogeneityEstimate(tau2=max(0.0, raw), q_stat=q, df=len(y) - 1, tau2_raw=raw)


def _result(method, mu, var, n, alpha, tau2, weights, ids, n_total):
    se = math.sqrt(var)
    return PooledResult(
        estimate=mu,
        variance=var,
        se=se,
        ci_z=wald_ci(mu, var, alpha, "z"),
        ci_t=wald_ci(mu, var, alpha, "t", n - 1) if n >= 2 else (math.nan, math.nan),
        df=n - 1,
        method=method,
        n_studies=n,
        n_total=n_total,
        alpha=alpha,
        tau2=tau2,
        p_z=two_sided_p(mu, se, "z"),
        p_t=two_sided_p(mu, se, "t", n - 1) if n >= 2 else None,
        weights=tuple(weights.tolist()),
        study_ids=tuple(ids) if ids else tuple(str(i) for i in range(n)),
    )


def fe_pool(inp: IvwInput, alpha=0.05, *, method="QE-FE", study_ids=(), n_total=0) -> PooledResult:
    check_alpha(alpha)
    mu, var = fe_estimate(inp)
    w = 1.0 / np.asarray(inp.within_var)
    return _result(method, mu, var, len(inp), alpha, 0.0, w / w.sum(), study_ids, n_total)


def re_pool(inp: IvwInput, tau2: float, alpha=0.05, *, method="QE-RE", study_ids=(), n_total=0) -> PooledResult:
    check_alpha(alpha)
    mu, var = re_estimate(inp, tau2)
    w = 1.0 / (np.asarray(inp.within_var) + tau2)
    return _result(method, mu, var, len(inp), alpha, float(tau2), w / w.sum(), study_ids, n_total)


def fe_batch(effects, within_var):
    """Row-wise FE estimates over (R, N) arrays; returns (mu, var)."""
    w = 1.0 / np.asarray(within_var, dtype=float)
    sw = w.sum(axis=-1)
    return (w * effects).sum(axis=-1) / sw, 1.0 / sw


def re_batch(effects, within_var):
    """Row-wise DL random-effects estimates; returns (mu, var, tau2)."""
    y = np.asarray(effects, dtype=float)
    v = np.asarray(within_var, dtype=float)
    w = 1.0 / v
    sw = w.sum(axis=-1)
    mu_fe = (w * y).sum(axis=-1) / sw
    q = (w * (y - mu_fe[..., None]) ** 2).sum(axis=-1)
    denom = sw - (w * w).sum(axis=-1) / sw
    tau2 = np.maximum(0.0, (q - (y.shape[-1] - 1)) / denom)
    ws = 1.0 / (v + tau2[..., None])
    sws = ws.sum(axis=-1)
    return (ws * y).sum(axis=-1) / sws, 1.0 / sws, tau2
