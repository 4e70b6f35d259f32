"""Sample-size-weighted pooling with a direct, closed-form variance estimator.

Given fixed normalised weights ``w`` with ``max(w) < 1/2`` and study effects
``Y``, the pooled estimate is ``mu = sum(w * Y)`` and its variance is
estimated by

    Var = sum_i h_i / (1 + sum_l h_l) * (Y_i - mu)^2,   h_i = w_i^2 / (1 - 2 w_i).

The coefficients ``k_i = h_i / (1 + H)`` are the unique solution of
``k_i (1 - 2 w_i) + K w_i^2 = w_i^2`` with ``K = sum k``, which makes the
estimator unbiased for ``sum w_i^2 Var(Y_i)`` whenever the effects are
independent with a common mean.  No within-study variances are needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import PooledResult, StudyRecord, WeightVector, validate_studies
from .errors import DominantStudy, LengthMismatch, ZeroSE
from .inference import check_alpha, two_sided_p, wald_ci

# soft-warning band below the hard no-dominance limit
NEAR_DOMINANCE = 0.45


@dataclass(frozen=True)
class DiveCoefficients:
    h: tuple[float, ...]
    normalizer: float

    @property
    def k(self) -> tuple[float, ...]:
        return tuple(x / self.normalizer for x in self.h)


def sample_size_weights(records: Sequence[StudyRecord]) -> WeightVector:
    """Normalised weights ``n_i / sum(n)`` with ``n_i`` the study total size."""
    records = validate_studies(records)
    sizes = [r.n_total for r in records]
    total = sum(sizes)
    return WeightVector(tuple(n / total for n in sizes), tuple(r.id for r in records))


def _as_weights(weights) -> np.ndarray:
    if isinstance(weights, WeightVector):
        return np.asarray(weights.weights, dtype=float)
    w = np.asarray(weights, dtype=float)
    WeightVector(tuple(w))  # validates, raises DominantStudy
    return w


def pool(effects, weights) -> float:
    y = np.asarray(effects, dtype=float)
    w = np.asarray(weights.weights if isinstance(weights, WeightVector) else weights, dtype=float)
    if y.shape != w.shape:
        raise LengthMismatch(f"{y.size} effects but {w.size} weights")
    return float(w @ y)


def dive_coefficients(weights) -> DiveCoefficients:
    w = _as_weights(weights)
    h = w * w / (1.0 - 2.0 * w)
    return DiveCoefficients(tuple(h.tolist()), float(1.0 + h.sum()))


def dive_variance(effects, weights) -> tuple[float, DiveCoefficients]:
    """Direct variance estimate of the weighted pooled effect.

    Parameters
    ----------
    effects : array-like, shape (N,)
    weights : WeightVector or array-like, shape (N,)
        Fixed normalised weights; must not depend on ``effects``.

    Returns
    -------
    variance : float
        Always nonnegative.
    coeffs : DiveCoefficients
    """
    y = np.asarray(effects, dtype=float)
    w = _as_weights(weights)
    if y.shape != w.shape:
        raise LengthMismatch(f"{y.size} effects but {w.size} weights")
    if y.size < 2:
        raise ValueError("variance estimation needs at least two studies")
    coeffs = dive_coefficients(w)
    k = np.asarray(coeffs.h) / coeffs.normalizer
    mu = w @ y
    return float(k @ (y - mu) ** 2), coeffs


def dive_variance_batch(effects, weights) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised pooled estimate and variance over replicate rows.

    ``effects`` is (R, N); ``weights`` is (N,) or (R, N).  No dominance check
    is made here; callers are expected to have validated the weights.
    """
    y = np.asarray(effects, dtype=float)
    w = np.broadcast_to(np.asarray(weights, dtype=float), y.shape)
    h = w * w / (1.0 - 2.0 * w)
    k = h / (1.0 + h.sum(axis=-1, keepdims=True))
    mu = np.einsum("...i,...i->...", w, y)
    var = np.einsum("...i,...i->...", k, (y - mu[..., None]) ** 2)
    return mu, var


def dive_ci(estimate, variance, n_studies, alpha=0.05, flavor="t"):
    return wald_ci(estimate, variance, alpha, flavor, df=n_studies - 1)


def dive_pvalue(estimate, se, n_studies, flavor="t"):
    if not se > 0:
        raise ZeroSE("standard error is zero; p-value undefined")
    return two_sided_p(estimate, se, flavor, df=n_studies - 1)


def dive_pool(records: Sequence[StudyRecord], alpha: float = 0.05, weights=None) -> PooledResult:
    """Pool study median differences with DiVE.

    ``weights`` defaults to normalised sample-size weights; any fixed
    :class:`WeightVector` may be supplied instead.
    """
    check_alpha(alpha)
    records = validate_studies(records)
    w = sample_size_weights(records) if weights is None else weights
    if not isinstance(w, WeightVector):
        w = WeightVector(tuple(w), tuple(r.id for r in records))
    y = [r.effect for r in records]
    mu = pool(y, w)
    var, _ = dive_variance(y, w)
    se = math.sqrt(var)
    n = len(records)
    notes = []
    for label, x in zip(w.labels, w.weights):
        if x >= NEAR_DOMINANCE:
            notes.append(f"study {label!r} weight {x:.3f} is close to 0.5; variance estimate is sensitive to it")
    return PooledResult(
        estimate=mu,
        variance=var,
        se=se,
        ci_z=dive_ci(mu, var, n, alpha, "z"),
        ci_t=dive_ci(mu, var, n, alpha, "t"),
        df=n - 1,
        method="DiVE",
        n_studies=n,
        n_total=sum(r.n_total for r in records),
        alpha=alpha,
        p_z=two_sided_p(mu, se, "z") if se > 0 else None,
        p_t=two_sided_p(mu, se, "t", n - 1) if se > 0 else None,
        weights=w.weights,
        study_ids=tuple(r.id for r in records),
        warnings=tuple(notes),
    )


__all__ = [
    "DiveCoefficients",
    "DominantStudy",
    "NEAR_DOMINANCE",
    "dive_ci",
    "dive_coefficients",
    "dive_pool",
    "dive_pvalue",
    "dive_variance",
    "dive_variance_batch",
    "pool",
    "sample_size_weights",
]
