"""Quantile-estimation baseline.

Each group's reported (q1, median, q3) is matched by four two-parameter
families via least squares on the quartiles; the best-fitting family's
density at the reported median gives the within-study variance of the
median difference, and studies are then pooled by inverse-variance weighting.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from . import _kernels as K
from . import ivw
from .core import PooledResult, StudyRecord, validate_studies
from .dist import QE_FAMILIES, TAG_BY_CODE, Family, FamilyTag
from .errors import (
    AllFamiliesFailed,
    InsufficientQeEligibleStudies,
    NotQeEligible,
    OptimizerDiverged,
    UnsupportedQuantiles,
)
from .inference import check_alpha

TIE_TOL = 1e-12


@dataclass(frozen=True)
class DistFit:
    family: Family
    loss: float
    density_at_median: float
    converged: bool = True


@dataclass(frozen=True)
class QeStudyVariance:
    var: float
    fit1: DistFit
    fit2: DistFit


def fit_family(tag, q1: float, median: float, q3: float) -> DistFit:
    """Least-squares quartile match for one family.

    Raises
    ------
    UnsupportedQuantiles
        Zero IQR, misordered quartiles, or nonpositive quartiles for a
        positive-support family.
    OptimizerDiverged
        The loss or parameters ended non-finite.
    """
    tag = FamilyTag(tag)
    if tag not in QE_FAMILIES:
        raise ValueError(f"{tag.value} is not a quartile-fit candidate")
    code = QE_FAMILIES.index(tag)
    a, b, loss, status = K.fit_family(code, float(q1), float(median), float(q3), K.NM_TOL, K.NM_MAXITER)
    if status == K.FIT_UNSUPPORTED:
        raise UnsupportedQuantiles(f"{tag.value} cannot match quartiles ({q1}, {median}, {q3})")
    if status == K.FIT_DIVERGED:
        raise OptimizerDiverged(f"{tag.value} fit diverged for ({q1}, {median}, {q3})")
    fam = Family(tag, (a, b))
    dens = float(K.family_pdf(code, a, b, float(median)))
    return DistFit(fam, float(loss), dens, status == K.FIT_OK)


def select_family(q1: float, median: float, q3: float) -> DistFit:
    """Best fit over normal, log-normal, Weibull and gamma.

    Ties within ``TIE_TOL`` resolve in that order.
    """
    fits = []
    for tag in QE_FAMILIES:
        try:
            fits.append(fit_family(tag, q1, median, q3))
        except (UnsupportedQuantiles, OptimizerDiverged):
            continue
    if not fits:
        raise AllFamiliesFailed(f"no family could be fitted to ({q1}, {median}, {q3})")
    best = min(f.loss for f in fits)
    return next(f for f in fits if f.loss <= best + TIE_TOL)


def _group_term(n, fit: DistFit) -> float:
    return 1.0 / (4.0 * n * fit.density_at_median ** 2)


def qe_study_variance(record: StudyRecord) -> QeStudyVariance:
    if not record.qe_eligible:
        raise NotQeEligible(f"study {record.id!r} lacks quartiles in at least one group")
    g1, g2 = record.group1, record.group2
    f1 = select_family(g1.q1, g1.median, g1.q3)
    f2 = select_family(g2.q1, g2.median, g2.q3)
    return QeStudyVariance(_group_term(g1.n, f1) + _group_term(g2.n, f2), f1, f2)


def select_batch(q1s, meds, q3s):
    """Vectorised family selection over many groups.

    Returns ``(codes, params, loss, dens)`` for the selected family of every
    group; ``codes`` is -1 where nothing could be fitted.
    """
    q1s = np.ascontiguousarray(q1s, dtype=float)
    meds = np.ascontiguousarray(meds, dtype=float)
    q3s = np.ascontiguousarray(q3s, dtype=float)
    params, loss, dens, _ = K.fit_groups(q1s, meds, q3s, K.NM_TOL, K.NM_MAXITER)
    best = loss.min(axis=1)
    ok = np.isfinite(best)
    codes = np.argmax(loss <= (best + TIE_TOL)[:, None], axis=1)
    codes = np.where(ok, codes, -1)
    rows = np.arange(len(codes))
    pick = np.where(ok, codes, 0)
    return codes, params[rows, pick], np.where(ok, best, np.inf), np.where(ok, dens[rows, pick], np.nan)


def _usable(records):
    used, notes = [], []
    for r in records:
        if not r.qe_eligible:
            notes.append(f"study {r.id!r} lacks quartiles in at least one group; excluded from QE")
        elif r.group1.q1 == r.group1.q3 or r.group2.q1 == r.group2.q3:
            notes.append(f"study {r.id!r} reports a zero interquartile range; excluded from QE")
        else:
            used.append(r)
    return used, notes


def qe_pool(records: Sequence[StudyRecord], model: str = "RE", alpha: float = 0.05) -> PooledResult:
    """QE within-study variances followed by FE or DerSimonian-Laird RE pooling."""
    check_alpha(alpha)
    model = model.upper()
    if model not in ("FE", "RE"):
        raise ValueError(f"model must be 'FE' or 'RE', got {model!r}")
    records = validate_studies(records, min_studies=1)
    used, notes = _usable(records)
    if len(used) < 2:
        raise InsufficientQeEligibleStudies(
            f"QE needs at least 2 studies with quartiles in both groups; found {len(used)}")
    variances = [qe_study_variance(r).var for r in used]
    inp = ivw.IvwInput(tuple(r.effect for r in used), tuple(variances))
    ids = tuple(r.id for r in used)
    n_total = sum(r.n_total for r in used)
    if model == "FE":
        res = ivw.fe_pool(inp, alpha, method="QE-FE", study_ids=ids, n_total=n_total)
    else:
        het = ivw.dl_tau2(inp)
        res = ivw.re_pool(inp, het.tau2, alpha, method="QE-RE", study_ids=ids, n_total=n_total)
    if notes:
        res = replace(res, warnings=res.warnings + tuple(notes))
    return res


def family_name(code: int) -> str:
    return TAG_BY_CODE[code].value if code >= 0 else "none"


__all__ = [
    "DistFit",
    "QeStudyVariance",
    "fit_family",
    "qe_pool",
    "qe_study_variance",
    "select_batch",
    "select_family",
]
