"""Domain types shared by the estimators, the simulator and the CLI."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .errors import DominantStudy, DuplicateStudyId, EmptyInput, NonPositiveSize, QuartileOrderViolation

METHODS = ("DiVE", "QE-RE", "QE-FE")


@dataclass(frozen=True)
class GroupSummary:
    n: int
    median: float
    q1: Optional[float] = None
    q3: Optional[float] = None

    @property
    def has_quartiles(self) -> bool:
        return self.q1 is not None and self.q3 is not None


@dataclass(frozen=True)
class StudyRecord:
    id: str
    group1: GroupSummary
    group2: GroupSummary

    @property
    def effect(self) -> float:
        """Median difference, group 1 minus group 2."""
        return self.group1.median - self.group2.median

    @property
    def n_total(self) -> int:
        return self.group1.n + self.group2.n

    @property
    def qe_eligible(self) -> bool:
        return self.group1.has_quartiles and self.group2.has_quartiles


@dataclass(frozen=True)
class WeightVector:
    """Normalised, fixed pooling weights.

    Construction enforces nonnegativity, unit sum (to 1e-12) and the
    no-dominance condition ``max(weights) < 0.5``.
    """

    weights: tuple[float, ...]
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        object.__setattr__(self, "weights", w)
        if not self.labels:
            object.__setattr__(self, "labels", tuple(str(i) for i in range(len(w))))
        elif len(self.labels) != len(w):
            raise ValueError("labels and weights differ in length")
        if any(not math.isfinite(x) or x < 0 for x in w):
            raise ValueError("weights must be finite and nonnegative")
        if abs(math.fsum(w) - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1, got {math.fsum(w)!r}")
        for label, x in zip(self.labels, w):
            if x >= 0.5:
                raise DominantStudy(f"study {label!r} carries weight {x:.4f} >= 0.5; variance estimator undefined")

    def __len__(self):
        return len(self.weights)

    @property
    def max_weight(self) -> float:
        return max(self.weights)


@dataclass(frozen=True)
class PooledResult:
    """Pooled median difference with its variance and Wald intervals.

    ``ci_z`` uses the normal critical value, ``ci_t`` the t quantile with
    ``df = n_studies - 1``.  ``weights`` are the normalised pooling weights in
    ``study_ids`` order.
    """

    estimate: float
    variance: float
    se: float
    ci_z: tuple[float, float]
    ci_t: tuple[float, float]
    df: int
    method: str
    n_studies: int
    n_total: int
    alpha: float = 0.05
    tau2: Optional[float] = None
    p_z: Optional[float] = None
    p_t: Optional[float] = None
    weights: tuple[float, ...] = ()
    study_ids: tuple[str, ...] = ()
    warnings: tuple[str, ...] = field(default=())

    @property
    def max_weight(self) -> float:
        return max(self.weights) if self.weights else float("nan")

    def as_dict(self) -> dict:
        return {
            "method": self.method,
            "n_studies": self.n_studies,
            "n_total": self.n_total,
            "estimate": self.estimate,
            "variance": self.variance,
            "se": self.se,
            "alpha": self.alpha,
            "ci_z": list(self.ci_z),
            "ci_t": list(self.ci_t),
            "df": self.df,
            "p_z": self.p_z,
            "p_t": self.p_t,
            "tau2": self.tau2,
            "weights": dict(zip(self.study_ids, self.weights)),
            "max_weight": self.max_weight,
            "warnings": list(self.warnings),
        }


def _check_group(study_id, label, g: GroupSummary):
    if int(g.n) != g.n or g.n < 1:
        raise NonPositiveSize(f"study {study_id!r}: {label} size must be a positive integer, got {g.n}")
    if g.q1 is not None and g.q1 > g.median:
        raise QuartileOrderViolation(f"study {study_id!r}: {label} q1={g.q1} exceeds median={g.median}")
    if g.q3 is not None and g.median > g.q3:
        raise QuartileOrderViolation(f"study {study_id!r}: {label} median={g.median} exceeds q3={g.q3}")


def validate_studies(records: Sequence[StudyRecord], min_studies: int = 2) -> list[StudyRecord]:
    """Check every record and return them unchanged.

    Raises
    ------
    EmptyInput
        Fewer than ``min_studies`` records (pooling needs at least two).
    NonPositiveSize, QuartileOrderViolation, DuplicateStudyId
    """
    records = list(records)
    if len(records) < max(min_studies, 1):
        raise EmptyInput(f"need at least {max(min_studies, 1)} studies, got {len(records)}")
    seen = set()
    for r in records:
        if r.id in seen:
            raise DuplicateStudyId(f"duplicate study id {r.id!r}")
        seen.add(r.id)
        _check_group(r.id, "group1", r.group1)
        _check_group(r.id, "group2", r.group2)
    return records
