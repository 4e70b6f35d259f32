import pytest

from divemeta.core import GroupSummary, PooledResult, StudyRecord, WeightVector, validate_studies
from divemeta.errors import (
    DiveMetaError,
    DominantStudy,
    DuplicateStudyId,
    EmptyInput,
    NonPositiveSize,
    QuartileOrderViolation,
)


def rec(i, n1=10, m1=1.0, n2=10, m2=0.0, **kw):
    return StudyRecord(str(i), GroupSummary(n1, m1, kw.get("a"), kw.get("b")), GroupSummary(n2, m2))


def test_effect_is_group1_minus_group2():
    r = rec("x", m1=3.0, m2=5.5)
    assert r.effect == -2.5
    assert r.n_total == 20
    assert not r.qe_eligible


def test_qe_eligibility_needs_all_four_quartiles():
    g = GroupSummary(10, 1.0, 0.5, 2.0)
    assert StudyRecord("a", g, g).qe_eligible
    assert not StudyRecord("a", g, GroupSummary(10, 1.0, 0.5, None)).qe_eligible


def test_validate_errors():
    with pytest.raises(EmptyInput):
        validate_studies([rec(1)])
    with pytest.raises(NonPositiveSize):
        validate_studies([rec(1, n1=0), rec(2)])
    with pytest.raises(DuplicateStudyId):
        validate_studies([rec(1), rec(1)])
    with pytest.raises(QuartileOrderViolation, match="'7'"):
        validate_studies([rec(7, a=2.0, b=3.0), rec(2)])
    assert issubclass(QuartileOrderViolation, DiveMetaError)


def test_weight_vector_rules():
    w = WeightVector((0.2, 0.3, 0.5 - 1e-9, 1e-9))
    assert w.max_weight == pytest.approx(0.5)
    with pytest.raises(DominantStudy, match="'big'"):
        WeightVector((0.5, 0.25, 0.25), ("big", "b", "c"))
    with pytest.raises(ValueError):
        WeightVector((0.3, 0.3, 0.3))
    with pytest.raises(ValueError):
        WeightVector((1.2, -0.2))


def test_pooled_result_dict():
    r = PooledResult(1.0, 0.25, 0.5, (0.0, 2.0), (-1.0, 3.0), 2, "DiVE", 3, 30,
                     weights=(0.2, 0.3, 0.5), study_ids=("a", "b", "c"))
    d = r.as_dict()
    assert d["max_weight"] == 0.5
    assert d["weights"] == {"a": 0.2, "b": 0.3, "c": 0.5}
