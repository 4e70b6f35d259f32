"""Reading and writing study-level summary tables.

One row per study with the exact header::

    study_id,n1,median1,q1_1,q3_1,n2,median2,q1_2,q3_2

``NA`` or an empty cell marks a missing quartile.  Group 1 is the
intervention arm, so effects are group 1 minus group 2.
"""

from __future__ import annotations

import csv
import math
from importlib import resources
from pathlib import Path
from typing import Iterable

from .core import GroupSummary, StudyRecord, validate_studies
from .errors import HeaderMismatch, MalformedCsv

HEADER = ("study_id", "n1", "median1", "q1_1", "q3_1", "n2", "median2", "q1_2", "q3_2")
MISSING = ("", "NA")
BUILTIN = {"esd": "esd_stroke.csv"}


def _size(text, line, col):
    try:
        v = float(text)
    except ValueError:
        raise MalformedCsv(f"line {line}: {col}={text!r} is not a number") from None
    if not math.isfinite(v) or v != int(v):
        raise MalformedCsv(f"line {line}: {col}={text!r} is not an integer")
    return int(v)


def _number(text, line, col, required):
    if text.strip() in MISSING:
        if required:
            raise MalformedCsv(f"line {line}: {col} is required")
        return None
    try:
        v = float(text)
    except ValueError:
        raise MalformedCsv(f"line {line}: {col}={text!r} is not a number") from None
    if not math.isfinite(v):
        raise MalformedCsv(f"line {line}: {col}={text!r} is not finite")
    return v


def _group(row, line, k):
    return GroupSummary(
        n=_size(row[f"n{k}"], line, f"n{k}"),
        median=_number(row[f"median{k}"], line, f"median{k}", True),
        q1=_number(row[f"q1_{k}"], line, f"q1_{k}", False),
        q3=_number(row[f"q3_{k}"], line, f"q3_{k}", False),
    )


def read_study_table(lines: Iterable[str], source: str = "<input>") -> tuple[list[StudyRecord], list[str]]:
    reader = csv.reader(lines)
    try:
        header = next(reader)
    except StopIteration:
        raise MalformedCsv(f"{source}: line 1: file is empty") from None
    header = [h.strip() for h in header]
    if tuple(header) != HEADER:
        raise HeaderMismatch(f"{source}: expected header {','.join(HEADER)}, got {','.join(header)}")
    records, warnings = [], []
    for cells in reader:
        line = reader.line_num
        if not cells or all(not c.strip() for c in cells):
            continue
        if len(cells) != len(HEADER):
            raise MalformedCsv(f"{source}: line {line}: expected {len(HEADER)} fields, got {len(cells)}")
        row = dict(zip(HEADER, (c.strip() for c in cells)))
        if not row["study_id"]:
            raise MalformedCsv(f"{source}: line {line}: study_id is empty")
        rec = StudyRecord(row["study_id"], _group(row, line, 1), _group(row, line, 2))
        if not rec.qe_eligible:
            warnings.append(f"study {rec.id!r} lacks quartiles in at least one group; not QE-eligible")
        records.append(rec)
    if not records:
        raise MalformedCsv(f"{source}: line {reader.line_num}: no study rows")
    validate_studies(records, min_studies=1)
    return records, warnings


def parse_study_csv(path) -> tuple[list[StudyRecord], list[str]]:
    """Parse a study table from ``path``.

    Returns
    -------
    records, warnings
        Records in file order and one warning per study that cannot enter
        quartile-based methods.

    Raises
    ------
    MalformedCsv
        Empty file, wrong field count or unparseable cell (message names the line).
    HeaderMismatch
        Header differs from :data:`HEADER`.
    QuartileOrderViolation
        ``q1 > median`` or ``median > q3``; the message names the study.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        return read_study_table(fh, str(path))


def load_builtin(name: str) -> tuple[list[StudyRecord], list[str]]:
    if name not in BUILTIN:
        raise ValueError(f"unknown built-in dataset {name!r}; choose from {sorted(BUILTIN)}")
    text = resources.files("divemeta.data").joinpath(BUILTIN[name]).read_text(encoding="utf-8")
    return read_study_table(text.splitlines(), f"builtin:{name}")


def _fmt(v):
    return "NA" if v is None else repr(float(v))


def study_rows(records: Iterable[StudyRecord]) -> list[list[str]]:
    rows = [list(HEADER)]
    for r in records:
        row = [r.id]
        for g in (r.group1, r.group2):
            row += [str(int(g.n)), _fmt(g.median), _fmt(g.q1), _fmt(g.q3)]
        rows.append(row)
    return rows


def write_study_csv(records: Iterable[StudyRecord], path) -> None:
    """Write records so that :func:`parse_study_csv` reproduces them exactly."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        csv.writer(fh, lineterminator="\n").writerows(study_rows(records))
