"""Pooling two-group median differences across studies.

DiVE pools study-level median differences with fixed sample-size weights
and estimates the variance of the pooled value directly from the spread of
the study effects, so only medians and group sizes are needed.  The
quantile-estimation (QE) baseline and inverse-variance pooling are included
for comparison, along with a Monte Carlo harness and a CLI.
"""

from ._jit import backend
from .core import METHODS, GroupSummary, PooledResult, StudyRecord, WeightVector, validate_studies
from .dive import dive_pool, dive_variance
from .errors import DiveMetaError
from .ivw import IvwInput, dl_tau2, fe_pool, re_pool
from .qe import qe_pool, select_family
from .sim import SimScenario, run_scenario
from .studyio import load_builtin, parse_study_csv, write_study_csv

__version__ = "0.1.0"

__all__ = [
    "METHODS",
    "DiveMetaError",
    "GroupSummary",
    "IvwInput",
    "PooledResult",
    "SimScenario",
    "StudyRecord",
    "WeightVector",
    "backend",
    "dive_pool",
    "dive_variance",
    "dl_tau2",
    "fe_pool",
    "load_builtin",
    "parse_study_csv",
    "qe_pool",
    "re_pool",
    "run_scenario",
    "select_family",
    "validate_studies",
    "write_study_csv",
]
