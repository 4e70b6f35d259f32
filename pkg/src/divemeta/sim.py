"""Monte Carlo evaluation of DiVE, QE-RE and QE-FE.

A :class:`SimScenario` is one cell of the factorial design.  Each replicate
allocates group sizes, derives the analytic within-study variances and the
between-study variance implied by the target I^2, draws individual-level
outcomes (shifting group 1 by a study-level random effect), reduces them to
reported medians and quartiles, and runs the three estimators.  Metrics are
relative to the true median difference (point) and to method-specific
analytic variance targets (variance).
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from . import dist, ivw
from .core import METHODS, GroupSummary, StudyRecord
from .dist import Family
from .dive import dive_variance_batch
from .errors import DominantStudy, InfeasibleBaseline, ReplicateError, ZeroDensityAtMedian, ZeroTruthDenominator
from .inference import critical_value
from .qe import select_batch
from .rng import RANDOM_EFFECT, REPLICATE_LEVEL, stream
from .special import norm_ppf

BASELINE_N = 50
OUTCOMES = ("normal", "skewnormal", "lognormal")
SIZE_PATTERNS = ("fixed", "varying")
# power target for the normal-family location shift
NORMAL_SHIFT_POWER = 0.60


@dataclass(frozen=True)
class SimScenario:
    n_studies: int
    size_pattern: str
    avg_n: int
    outcome: str
    i2: float
    replicates: int = 1000
    seed: int = 0
    alpha: float = 0.05

    def __post_init__(self):
        if self.n_studies < 2:
            raise ValueError("n_studies must be at least 2")
        if self.size_pattern not in SIZE_PATTERNS:
            raise ValueError(f"size_pattern must be one of {SIZE_PATTERNS}")
        if self.outcome not in OUTCOMES:
            raise ValueError(f"outcome must be one of {OUTCOMES}")
        if not (0.0 <= self.i2 < 1.0):
            raise ValueError("i2 must lie in [0, 1)")
        if self.replicates < 1:
            raise ValueError("replicates must be at least 1")
        if self.avg_n < 1:
            raise ValueError("avg_n must be positive")
        if self.size_pattern == "varying" and self.avg_n < BASELINE_N:
            raise InfeasibleBaseline(
                f"varying sizes need avg_n >= {BASELINE_N} (baseline per study), got {self.avg_n}")
        if not (0 <= self.seed < 1 << 64):
            raise ValueError("seed must be a 64-bit nonnegative integer")


@dataclass(frozen=True)
class OutcomeModel:
    family1: Family
    family2: Family
    median1: float
    median2: float
    density1: float
    density2: float

    @property
    def mu(self) -> float:
        return self.median1 - self.median2


@dataclass(frozen=True)
class ScenarioTruth:
    mu: float
    tau2: float
    sigma2: tuple[float, ...]
    v_target_dive: float
    v_target_re: float
    v_target_fe: float

    def target(self, method: str) -> float:
        return {"DiVE": self.v_target_dive, "QE-RE": self.v_target_re, "QE-FE": self.v_target_fe}[method]


@dataclass(frozen=True)
class MethodMetrics:
    method: str
    pct_bias_point: float
    pct_mse_point: float
    pct_bias_var: float
    pct_mse_var: float
    cp_z: float
    aw_z: float
    cp_t: float
    aw_t: float


@dataclass
class MetricsReport:
    scenario: SimScenario | None
    rows: list[MethodMetrics]
    pct_error_point: dict[str, np.ndarray] = field(default_factory=dict)
    pct_error_var: dict[str, np.ndarray] = field(default_factory=dict)

    def row(self, method: str) -> MethodMetrics:
        return next(r for r in self.rows if r.method == method)


def normal_shift(n: int) -> float:
    """Group-1 shift giving ~60% two-sided 5% power for a median difference
    of two unit-sd normal samples of size ``n`` (variance pi / n)."""
    return (norm_ppf(0.975) + norm_ppf(NORMAL_SHIFT_POWER)) * math.sqrt(math.pi / n)


def outcome_model(outcome: str, avg_n: int) -> OutcomeModel:
    if outcome == "normal":
        c = normal_shift(avg_n)
        f1, f2 = Family.normal(5.0 + c, 1.0), Family.normal(5.0, 1.0)
    elif outcome == "skewnormal":
        f1, f2 = Family.skewnormal(5.0, 5.0, 5.0), Family.skewnormal(5.0, 10.0, 10.0)
    elif outcome == "lognormal":
        f1, f2 = Family.lognormal(2.0, 1.0), Family.lognormal(3.0, 2.0)
    else:
        raise ValueError(f"unknown outcome {outcome!r}")
    m1, m2 = dist.median(f1), dist.median(f2)
    d1, d2 = dist.pdf(f1, m1), dist.pdf(f2, m2)
    if not (d1 > 0 and d2 > 0):
        raise ZeroDensityAtMedian(f"{outcome}: zero density at a true median")
    return OutcomeModel(f1, f2, m1, m2, d1, d2)


def tau2_from_i2(i2: float, sigma2) -> float:
    """Between-study variance for a target I^2 using the unequal-size
    "typical" within-study variance."""
    if not (0.0 <= i2 < 1.0):
        raise ValueError("i2 must lie in [0, 1)")
    w = 1.0 / np.asarray(sigma2, dtype=float)
    if w.size < 2:
        raise ValueError("need at least two studies")
    sw = w.sum()
    s2_typical = (w.size - 1) * sw / (sw * sw - (w * w).sum())
    return i2 / (1.0 - i2) * s2_typical


def allocate_sizes(scenario: SimScenario, rng: np.random.Generator) -> np.ndarray:
    """Per-study (n1, n2) pairs as an (N, 2) integer array.

    Varying sizes: a baseline of 50 per study plus a Dirichlet(1,...,1)
    multinomial split of the remaining ``N * avg_n - 50 N``; arms are equal.
    """
    n = scenario.n_studies
    if scenario.size_pattern == "fixed":
        n1 = np.full(n, scenario.avg_n, dtype=np.int64)
    else:
        extra = n * scenario.avg_n - BASELINE_N * n
        if extra < 0:
            raise InfeasibleBaseline("total size below the per-study baseline")
        e = rng.standard_exponential(n)
        n1 = BASELINE_N + rng.multinomial(extra, e / e.sum())
    return np.column_stack([n1, n1]).astype(np.int64)


def study_sigma2(model: OutcomeModel, sizes: np.ndarray) -> np.ndarray:
    return 1.0 / (4.0 * sizes[:, 0] * model.density1 ** 2) + 1.0 / (4.0 * sizes[:, 1] * model.density2 ** 2)


def analytic_truth(scenario: SimScenario, sizes: np.ndarray, model: OutcomeModel | None = None) -> ScenarioTruth:
    model = model or outcome_model(scenario.outcome, scenario.avg_n)
    s2 = study_sigma2(model, sizes)
    tau2 = tau2_from_i2(scenario.i2, s2)
    tot = s2 + tau2
    ns = sizes.sum(axis=1).astype(float)
    ws = ns / ns.sum()
    wf = (1.0 / s2) / (1.0 / s2).sum()
    return ScenarioTruth(
        mu=model.mu,
        tau2=float(tau2),
        sigma2=tuple(s2.tolist()),
        v_target_dive=float((ws * ws) @ tot),
        v_target_re=float(1.0 / (1.0 / tot).sum()),
        v_target_fe=float((wf * wf) @ tot),
    )


def generate_replicate(scenario: SimScenario, replicate: int, model: OutcomeModel | None = None):
    """Simulated study summaries for one replicate.

    Returns ``(records, sizes, truth)``.
    """
    model = model or outcome_model(scenario.outcome, scenario.avg_n)
    seed = scenario.seed
    sizes = allocate_sizes(scenario, stream(seed, replicate, REPLICATE_LEVEL, 0))
    truth = analytic_truth(scenario, sizes, model)
    sd = math.sqrt(truth.tau2)
    records = []
    for i in range(scenario.n_studies):
        delta = stream(seed, replicate, i + 1, RANDOM_EFFECT).normal(0.0, sd) if sd > 0 else 0.0
        x1 = dist.sample(model.family1, int(sizes[i, 0]), stream(seed, replicate, i + 1, 0)) + delta
        x2 = dist.sample(model.family2, int(sizes[i, 1]), stream(seed, replicate, i + 1, 1))
        a = K.sample_quartiles(x1)
        b = K.sample_quartiles(x2)
        records.append(StudyRecord(
            f"study{i + 1}",
            GroupSummary(int(sizes[i, 0]), float(a[1]), float(a[0]), float(a[2])),
            GroupSummary(int(sizes[i, 1]), float(b[1]), float(b[0]), float(b[2])),
        ))
    return records, sizes, truth


def estimate_replicate(records, methods=METHODS):
    """Point and variance estimates per method, in ``methods`` order."""
    y = np.array([r.effect for r in records])
    est = np.full(len(methods), np.nan)
    var = np.full(len(methods), np.nan)
    if "DiVE" in methods:
        ns = np.array([r.n_total for r in records], dtype=float)
        w = ns / ns.sum()
        if w.max() >= 0.5:
            raise DominantStudy(f"simulated study weight {w.max():.3f} >= 0.5")
        j = methods.index("DiVE")
        est[j], var[j] = dive_variance_batch(y, w)
    if "QE-RE" in methods or "QE-FE" in methods:
        groups = [g for r in records for g in (r.group1, r.group2)]
        _, _, _, dens = select_batch([g.q1 for g in groups], [g.median for g in groups], [g.q3 for g in groups])
        if not np.all(dens > 0):
            raise ValueError("QE could not fit a family to every simulated group")
        n = np.array([g.n for g in groups], dtype=float)
        term = 1.0 / (4.0 * n * dens * dens)
        v = term[0::2] + term[1::2]
        if "QE-FE" in methods:
            j = methods.index("QE-FE")
            est[j], var[j] = ivw.fe_batch(y, v)
        if "QE-RE" in methods:
            j = methods.index("QE-RE")
            est[j], var[j], _ = ivw.re_batch(y, v)
    return est, var


def _run_chunk(args):
    scenario, methods, start, stop = args
    model = outcome_model(scenario.outcome, scenario.avg_n)
    m = len(methods)
    est = np.empty((stop - start, m))
    var = np.empty((stop - start, m))
    tgt = np.empty((stop - start, m))
    for k, r in enumerate(range(start, stop)):
        try:
            records, _, truth = generate_replicate(scenario, r, model)
            est[k], var[k] = estimate_replicate(records, methods)
        except Exception as exc:  # noqa: BLE001 - re-raised with the replicate index
            raise ReplicateError(r, exc) from exc
        tgt[k] = [truth.target(meth) for meth in methods]
    return est, var, tgt


def compute_metrics(est, var, targets, mu, n_studies, alpha=0.05, methods=METHODS, scenario=None) -> MetricsReport:
    """Aggregate per-replicate estimates into relative bias/MSE, coverage and
    average interval width.

    ``est``, ``var`` and ``targets`` are (R, M) arrays in ``methods`` order.
    """
    if mu == 0:
        raise ZeroTruthDenominator("true pooled difference is zero; relative metrics undefined")
    est = np.atleast_2d(np.asarray(est, dtype=float))
    var = np.atleast_2d(np.asarray(var, dtype=float))
    targets = np.broadcast_to(np.asarray(targets, dtype=float), est.shape)
    zc = critical_value(alpha, "z")
    tc = critical_value(alpha, "t", n_studies - 1)
    rows, err_p, err_v = [], {}, {}
    for j, meth in enumerate(methods):
        ep = (est[:, j] - mu) / mu
        ev = (var[:, j] - targets[:, j]) / targets[:, j]
        se = np.sqrt(var[:, j])
        cover = {}
        for name, crit in (("z", zc), ("t", tc)):
            lo = est[:, j] - crit * se
            hi = est[:, j] + crit * se
            cover[name] = (float(np.mean((lo <= mu) & (mu <= hi))), float(np.mean(hi - lo)))
        rows.append(MethodMetrics(
            method=meth,
            pct_bias_point=100.0 * float(ep.mean()),
            pct_mse_point=100.0 * float((ep * ep).mean()),
            pct_bias_var=100.0 * float(ev.mean()),
            pct_mse_var=100.0 * float((ev * ev).mean()),
            cp_z=cover["z"][0],
            aw_z=cover["z"][1],
            cp_t=cover["t"][0],
            aw_t=cover["t"][1],
        ))
        err_p[meth] = 100.0 * ep
        err_v[meth] = 100.0 * ev
    return MetricsReport(scenario, rows, err_p, err_v)


def run_scenario(scenario: SimScenario, workers: int = 1, methods=METHODS, chunk: int = 25) -> MetricsReport:
    """Run every replicate of ``scenario`` and aggregate.

    Results are identical for any ``workers`` because each replicate draws
    only from its own keyed streams and the fold runs in replicate order.
    """
    methods = tuple(methods)
    if not methods or any(m not in METHODS for m in methods):
        raise ValueError(f"methods must be a non-empty subset of {METHODS}")
    R = scenario.replicates
    jobs = [(scenario, methods, s, min(R, s + chunk)) for s in range(0, R, chunk)]
    if workers <= 1 or len(jobs) == 1:
        parts = [_run_chunk(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk, jobs))
    est = np.concatenate([p[0] for p in parts])
    var = np.concatenate([p[1] for p in parts])
    tgt = np.concatenate([p[2] for p in parts])
    model = outcome_model(scenario.outcome, scenario.avg_n)
    return compute_metrics(est, var, tgt, model.mu, scenario.n_studies, scenario.alpha, methods, scenario)
