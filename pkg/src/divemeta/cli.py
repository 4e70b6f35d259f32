"""Command-line front end.

``divemeta pool`` pools a study table with DiVE or a QE baseline and prints
the result; ``divemeta simulate`` runs a scenario config and writes metric
tables.  Exit status is 0 on success, 1 on a data or config error and 2 on a
usage error.  Warnings go to stderr and never change the exit status.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import sim
from .core import METHODS, PooledResult
from .dive import dive_pool
from .errors import ConfigError, DiveMetaError
from .inference import check_alpha
from .qe import qe_pool
from .studyio import load_builtin, parse_study_csv

POOL_METHODS = {"dive": "DiVE", "qe-re": "QE-RE", "qe-fe": "QE-FE"}

METRIC_COLUMNS = ("i2", "method", "pct_bias_point", "pct_mse_point", "pct_bias_var", "pct_mse_var",
                  "cp_z", "aw_z", "cp_t", "aw_t")
ERROR_COLUMNS = ("i2", "method", "replicate", "pct_error_point", "pct_error_var")


# pool ------------------------------------------------------------------------

def run_pool(records, method: str, alpha: float = 0.05) -> PooledResult:
    if method == "dive":
        return dive_pool(records, alpha)
    if method == "qe-re":
        return qe_pool(records, "RE", alpha)
    if method == "qe-fe":
        return qe_pool(records, "FE", alpha)
    raise ValueError(f"unknown method {method!r}")


def _intervals(res: PooledResult, ci: str):
    out = []
    if ci in ("z", "both"):
        out.append(("z", res.ci_z, res.p_z, None))
    if ci in ("t", "both"):
        out.append(("t", res.ci_t, res.p_t, res.df))
    return out


def _p(p):
    if p is None:
        return "NA"
    return "<0.001" if p < 0.0005 else f"{p:.3f}"


def render_text(res: PooledResult, ci: str = "both") -> str:
    level = round(100 * (1 - res.alpha), 6)
    lines = [
        f"Method: {res.method}",
        f"Studies (N): {res.n_studies}    Participants: {res.n_total}",
        f"Estimate: {res.estimate:.2f}    SE: {res.se:.2f}",
    ]
    for flavor, (lo, hi), p, df in _intervals(res, ci):
        tag = flavor if df is None else f"t, df={df}"
        lines.append(f"{level:g}% CI ({tag}): [{lo:.2f}, {hi:.2f}]    p: {_p(p)}")
    if res.tau2 is not None:
        lines.append(f"tau^2: {res.tau2:.2f}")
    lines.append("Weights:")
    width = max(len(s) for s in res.study_ids)
    for sid, w in zip(res.study_ids, res.weights):
        lines.append(f"  {sid:<{width}}  {w:.3f}")
    lines.append(f"Max weight: {res.max_weight:.3f}")
    return "\n".join(lines) + "\n"


def render_csv(res: PooledResult, ci: str = "both") -> str:
    rows = [("item", "study_id", "value"),
            ("method", "", res.method),
            ("n_studies", "", res.n_studies),
            ("n_total", "", res.n_total),
            ("estimate", "", repr(res.estimate)),
            ("se", "", repr(res.se)),
            ("variance", "", repr(res.variance)),
            ("alpha", "", repr(res.alpha))]
    for flavor, (lo, hi), p, df in _intervals(res, ci):
        rows += [(f"ci_{flavor}_lower", "", repr(lo)), (f"ci_{flavor}_upper", "", repr(hi)),
                 (f"p_{flavor}", "", "NA" if p is None else repr(p))]
        if df is not None:
            rows.append(("df", "", df))
    if res.tau2 is not None:
        rows.append(("tau2", "", repr(res.tau2)))
    rows += [("weight", sid, repr(w)) for sid, w in zip(res.study_ids, res.weights)]
    rows.append(("max_weight", "", repr(res.max_weight)))
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def render_json(res: PooledResult, ci: str = "both") -> str:
    d = res.as_dict()
    if ci == "z":
        for k in ("ci_t", "p_t", "df"):
            d.pop(k)
    elif ci == "t":
        for k in ("ci_z", "p_z"):
            d.pop(k)
    return json.dumps(d, indent=2) + "\n"


RENDERERS = {"text": render_text, "csv": render_csv, "json": render_json}


def cmd_pool(args) -> int:
    check_alpha(args.alpha)
    if args.builtin:
        records, warnings = load_builtin(args.builtin)
    else:
        records, warnings = parse_study_csv(args.input)
    res = run_pool(records, args.method, args.alpha)
    if args.method != "dive":
        # QE reports its own exclusions
        warnings = []
    for w in list(warnings) + list(res.warnings):
        print(f"warning: {w}", file=sys.stderr)
    sys.stdout.write(RENDERERS[args.format](res, args.ci))
    return 0


# simulate --------------------------------------------------------------------

CONFIG_KEYS = {
    "n_studies": int,
    "size_pattern": str,
    "avg_n": int,
    "outcome": str,
    "i2": str,
    "replicates": int,
    "seed": int,
    "alpha": float,
}
REQUIRED_KEYS = ("n_studies", "size_pattern", "avg_n", "outcome", "i2", "seed")


def parse_config(text: str, source: str = "<config>") -> list[sim.SimScenario]:
    """Parse a flat ``key = value`` scenario file.

    ``i2`` may be a comma-separated list, giving one scenario per value with
    every other setting shared.  ``#`` starts a comment.  ``seed`` is
    required.

    Raises
    ------
    ConfigError
        Unknown, duplicated, missing or invalid key; the message names it.
    """
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected key = value, got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"{source}:{lineno}: key {key!r} given twice")
        raw[key] = value
    for key in REQUIRED_KEYS:
        if key not in raw:
            raise ConfigError(f"{source}: missing required key {key!r}")
    vals = {}
    for key, value in raw.items():
        try:
            vals[key] = CONFIG_KEYS[key](value)
        except ValueError:
            raise ConfigError(f"{source}: key {key!r}: cannot read {value!r} as {CONFIG_KEYS[key].__name__}") from None
    try:
        i2s = [float(v) for v in vals.pop("i2").split(",")]
    except ValueError:
        raise ConfigError(f"{source}: key 'i2': expected a number or comma-separated numbers") from None
    out = []
    for i2 in i2s:
        try:
            out.append(sim.SimScenario(i2=i2, **vals))
        except ValueError as exc:
            raise ConfigError(f"{source}: {exc}") from None
    return out


def _metric_rows(report: sim.MetricsReport):
    i2 = repr(report.scenario.i2)
    for m in report.rows:
        yield [i2, m.method] + [repr(getattr(m, c)) for c in METRIC_COLUMNS[2:]]


def _error_rows(report: sim.MetricsReport):
    i2 = repr(report.scenario.i2)
    for meth, ep in report.pct_error_point.items():
        ev = report.pct_error_var[meth]
        for r, (a, b) in enumerate(zip(ep.tolist(), ev.tolist())):
            yield [i2, meth, str(r), repr(a), repr(b)]


def write_reports(reports, out_dir) -> tuple[Path, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    metrics, errors = out / "metrics.csv", out / "errors.csv"
    with metrics.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(METRIC_COLUMNS)
        for rep in reports:
            w.writerows(_metric_rows(rep))
    with errors.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(ERROR_COLUMNS)
        for rep in reports:
            w.writerows(_error_rows(rep))
    return metrics, errors


def cmd_simulate(args) -> int:
    path = Path(args.config)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    scenarios = parse_config(text, str(path))
    reports = [sim.run_scenario(s, workers=args.workers, methods=METHODS) for s in scenarios]
    metrics, errors = write_reports(reports, args.out)
    print(f"wrote {metrics} and {errors}", file=sys.stderr)
    return 0


# entry point -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="divemeta", description="Pool median differences across studies.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pool", help="pool a study table")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", help="study CSV file")
    src.add_argument("--builtin", choices=["esd"], help="use a bundled dataset")
    p.add_argument("--method", choices=list(POOL_METHODS), default="dive")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--ci", choices=["z", "t", "both"], default="both")
    p.add_argument("--format", choices=list(RENDERERS), default="text")
    p.set_defaults(func=cmd_pool)

    s = sub.add_parser("simulate", help="run a simulation scenario file")
    s.add_argument("--config", required=True)
    s.add_argument("--out", required=True, help="output directory")
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DiveMetaError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
