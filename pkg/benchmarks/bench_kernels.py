"""Compare the compiled kernels with the uncompiled fallback.

Each backend runs in its own interpreter because the switch is read at
import time.  Usage::

    python3 benchmarks/bench_kernels.py [--groups 200] [--repeat 3]
"""

import argparse
import json
import os
import subprocess
import sys
import time

WORKER = r"""
import json, sys, time
import numpy as np
from divemeta import _kernels as K
from divemeta._jit import backend
from divemeta.qe import select_batch

groups, repeat = int(sys.argv[1]), int(sys.argv[2])
rng = np.random.default_rng(1)
x = rng.lognormal(2.0, 1.0, size=(groups, 100))
q = np.array([K.sample_quartiles(row) for row in x])
q1, med, q3 = q[:, 0].copy(), q[:, 1].copy(), q[:, 2].copy()

t0 = time.perf_counter()
select_batch(q1[:2], med[:2], q3[:2])  # compile / cache load
warm = time.perf_counter() - t0

best = {}
for name, fn in [
    ("qe_fit_groups", lambda: select_batch(q1, med, q3)),
    ("sample_quartiles", lambda: [K.sample_quartiles(row) for row in x]),
]:
    ts = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        ts.append(time.perf_counter() - t0)
    best[name] = min(ts)
codes, params, loss, dens = select_batch(q1, med, q3)
print(json.dumps({"backend": backend(), "warmup": warm, "best": best,
                  "dens_sum": float(np.sum(dens)), "codes": codes.tolist()}))
"""


def run(pure: bool, groups: int, repeat: int) -> dict:
    env = dict(os.environ, DIVEMETA_PURE_NUMPY="1" if pure else "0")
    out = subprocess.run([sys.executable, "-c", WORKER, str(groups), str(repeat)],
                         env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--groups", type=int, default=200)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    fast = run(False, args.groups, args.repeat)
    slow = run(True, args.groups, args.repeat)
    print(f"{'kernel':<18}{'numba [s]':>12}{'fallback [s]':>14}{'speedup':>10}")
    for name in fast["best"]:
        a, b = fast["best"][name], slow["best"][name]
        print(f"{name:<18}{a:>12.4f}{b:>14.4f}{b / a:>9.1f}x")
    print(f"numba warm-up (compile or cache load): {fast['warmup']:.2f} s")
    same = fast["codes"] == slow["codes"]
    rel = abs(fast["dens_sum"] - slow["dens_sum"]) / abs(slow["dens_sum"])
    print(f"backends agree: families {'yes' if same else 'NO'}, density rel. diff {rel:.1e}")


if __name__ == "__main__":
    main()
