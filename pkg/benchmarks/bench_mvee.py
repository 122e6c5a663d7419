"""Timing comparison of the two minimum-ellipsoid kernel backends.

The backend is chosen when the package is imported, so each measurement
runs in a child interpreter with AFFPOINTS_KERNELS pinned.  Clouds are
anisotropic gaussians with a fixed seed; reported numbers are medians over
the repeat runs, after one untimed warmup solve per child.
"""
from __future__ import annotations

import argparse
import json
import os
import statistics
import subprocess
import sys

_CHILD = r"""
import json, sys, time
import numpy as np
from affpoints import kernel_info, mvee_points

n, d, repeats, tol, seed = json.loads(sys.argv[1])
rng = np.random.default_rng(seed)
pts = rng.standard_normal((n, d)) * (1.0 + rng.uniform(0.0, 2.0, d))
res = mvee_points(pts, tol=tol)
times = []
for _ in range(repeats):
    t0 = time.perf_counter()
    res = mvee_points(pts, tol=tol)
    times.append(time.perf_counter() - t0)
print(json.dumps({"backend": kernel_info()["backend"],
                  "iterations": res.iterations, "times": times}))
"""


def run_child(backend: str, n: int, d: int, repeats: int, tol: float,
              seed: int) -> dict:
    env = dict(os.environ, AFFPOINTS_KERNELS=backend)
    payload = json.dumps([n, d, repeats, tol, seed])
    out = subprocess.run([sys.executable, "-c", _CHILD, payload],
                         env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="2000,20000",
                    help="comma-separated point counts")
    ap.add_argument("--dims", default="2,3,6",
                    help="comma-separated dimensions")
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--tol", type=float, default=1e-9)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args(argv)

    sizes = [int(s) for s in args.sizes.split(",")]
    dims = [int(s) for s in args.dims.split(",")]

    probe = run_child("compiled", 50, 2, 1, 1e-6, args.seed)
    have_compiled = probe["backend"] == "compiled"
    if not have_compiled:
        print("compiled kernel unavailable, timing the python backend only",
              file=sys.stderr)
    backends = ["python"] + (["compiled"] if have_compiled else [])

    header = f"{'n':>7} {'d':>3} {'iters':>7}"
    for b in backends:
        header += f" {b + ' (s)':>13}"
    if have_compiled:
        header += f" {'speedup':>9}"
    print(header)
    print("-" * len(header))

    for n in sizes:
        for d in dims:
            meds = {}
            iters = 0
            for backend in backends:
                rep = run_child(backend, n, d, args.repeats, args.tol,
                                args.seed)
                meds[backend] = statistics.median(rep["times"])
                iters = rep["iterations"]
            row = f"{n:>7} {d:>3} {iters:>7}"
            for b in backends:
                row += f" {meds[b]:>13.4f}"
            if have_compiled:
                row += f" {meds['python'] / meds['compiled']:>8.1f}x"
            print(row)
    return 0


if __name__ == "__main__":
    sys.exit(main())
