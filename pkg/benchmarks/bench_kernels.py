"""Compare the compiled kernels against the pure-Python fallback.

Kernel timings call both modules directly.  End-to-end solver timings run in
a subprocess per backend, since the backend is chosen when ``treematch`` is
first imported (``TREEMATCH_PURE=1`` selects the fallback).

    python benchmarks/bench_kernels.py [--sizes 500,2000] [--repeat 3]
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import timeit

from treematch import _kernels_py as py
from treematch._forest import Forest
from treematch.generators import random_tree

try:
    from treematch import _kernels as cy
except ImportError:  # pragma: no cover
    cy = None

SOLVE_SNIPPET = """
import json, sys, time
from treematch import BACKEND
from treematch.generators import random_tree
from treematch.solver import maxmax, minmax
n, repeat = int(sys.argv[1]), int(sys.argv[2])
t = random_tree(n, 0)
out = {"backend": BACKEND}
for name, fn in (("minmax", minmax), ("maxmax", maxmax)):
    best = float("inf")
    for _ in range(repeat):
        began = time.perf_counter()
        fn(t)
        best = min(best, time.perf_counter() - began)
    out[name] = best
print(json.dumps(out))
"""


def kernel_calls(mod, f: Forest) -> dict:
    o, p, ip, ix = f.order, f.parent, f.indptr, f.indices
    _, mate = py.match_forest(o, p)
    return {
        "build_csr": lambda: mod.build_csr(f.n, f.eu, f.ev),
        "dfs_preorder": lambda: mod.dfs_preorder(f.n, ip, ix),
        "match_forest": lambda: mod.match_forest(o, p),
        "residual_match": lambda: mod.residual_match(o, p, mate),
        "lL_values": lambda: mod.lL_values(ip, ix, o, p),
        "peel": lambda: mod.peel(f.n, ip, ix),
    }


def bench_kernels(n: int, repeat: int) -> list[tuple[str, float, float]]:
    t = random_tree(n, 0)
    f = Forest.from_edges(t.n, t.edges)
    rows = []
    slow = kernel_calls(py, f)
    fast = kernel_calls(cy, f)
    for name in slow:
        a = min(timeit.repeat(slow[name], number=1, repeat=repeat))
        b = min(timeit.repeat(fast[name], number=1, repeat=repeat))
        rows.append((name, a, b))
    return rows


def bench_solve(n: int, repeat: int, pure: bool) -> dict:
    env = dict(os.environ, TREEMATCH_PURE="1" if pure else "0")
    res = subprocess.run(
        [sys.executable, "-c", SOLVE_SNIPPET, str(n), str(repeat)],
        env=env, capture_output=True, text=True, check=True,
    )
    return json.loads(res.stdout)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="500,2000")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if cy is None:
        print("compiled extension not built; nothing to compare")
        return 1
    sizes = [int(x) for x in args.sizes.split(",")]
    print(f"{'n':>6} {'kernel':<16} {'python_s':>10} {'cython_s':>10} {'speedup':>8}")
    for n in sizes:
        for name, a, b in bench_kernels(n, args.repeat):
            print(f"{n:>6} {name:<16} {a:>10.5f} {b:>10.5f} {a / b:>8.1f}")
    print()
    print(f"{'n':>6} {'solver':<8} {'python_s':>10} {'cython_s':>10} {'speedup':>8}")
    for n in sizes:
        slow, fast = bench_solve(n, args.repeat, True), bench_solve(n, args.repeat, False)
        assert slow["backend"] == "python" and fast["backend"] == "cython"
        for name in ("minmax", "maxmax"):
            print(f"{n:>6} {name:<8} {slow[name]:>10.4f} {fast[name]:>10.4f} {slow[name] / fast[name]:>8.1f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
