"""Compare the compiled GF(2) kernels with the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--size 400]

Kernel timings use both backends in-process.  The end-to-end persistence
run is repeated in a subprocess with HDVFKIT_PURE_PYTHON=1 so that every
library call goes through the fallback.
"""

from __future__ import annotations

import argparse
import os
import random
import subprocess
import sys
import timeit

from hdvfkit import _kernels

PERSISTENCE_SNIPPET = """
import random, time
from hdvfkit.persistence import Filtration, compute_persistence, persistence_oracle
rng = random.Random(0)
grid = [[rng.randint(1, 9) * (rng.random() < 0.8) for _ in range({side})] for _ in range({side})]
f = Filtration.from_grid(grid)
t = time.perf_counter(); compute_persistence(f); a = time.perf_counter() - t
t = time.perf_counter(); persistence_oracle(f); b = time.perf_counter() - t
print(len(f), a, b)
"""


def random_rows(rng, nrows, ncols, density):
    rows = []
    for _ in range(nrows):
        bits = 0
        for j in range(ncols):
            if rng.random() < density:
                bits |= 1 << j
        rows.append(bits)
    return rows


def time_kernel(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def persistence_run(side, pure):
    env = dict(os.environ)
    env["HDVFKIT_PURE_PYTHON"] = "1" if pure else "0"
    out = subprocess.run(
        [sys.executable, "-c", PERSISTENCE_SNIPPET.format(side=side)],
        env=env, capture_output=True, text=True, check=True,
    )
    cells, hdvf_time, oracle_time = out.stdout.split()
    return int(cells), float(hdvf_time), float(oracle_time)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--size", type=int, default=400, help="rows and columns of the kernel matrices")
    p.add_argument("--side", type=int, default=6, help="grid side for the persistence run")
    args = p.parse_args(argv)

    names = _kernels.available()
    if "compiled" not in names:
        print("compiled extension not built; only the Python backend is available")
    rng = random.Random(1)
    n = args.size
    sparse = random_rows(rng, n, n, 0.02)
    dense = random_rows(rng, n, n, 0.5)
    cases = [
        ("rank sparse", lambda k: k.rank(sparse, n)),
        ("rank dense", lambda k: k.rank(dense, n)),
        ("rref dense", lambda k: k.rref(dense, n)),
        ("reduce_columns sparse", lambda k: k.reduce_columns(sparse)),
        ("reduce_columns dense", lambda k: k.reduce_columns(dense)),
    ]
    print(f"{n}x{n} matrices, best of {args.repeat}")
    print(f"{'kernel':24s}" + "".join(f"{name:>12s}" for name in names) + ("   speedup" if len(names) > 1 else ""))
    for label, call in cases:
        times = {name: time_kernel(lambda: call(_kernels.get(name)), args.repeat) for name in names}
        row = f"{label:24s}" + "".join(f"{times[name] * 1e3:10.2f}ms" for name in names)
        if len(names) > 1:
            row += f"{times['python'] / times['compiled']:9.1f}x"
        print(row)

    print(f"\npersistence on a {args.side}x{args.side} lower-star grid")
    for pure in ([True, False] if "compiled" in names else [True]):
        cells, hdvf_time, oracle_time = persistence_run(args.side, pure)
        label = "python" if pure else "compiled"
        print(f"  {label:9s} {cells} cells: HDVF completion {hdvf_time:.3f}s, column reduction {oracle_time * 1e3:.2f}ms")


if __name__ == "__main__":
    main()
