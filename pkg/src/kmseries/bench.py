"""Backend benchmark: compiled tape kernel vs the numpy fallback.

Run as ``python3 -m kmseries.bench``.  Builds the stochastic-volatility call
series once, then times vector evaluation of every corrective term over
(S, v) grids with each available backend and reports throughput plus the
largest cross-backend disagreement.

The two default grid sizes bracket the crossover: the compiled kernel runs
the register program point by point, so it wins on small batches where
numpy's per-op dispatch dominates, while numpy's vectorized loops win once
the arrays are long enough for SIMD to pay off.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from . import expansion, symx
from .backend import available_backends, evaluate_vector, tape_for
from .reference import HESTON_TABLE_PARAMS, HESTON_TABLE_STRIKE, HESTON_TABLE_TAU


def _grid(n):
    s = np.linspace(900.0, 1100.0, n)
    v = np.linspace(0.1, 1.1, n)
    return {
        "S": s,
        "v": v,
        "eta0": np.sqrt(v),
        "t": np.zeros(n),
        "T": np.full(n, HESTON_TABLE_TAU),
    }


def _time_backend(terms, arrays, backend, repeats):
    best = float("inf")
    outputs = []
    for _ in range(repeats):
        start = time.perf_counter()
        outputs = [evaluate_vector(term, arrays, backend=backend) for term in terms]
        best = min(best, time.perf_counter() - start)
    return best, outputs


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="kmseries.bench",
        description="compare vector-evaluation backends on the series terms",
    )
    parser.add_argument("--points", type=int, action="append",
                        help="grid size to time; repeatable (default 64 and 4096)")
    parser.add_argument("--repeats", type=int, default=5,
                        help="timing repeats, best is kept (default 5)")
    parser.add_argument("--order", type=int, default=4,
                        help="expansion order to build (default 4)")
    args = parser.parse_args(argv)
    sizes = args.points or [64, 4096]

    series = expansion.heston_call_series(
        HESTON_TABLE_PARAMS, HESTON_TABLE_STRIKE, order=args.order)
    terms = (series.baseline_price,) + series.deltas
    for term in terms:
        tape_for(term)  # compile outside the timed region

    nodes = sum(symx.dag_size(t) for t in terms)
    ops = sum(len(tape_for(t).ops) for t in terms)
    backends = available_backends()
    print(f"terms={len(terms)}  dag_nodes={nodes}  tape_ops={ops}  "
          f"backends={','.join(backends)}")

    worst_gap = 0.0
    for n in sizes:
        arrays = _grid(n)
        results = {}
        line = [f"n={n:6d}"]
        for backend in backends:
            elapsed, outputs = _time_backend(terms, arrays, backend, args.repeats)
            results[backend] = outputs
            rate = n * len(terms) / elapsed
            line.append(f"{backend} {elapsed * 1e3:9.2f} ms "
                        f"({rate / 1e3:8.1f}k term-evals/s)")
        if len(results) == 2:
            gap = max(
                float(np.max(np.abs(a - b) / np.maximum(1.0, np.abs(a))))
                for a, b in zip(results["python"], results["compiled"])
            )
            worst_gap = max(worst_gap, gap)
            line.append(f"rel gap {gap:.2e}")
        print("   ".join(line))

    if len(backends) == 2:
        if worst_gap > 1e-8:
            print(f"BACKEND MISMATCH: relative gap {worst_gap:.3e} above 1e-8")
            return 1
        print(f"backends agree to {worst_gap:.3e} relative")
    else:
        print("compiled backend not built; timed the numpy fallback only")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
