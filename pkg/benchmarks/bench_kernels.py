#!/usr/bin/env python3
"""Benchmark the enumeration kernels: numba JIT versus the pure-numpy path.

Times the three hot kernels on a realistic workload (relation-mask
enumeration over a formula carrier with connexive condition guards) and
checks that both backends agree.

    python3 benchmarks/bench_kernels.py [--bits 20] [--repeat 3]
"""

import argparse
import time

import numpy as np

from bclkit.conditions import compile_rules, parse_conditions
from bclkit.kernels import as_guard_arrays, as_horn_arrays, get_backend
from bclkit.syntax import parse, subformula_closure


def build_workload(bits):
    carrier = subformula_closure(
        [parse("~(p -> ~p)"), parse("~q"), parse("p & q")])
    conds = parse_conditions("a1,a2,b0,cun,r3")
    rules = compile_rules(carrier, conds)
    n_pairs = rules.n * rules.n
    free = [i for i in range(n_pairs) if not (rules.base_mask >> i) & 1]
    assert len(free) >= bits, "carrier too small for the requested bits"
    return rules, np.array(free[:bits], dtype=np.int64)


def timed(fn, repeat):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return result, best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--bits", type=int, default=20,
                    help="free relation pairs to enumerate (space = 2^bits)")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    rules, free = build_workload(args.bits)
    gp, gw = as_guard_arrays(rules.guards)
    hp, hc = as_horn_arrays(rules.horn)
    base = np.uint64(rules.base_mask)

    rng = np.random.default_rng(0)
    batch = rng.integers(0, 1 << (rules.n * rules.n), size=200_000,
                         dtype=np.uint64)

    backends = []
    for name in ("numpy", "numba"):
        try:
            backends.append(get_backend(name))
        except ImportError:
            print(f"{name}: unavailable, skipped")

    rows = []
    results = {}
    for b in backends:
        # warm up the JIT outside the timed region
        b.count_passing(4, free[:4], base, gp, gw)
        b.close_masks(batch[:16], hp, hc)

        count, t_count = timed(
            lambda: b.count_passing(args.bits, free, base, gp, gw), args.repeat)
        closed, t_close = timed(lambda: b.close_masks(batch, hp, hc), args.repeat)
        checked, t_check = timed(lambda: b.check_masks(closed, gp, gw), args.repeat)
        results[b.NAME] = (count, closed, checked)
        rows.append((b.NAME, count, t_count, t_close, t_check))

    print(f"\nworkload: {rules.n}-formula carrier, {len(rules.guards)} guards, "
          f"{len(rules.horn)} horn rules, 2^{args.bits} masks, "
          f"{len(batch)} closure seeds\n")
    print(f"{'backend':<8} {'count':>10} {'count_passing':>14} "
          f"{'close_masks':>12} {'check_masks':>12}")
    for name, count, tc, tcl, tch in rows:
        print(f"{name:<8} {count:>10} {tc:>13.3f}s {tcl:>11.3f}s {tch:>11.3f}s")

    if len(results) == 2:
        a, b = results["numpy"], results["numba"]
        assert a[0] == b[0], "count mismatch between backends"
        assert (a[1] == b[1]).all() and (a[2] == b[2]).all()
        print("\nbackends agree on all outputs")


if __name__ == "__main__":
    main()
