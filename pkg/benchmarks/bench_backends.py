#!/usr/bin/env python3
"""Compare the compiled kernel against the pure-Python twin on the two hot
paths: exhaustive subset classification and heat-bath chain stepping.

Usage: python benchmarks/bench_backends.py [--quick]
"""

import argparse
import time

import numpy as np

from pottsforge.backend import get_backend
from pottsforge.rationals import bernoulli_threshold, to_rat


def complete_graph_arrays(n):
    eu, ev = [], []
    for i in range(n):
        for j in range(i + 1, n):
            eu.append(i)
            ev.append(j)
    return eu, ev


def bench_counts(backend, n, extra_terminals):
    eu, ev = complete_graph_arrays(n)
    eu += [0] * extra_terminals
    ev += [n + k for k in range(extra_terminals)]
    wclass = [0] * (len(eu) - extra_terminals) + [1] * extra_terminals
    term = [False] * n + [True] * extra_terminals
    t0 = time.time()
    counts = backend.subset_class_counts(n + extra_terminals, eu, ev, wclass,
                                         2, term)
    dt = time.time() - t0
    leaves = 2 ** len(eu)
    return dt, leaves, int(counts.sum())


def bench_chain(backend, n, sweeps, q, lam):
    eu, ev = complete_graph_arrays(n)
    m = len(eu)
    p = to_rat(lam) / n
    q = to_rat(q)
    p_cond = p / (p + q * (1 - p))
    thr_s = np.zeros(m, dtype=np.uint64)
    thr_d = np.zeros(m, dtype=np.uint64)
    f_s, f_d = [], []
    a, fa = bernoulli_threshold(p)
    b, fb = bernoulli_threshold(p_cond)
    for _ in range(m):
        thr_s_val, thr_d_val = a, b
        f_s.append(fa)
        f_d.append(fb)
    thr_s[:] = a
    thr_d[:] = b
    steps = sweeps * m
    t0 = time.time()
    backend.hb_run(n, eu, ev, [0] * m, list(range(m)),
                   thr_s, f_s, thr_d, f_d, True, steps, 12345, 0, 0, 0)
    dt = time.time() - t0
    return dt, steps


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--quick", action="store_true",
                    help="smaller sizes (pure backend stays affordable)")
    args = ap.parse_args()

    backends = {"python": get_backend("python")}
    try:
        backends["cython"] = get_backend("cython")
    except ImportError:
        print("compiled backend not built; benchmarking pure Python only")

    count_n = 4 if args.quick else 6
    count_t = 2 if args.quick else 3
    chain_n = 30 if args.quick else 60
    chain_sweeps = 20 if args.quick else 60

    print(f"subset census: K_{count_n} plus {count_t} pendant terminal edges")
    base = None
    for name, backend in backends.items():
        dt, leaves, total = bench_counts(backend, count_n, count_t)
        assert total == leaves
        rate = leaves / dt / 1e6
        line = f"  {name:7s} {dt:8.3f}s  {rate:9.2f} M leaves/s"
        if name == "python":
            base = dt
        elif base:
            line += f"  ({base / dt:5.1f}x speedup)"
        print(line)

    print(f"heat-bath chain: RC(K_{chain_n}; q=3, lambda=2.5), "
          f"{chain_sweeps} sweeps")
    base = None
    for name, backend in backends.items():
        dt, steps = bench_chain(backend, chain_n, chain_sweeps, 3, "5/2")
        rate = steps / dt / 1e6
        line = f"  {name:7s} {dt:8.3f}s  {rate:9.2f} M steps/s"
        if name == "python":
            base = dt
        elif base:
            line += f"  ({base / dt:5.1f}x speedup)"
        print(line)


if __name__ == "__main__":
    main()
