"""Compiled vs pure-Python kernels on the three hot paths.

    python benchmarks/bench_kernels.py [--repeat 3]
"""
import argparse
import math
import time

import numpy as np

from speclab import fuchsian as fu, kernels
from speclab.covers import sample_homs


def _best(fn, repeat):
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cases(group):
    g2 = group.ngen
    gens = np.ascontiguousarray(group.letter_matrices, dtype=float)
    T, R = 7.0, group.circumradius
    ball = (gens, group.succ_f, group.succ_b, g2, 2 * math.cosh(T / 2), math.cosh(T + 2 * R),
            10**9, bytes(range(2 * g2)))
    rng = np.random.default_rng(0)
    words = [bytes(rng.integers(0, 8, 14)) for _ in range(60)]
    perms = sample_homs(group, 10, 2000, seed=0)
    fp_words = [fu.encode(w) for w in ("a", "ab", "abC", "aDcB", "abcdAB")]
    return {
        "enumerate_ball T=7": lambda k: k.enumerate_ball(*ball),
        "cyclic_canonical x60": lambda k: [k.cyclic_canonical(w, group.succ_f, group.succ_b, g2) for w in words],
        "fixed_point_counts 2000x5": lambda k: k.fixed_point_counts(perms, fp_words, 3),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    group = fu.build_genus2_octagon()
    py = kernels.backend("python")
    cy = kernels.backend("cython") if kernels.compiled_available() else None
    print(f"{'kernel':28s} {'python [s]':>11s} {'cython [s]':>11s} {'speedup':>8s}")
    for name, fn in cases(group).items():
        tp = _best(lambda: fn(py), args.repeat)
        if cy is None:
            print(f"{name:28s} {tp:11.4f} {'n/a':>11s}")
            continue
        tc = _best(lambda: fn(cy), args.repeat)
        print(f"{name:28s} {tp:11.4f} {tc:11.4f} {tp / tc:8.1f}")


if __name__ == "__main__":
    main()
