"""Compare the compiled and pure-Python kernels.

    python benchmarks/bench_kernels.py [--repeat N]

Workloads are the shapes the library actually produces: exact ranks of
integer flattenings, and minor residuals of H_F(p) inside the multistart
solver.
"""

import argparse
import random
import timeit

import numpy as np

from cupform import _pykernels

try:
    from cupform import _ckernels
except ImportError:
    _ckernels = None


def rank_workload(seed=0):
    rng = random.Random(seed)
    mats = []
    for nr, nc in [(5, 25), (6, 36), (8, 64), (10, 30)]:
        # rank-deficient on purpose: half the rows are combinations of the rest
        base = [[rng.randint(-10**6, 10**6) for _ in range(nc)] for _ in range(nr // 2)]
        extra = [[sum(rng.randint(-3, 3) * r[j] for r in base) for j in range(nc)] for _ in range(nr - nr // 2)]
        mats.append(base + extra)
    return mats


def minor_workload(seed=0):
    rng = np.random.default_rng(seed)
    return [(rng.standard_normal((k, k, nc)), rng.standard_normal(k)) for k, nc in [(3, 6), (5, 15), (5, 35), (8, 36)]]


def bench(mod, repeat):
    mats = rank_workload()
    mins = minor_workload()
    t_rank = min(timeit.repeat(lambda: [mod.bareiss_rank(m) for m in mats], number=20, repeat=repeat)) / 20
    t_min = min(timeit.repeat(lambda: [mod.minor_residuals(c, p, True) for c, p in mins], number=200, repeat=repeat)) / 200
    return t_rank, t_min


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    py = bench(_pykernels, args.repeat)
    print(f"{'kernel':<18}{'python':>12}{'cython':>12}{'speedup':>10}")
    if _ckernels is None:
        print("compiled extension not built; python timings only")
    cy = bench(_ckernels, args.repeat) if _ckernels else (float("nan"),) * 2
    for name, a, b in zip(("bareiss_rank", "minor_residuals"), py, cy):
        print(f"{name:<18}{a * 1e3:>10.3f}ms{b * 1e3:>10.3f}ms{a / b:>9.1f}x")
    # both must agree before timings mean anything
    if _ckernels:
        assert [_ckernels.bareiss_rank(m) for m in rank_workload()] == [_pykernels.bareiss_rank(m) for m in rank_workload()]


if __name__ == "__main__":
    main()
