#!/usr/bin/env python3
"""Time the compiled kernels against the NumPy fallback.

Runs each of the three hot kernels on representative problem sizes with
both backends and prints a table of median wall times plus the speedup.
The two implementations are imported directly, so this works no matter
which backend the installed package selected.

Usage:
    python3 benchmarks/bench_kernels.py [--repeats N] [--scale small|full]
"""

from __future__ import annotations

import argparse
import statistics
import time

import numpy as np

from relfilter.kernels import _numpy_impl

try:
    from relfilter.kernels import _native
except ImportError:
    _native = None


def _unit_rows(rng, n, dim):
    m = rng.normal(size=(n, dim))
    return m / np.linalg.norm(m, axis=1, keepdims=True)


def time_call(fn, repeats):
    fn()  # warm up so first-call overhead stays out of the numbers
    samples = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - start)
    return statistics.median(samples)


def bench_kde(impl, rng, n, m, dim, repeats):
    x = _unit_rows(rng, n, dim)
    q = _unit_rows(rng, m, dim)
    return time_call(lambda: impl.kde_scores(x, q, 5.0), repeats)


def bench_svm(impl, rng, n, dim, repeats):
    x = np.hstack([_unit_rows(rng, n, dim), np.ones((n, 1))])
    y = np.where(rng.integers(0, 2, size=n) == 1, 1.0, -1.0)
    qii = (x * x).sum(axis=1)
    order = np.arange(n, dtype=np.intp)

    def run():
        alpha = np.zeros(n)
        w = np.zeros(dim + 1)
        for _ in range(5):
            impl.svm_epoch(x, y, alpha, w, 1.0, qii, order)

    return time_call(run, repeats)


def bench_cosine(impl, rng, n, dim, repeats):
    x = _unit_rows(rng, n, dim)
    return time_call(lambda: impl.cosine_pairs(x, 0.95), repeats)


SCALES = {
    "small": {"kde": (2000, 50, 256), "svm": (1000, 128), "cosine": (600, 256)},
    "full": {"kde": (20000, 100, 512), "svm": (5000, 512), "cosine": (3000, 512)},
}


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--scale", choices=sorted(SCALES), default="small")
    args = parser.parse_args()

    if _native is None:
        print("compiled extension not importable; showing NumPy only")
    sizes = SCALES[args.scale]
    rng = np.random.default_rng(0)

    rows = []
    kde_n, kde_m, kde_d = sizes["kde"]
    svm_n, svm_d = sizes["svm"]
    cos_n, cos_d = sizes["cosine"]
    cases = [
        (f"kde_scores {kde_n}x{kde_d}, {kde_m} queries",
         lambda impl: bench_kde(impl, rng, kde_n, kde_m, kde_d, args.repeats)),
        (f"svm_epoch x5 {svm_n}x{svm_d}",
         lambda impl: bench_svm(impl, rng, svm_n, svm_d, args.repeats)),
        (f"cosine_pairs {cos_n}x{cos_d}",
         lambda impl: bench_cosine(impl, rng, cos_n, cos_d, args.repeats)),
    ]
    for label, runner in cases:
        numpy_t = runner(_numpy_impl)
        native_t = runner(_native) if _native is not None else None
        rows.append((label, numpy_t, native_t))

    width = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{width}}  {'numpy':>10}  {'native':>10}  {'speedup':>8}")
    for label, numpy_t, native_t in rows:
        if native_t is None:
            print(f"{label:<{width}}  {numpy_t * 1e3:>8.2f}ms  {'-':>10}  {'-':>8}")
        else:
            print(f"{label:<{width}}  {numpy_t * 1e3:>8.2f}ms  "
                  f"{native_t * 1e3:>8.2f}ms  {numpy_t / native_t:>7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
