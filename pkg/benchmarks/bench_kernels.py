#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-numpy implementations.

Times the two hot loops (pairwise cosine-distance blocks and the t-SNE
iteration) at a few sizes and prints a comparison table. The numbers motivate
the backend split: the fused compiled pass wins for the t-SNE step, while the
BLAS matrix product behind the numpy cosine_block beats a compiled elementwise
loop, so production cosine blocks stay on BLAS. Run after building the
extension:

    python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from semshift import _kernels_py

try:
    from semshift import _kernels
except ImportError:
    _kernels = None


def _timeit(fn, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def _normalized(rng, n, dim):
    rows = rng.normal(size=(n, dim))
    return np.ascontiguousarray(rows / np.linalg.norm(rows, axis=1, keepdims=True))


def bench_cosine(rng):
    print(f"{'cosine_block':<24} {'shape':<22} {'numpy':>10} {'compiled':>10} {'speedup':>8}")
    for m, n, dim in ((256, 256, 768), (512, 1024, 768), (1024, 1024, 256)):
        u = _normalized(rng, m, dim)
        v = _normalized(rng, n, dim)
        t_py = _timeit(lambda: _kernels_py.cosine_block(u, v))
        if _kernels is None:
            print(f"{'':<24} {f'{m}x{n} d={dim}':<22} {t_py * 1e3:>8.1f}ms {'n/a':>10}")
            continue
        t_c = _timeit(lambda: _kernels.cosine_block(u, v))
        close = np.abs(_kernels.cosine_block(u, v) - _kernels_py.cosine_block(u, v)).max()
        assert close < 1e-10, close
        print(
            f"{'':<24} {f'{m}x{n} d={dim}':<22} {t_py * 1e3:>8.1f}ms {t_c * 1e3:>8.1f}ms"
            f" {t_py / t_c:>7.2f}x"
        )


def bench_tsne_step(rng):
    print(f"{'tsne_step':<24} {'points':<22} {'numpy':>10} {'compiled':>10} {'speedup':>8}")
    for n in (500, 1000, 2000):
        y = np.ascontiguousarray(rng.normal(size=(n, 2)))
        p = np.abs(rng.normal(size=(n, n)))
        p = (p + p.T) / 2.0
        np.fill_diagonal(p, 0.0)
        p = np.ascontiguousarray(p / p.sum())
        t_py = _timeit(lambda: _kernels_py.tsne_step(y, p, p))
        if _kernels is None:
            print(f"{'':<24} {n:<22} {t_py * 1e3:>8.1f}ms {'n/a':>10}")
            continue
        t_c = _timeit(lambda: _kernels.tsne_step(y, p, p))
        g_c, kl_c = _kernels.tsne_step(y, p, p)
        g_p, kl_p = _kernels_py.tsne_step(y, p, p)
        assert np.abs(g_c - g_p).max() < 1e-10 and abs(kl_c - kl_p) < 1e-10
        print(
            f"{'':<24} {n:<22} {t_py * 1e3:>8.1f}ms {t_c * 1e3:>8.1f}ms {t_py / t_c:>7.2f}x"
        )


def main():
    if _kernels is None:
        print("compiled kernels unavailable; timing the numpy fallback only\n")
    rng = np.random.default_rng(0)
    bench_cosine(rng)
    print()
    bench_tsne_step(rng)


if __name__ == "__main__":
    main()
