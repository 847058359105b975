"""Time the compiled and numpy kernels on the workloads the harness runs.

    python3 benchmarks/bench_kernels.py [--sizes 50 100 200] [--repeat 5]
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from panelroot import _backend
from panelroot.dgp import sinusoidal_ar_profile


def _eigen_case(size: int, rng: np.random.Generator) -> np.ndarray:
    X = np.cumsum(rng.standard_normal((size, 2 * size)), axis=1)
    return np.corrcoef(X)


def bench(sizes, repeat: int, seed: int) -> list[tuple[str, str, float]]:
    rng = np.random.default_rng(seed)
    rows = []
    for size in sizes:
        A = _eigen_case(size, rng)
        for name, impl in _backend.IMPLEMENTATIONS.items():
            t = min(timeit.repeat(lambda: impl.jacobi_eigh(A, False, 100, 1e-14), number=1, repeat=repeat))
            rows.append((f"jacobi_eigh {size}x{size}", name, t))
    n, T = 100, 1100
    x = rng.standard_normal((n, T))
    coef, zeros = sinusoidal_ar_profile(n), np.zeros(n)
    for name, impl in _backend.IMPLEMENTATIONS.items():
        t = min(timeit.repeat(lambda: impl.first_order_recursion(coef, zeros, zeros, x), number=1, repeat=repeat))
        rows.append((f"first_order_recursion {n}x{T}", name, t))
    return rows


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[50, 100, 200])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)
    if "compiled" not in _backend.IMPLEMENTATIONS:
        print("compiled kernels not built; timing the numpy fallback only")
    rows = bench(args.sizes, args.repeat, args.seed)
    best = {}
    for case, name, t in rows:
        best.setdefault(case, {})[name] = t
    print(f"{'kernel':<32s} {'backend':<9s} {'best (ms)':>10s} {'speed-up':>9s}")
    for case, name, t in rows:
        ratio = best[case]["python"] / t
        print(f"{case:<32s} {name:<9s} {1e3 * t:10.2f} {ratio:8.1f}x")


if __name__ == "__main__":
    main()
