"""Benchmark the compiled integrator kernels against the NumPy fallback.

Run with ``python -m reldiff.bench``.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from .simulate.kernels import COMPILED, _fallback


def _load_compiled():
    if not COMPILED:
        return None
    from .simulate.kernels import _core  # type: ignore[attr-defined]

    return _core


def _time(fn, repeats: int = 3) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _cases(n_samples: int, n_nodes: int):
    rng = np.random.default_rng(0)
    w = (rng.random((n_nodes, n_nodes)) < 0.5).astype(np.float64)
    w = np.triu(w, 1)
    w = w + w.T
    deg = w.sum(1)
    coef = np.where(deg > 0, 1.0 / np.maximum(deg, 1), 0.0)
    theta0 = rng.uniform(0, 2 * np.pi, (n_samples, n_nodes))
    omega = rng.uniform(2, 10, (n_samples, n_nodes))
    pos0 = rng.normal(size=(n_samples, n_nodes, 2)) * 0.5
    vel0 = rng.normal(size=(n_samples, n_nodes, 2)) * 0.5
    y0 = rng.normal(size=(n_samples, 2, n_nodes))
    a = w * 0.2
    return {
        "kuramoto_rk4": lambda mod: mod.kuramoto_rk4(theta0, omega, w, coef, 0.05, 100),
        "spring_leapfrog": lambda mod: mod.spring_leapfrog(
            pos0, vel0, w, 0.1, 0.001, 49, 100
        ),
        "var_recursion": lambda mod: mod.var_recursion(y0, a, 2, 100),
    }


def run(n_samples: int = 200, n_nodes: int = 10) -> list[dict]:
    compiled = _load_compiled()
    rows = []
    for name, fn in _cases(n_samples, n_nodes).items():
        numpy_s = _time(lambda: fn(_fallback))
        row = {"kernel": name, "numpy_s": numpy_s}
        if compiled is not None:
            compiled_s = _time(lambda: fn(compiled))
            row["compiled_s"] = compiled_s
            row["speedup"] = numpy_s / compiled_s
            ref, got = fn(_fallback), fn(compiled)
            row["max_abs_diff"] = float(np.max(np.abs(ref - got)))
        rows.append(row)
    return rows


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--samples", type=int, default=200)
    parser.add_argument("--nodes", type=int, default=10)
    args = parser.parse_args()
    rows = run(args.samples, args.nodes)
    if not COMPILED:
        print("compiled backend unavailable; timing the NumPy fallback only")
    for row in rows:
        line = f"{row['kernel']:<16} numpy {row['numpy_s'] * 1e3:8.1f} ms"
        if "compiled_s" in row:
            line += (
                f"   compiled {row['compiled_s'] * 1e3:8.1f} ms"
                f"   speedup {row['speedup']:5.1f}x"
                f"   max|diff| {row['max_abs_diff']:.2e}"
            )
        print(line)


if __name__ == "__main__":
    main()
