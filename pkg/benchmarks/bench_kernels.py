#!/usr/bin/env python3
"""Timing comparison of the compiled and pure-numpy kernel backends.

Both backends are imported directly (bypassing the ELASTARM_KERNELS
selection) and driven with identical random inputs, so the printed
ratios reflect the kernels alone.  Agreement between the two backends
is asserted before timing.

Run from the repository root:

    python3 benchmarks/bench_kernels.py [--samples N] [--repeats R]
"""

import argparse
import importlib
import time

import numpy as np

from elastarm._kernels import _pure


def _load_native():
    try:
        return importlib.import_module("elastarm._kernels._native")
    except ImportError:
        return None


def _inputs(m, rng):
    offsets = np.array([[0.0, 0.0, 0.675], [0.35, 0.0, 0.0],
                        [0.0, 0.0, 1.35], [0.25, 0.0, 0.0],
                        [1.05, 0.0, 0.0], [0.17, 0.0, 0.0]])
    axes = np.array([[0.0, 0.0, 1.0], [0.0, 1.0, 0.0], [0.0, 1.0, 0.0],
                     [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 0.0, 0.0]])
    tool = np.array([0.12, 0.0, -0.08])
    base = 1.0 / np.array([3.774e-6, 0.302e-6, 0.406e-6,
                           3.002e-6, 3.303e-6, 2.365e-6])
    comp = (np.array([1], dtype=np.intp),            # joint (0-based)
            np.array([1.0 / 0.144e-6]),              # spring stiffness N/m
            np.array([np.hypot(0.68593, 0.12030)]),  # anchor distance
            np.array([0.18472]),                     # lever length
            np.array([0.458]),                       # free length
            np.array([np.arctan2(0.12030, 0.68593)]))  # anchor angle
    Q = rng.uniform(-np.pi, np.pi, (m, 6))
    W = np.concatenate([rng.uniform(-500, 500, (m, 3)),
                        rng.uniform(-200, 200, (m, 3))], axis=1)
    return offsets, axes, tool, base, comp, Q, W


def _time(fn, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=2000,
                    help="batch size for the batched kernels (default 2000)")
    ap.add_argument("--repeats", type=int, default=5,
                    help="timing repeats, best-of (default 5)")
    args = ap.parse_args()

    native = _load_native()
    if native is None:
        print("compiled backend not built; nothing to compare")
        return 1

    rng = np.random.default_rng(0)
    offsets, axes, tool, base, comp, Q, W = _inputs(args.samples, rng)

    d_pure = _pure.deflection_batch(offsets, axes, tool, Q, W, base, *comp)
    d_nat = native.deflection_batch(offsets, axes, tool, Q, W, base, *comp)
    assert np.allclose(d_pure, d_nat, rtol=1e-12, atol=1e-15), \
        "backends disagree"

    rows = []
    for name, call in [
        ("fk_pose (x%d)" % args.samples,
         lambda mod: [mod.fk_pose(offsets, axes, tool, q) for q in Q]),
        ("fk_jacobian (x%d)" % args.samples,
         lambda mod: [mod.fk_jacobian(offsets, axes, tool, q) for q in Q]),
        ("stiffness_diagonal_batch",
         lambda mod: mod.stiffness_diagonal_batch(Q, base, *comp)),
        ("deflection_batch",
         lambda mod: mod.deflection_batch(offsets, axes, tool, Q, W,
                                          base, *comp)),
    ]:
        tp = _time(lambda: call(_pure), args.repeats)
        tn = _time(lambda: call(native), args.repeats)
        rows.append((name, tp, tn, tp / tn))

    width = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{width}}  {'python':>10}  {'native':>10}  {'speedup':>8}")
    for name, tp, tn, ratio in rows:
        print(f"{name:<{width}}  {tp * 1e3:>8.2f}ms  {tn * 1e3:>8.2f}ms  "
              f"{ratio:>7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
