"""Compare the compiled kernels against the pure numpy/scipy fallback.

Run:  python3 benchmarks/bench_kernels.py
The two backends are bit-identical by contract (enforced in the test
suite); this script measures how much the compiled path buys.
"""

import importlib
import os
import sys
import time

import numpy as np


def load_backend(pure: bool):
    os.environ["SATFORGE_PURE_PYTHON"] = "1" if pure else ""
    for name in [m for m in list(sys.modules) if m.startswith("satforge")]:
        del sys.modules[name]
    kernels = importlib.import_module("satforge.kernels")
    return kernels


def timeit(fn, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def make_inputs(size=1024, seed=0):
    rng = np.random.default_rng(seed)
    gx = rng.normal(size=(size, size))
    gy = rng.normal(size=(size, size))
    mag = np.hypot(gx, gy) * 60
    strong = (rng.random((size, size)) < 0.02).astype(np.uint8)
    weak = np.clip(strong + (rng.random((size, size)) < 0.05), 0, 1).astype(np.uint8)
    n = 64
    theta = np.linspace(0, 2 * np.pi, n, endpoint=False)
    xs = size / 2 + (size / 3) * np.cos(theta) * rng.uniform(0.5, 1.0, n)
    ys = size / 2 + (size / 3) * np.sin(theta) * rng.uniform(0.5, 1.0, n)
    return mag, gx, gy, strong, weak, xs, ys


def main():
    size = 1024
    mag, gx, gy, strong, weak, xs, ys = make_inputs(size)
    rows = []
    results = {}
    for pure in (False, True):
        k = load_backend(pure)
        label = k.BACKEND
        t_nms = timeit(lambda: k.nonmax_suppress(mag, gx, gy))
        t_hys = timeit(lambda: k.hysteresis(strong, weak))
        t_poly = timeit(lambda: k.rasterize_polygon(xs, ys, size, size))
        rows.append((label, t_nms, t_hys, t_poly))
        results[label] = (
            k.nonmax_suppress(mag, gx, gy),
            k.hysteresis(strong, weak),
            k.rasterize_polygon(xs, ys, size, size),
        )

    print(f"\nkernel timings on {size}x{size} inputs (best of 5, seconds)")
    print(f"{'backend':<10} {'nms':>10} {'hysteresis':>12} {'polygon':>10}")
    for label, t_nms, t_hys, t_poly in rows:
        print(f"{label:<10} {t_nms:>10.4f} {t_hys:>12.4f} {t_poly:>10.4f}")

    if len(results) == 2:
        a, b = results.values()
        identical = all(np.array_equal(x, y) for x, y in zip(a, b))
        print(f"\nbackends bit-identical: {identical}")
        (n0, t0a, t0b, t0c), (n1, t1a, t1b, t1c) = rows
        print(f"speedup ({n0} over {n1}): nms {t1a / t0a:.1f}x, "
              f"hysteresis {t1b / t0b:.1f}x, polygon {t1c / t0c:.1f}x")


if __name__ == "__main__":
    main()
