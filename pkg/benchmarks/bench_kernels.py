"""Compiled versus numpy kernels on realistic inputs.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Prints the best-of-N wall time per kernel and backend, plus the largest
output difference between the two.
"""

import argparse
import time

import numpy as np

from asymptote import _kernels_py, curves
from asymptote.projection import project

try:
    from asymptote import _kernels
except ImportError:  # pragma: no cover
    _kernels = None


def best_of(fn, repeat):
    best, out = np.inf, None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def cases():
    kov = curves.kovaleva()
    P = project(kov, [0.3, -0.2, 0.93]).grid(16384, 0)[0]
    yield "segment_intersections (Kovaleva, 16384 seg)", "segment_intersections", (P, P, True)

    torus = curves.spectral_proxy(curves.torus_knot())
    n = 512
    xi = np.linspace(0, 2 * np.pi, n, endpoint=False)
    a, da = torus.grid(n, 1)
    b, db = torus.shifted_grid(n, xi - np.sin(xi), 1)
    w = (1 - np.cos(xi)) * (2 * np.pi / n)
    b, db = (np.ascontiguousarray(x.transpose(1, 0, 2)) for x in (b, db))
    yield "gauss_sum (torus knot, 512 x 512)", "gauss_sum", (a, da, b, db, w)

    pr = project(torus, [0, 0, 1])
    Q, D = pr.grid(4096, 1)
    c = Q[:, 0] * D[:, 1] - Q[:, 1] * D[:, 0]
    g = np.linspace(-4, 4, 64)
    gx, gy = (x.ravel() for x in np.meshgrid(g, g))
    yield "starshaped_scan (4096 tangents, 64^2 points)", "starshaped_scan", (c, D[:, 0], D[:, 1], gx, gy)


def diff(x, y):
    if isinstance(x, tuple):
        return max(diff(a, b) for a, b in zip(x, y))
    return float(np.max(np.abs(np.asarray(x, dtype=float) - np.asarray(y, dtype=float)), initial=0.0))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"{'kernel':48s} {'numpy [s]':>10s} {'cython [s]':>11s} {'speedup':>8s} {'max diff':>9s}")
    for label, name, argv in cases():
        t_py, out_py = best_of(lambda: getattr(_kernels_py, name)(*argv), args.repeat)
        if _kernels is None:
            print(f"{label:48s} {t_py:10.4f} {'n/a':>11s}")
            continue
        t_cy, out_cy = best_of(lambda: getattr(_kernels, name)(*argv), args.repeat)
        print(f"{label:48s} {t_py:10.4f} {t_cy:11.4f} {t_py / t_cy:8.1f} {diff(out_py, out_cy):9.1e}")


if __name__ == "__main__":
    main()
