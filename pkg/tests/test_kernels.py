import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from asymptote import _kernels_py, kernels

compiled = pytest.importorskip("asymptote._kernels")


def order(i, j, a, b):
    k = np.lexsort((j, i))
    return i[k], j[k], a[k], b[k]


def brute_intersections(P, Q, same):
    """O(n m) segment test, independent of the grid bucketing."""
    n, m = len(P), len(Q)
    p0, p1 = P, np.roll(P, -1, axis=0)
    q0, q1 = Q, np.roll(Q, -1, axis=0)
    r = (p1 - p0)[:, None, :]
    s = (q1 - q0)[None, :, :]
    d = q0[None, :, :] - p0[:, None, :]
    den = r[..., 0] * s[..., 1] - r[..., 1] * s[..., 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        a = (d[..., 0] * s[..., 1] - d[..., 1] * s[..., 0]) / den
        b = (d[..., 0] * r[..., 1] - d[..., 1] * r[..., 0]) / den
    hit = (a >= 0) & (a < 1) & (b >= 0) & (b < 1) & (den != 0)
    if same:
        ii, jj = np.meshgrid(np.arange(n), np.arange(m), indexing="ij")
        gap = np.abs(ii - jj)
        hit &= (ii < jj) & (np.minimum(gap, n - gap) > 1)
    return np.nonzero(hit)


def test_backend_selected():
    assert kernels.backend() == "cython"


@settings(max_examples=15)
@given(st.integers(0, 2**31 - 1), st.integers(16, 200))
def test_segment_intersections_parity(seed, n):
    rng = np.random.default_rng(seed)
    t = np.linspace(0, 2 * np.pi, n, endpoint=False)
    P = np.stack([np.cos(2 * t) + 0.3 * rng.normal(size=n), np.sin(3 * t) + 0.3 * rng.normal(size=n)], 1)
    a = order(*compiled.segment_intersections(P, P, True))
    b = order(*_kernels_py.segment_intersections(P, P, True))
    for x, y in zip(a, b):
        np.testing.assert_allclose(x, y, atol=1e-12)
    i, j = brute_intersections(P, P, True)
    assert len(i) == len(a[0])


def test_gauss_sum_parity():
    rng = np.random.default_rng(0)
    n, m = 64, 48
    a, da = rng.normal(size=(2, n, 3))
    b, db = rng.normal(size=(2, n, m, 3))
    w = rng.uniform(size=m)
    x = compiled.gauss_sum(a, da, b, db, w)
    y = _kernels_py.gauss_sum(a, da, b, db, w)
    assert x == pytest.approx(y, rel=1e-10)


def test_starshaped_scan_parity():
    rng = np.random.default_rng(1)
    c, dx, dy = rng.normal(size=(3, 300))
    px, py = rng.normal(size=(2, 50))
    np.testing.assert_allclose(compiled.starshaped_scan(c, dx, dy, px, py),
                               _kernels_py.starshaped_scan(c, dx, dy, px, py), atol=1e-13)


def test_pure_python_fallback_env():
    env = dict(os.environ, ASYMPTOTE_PURE_PYTHON="1")
    code = ("from asymptote import kernels, curves, projection as pj;"
            "print(kernels.backend(), pj.crossing_number(pj.project(curves.torus_knot(), [0, 0, 1])))")
    res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert res.stdout.split() == ["python", "3"]
