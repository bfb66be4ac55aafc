# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled versions of the loops in ``_kernels_py``; same signatures."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, floor

cnp.import_array()

from asymptote._kernels_py import _grid_params


cdef inline long _cell(double v, double lo, double h, long g) nogil:
    cdef long c = <long>floor((v - lo) / h)
    if c < 0:
        return 0
    if c >= g:
        return g - 1
    return c


def segment_intersections(P, Q, bint same):
    cdef double[:, ::1] p = np.ascontiguousarray(P, dtype=np.float64)
    cdef double[:, ::1] q = np.ascontiguousarray(Q, dtype=np.float64)
    lo, hx_, hy_, gx_, gy_ = _grid_params(np.asarray(p), np.asarray(q))
    cdef double lox = lo[0], loy = lo[1], hx = hx_, hy = hy_
    cdef long gx = gx_, gy = gy_
    cdef long n = p.shape[0], m = q.shape[0]
    cdef long ncell = gx * gy
    cdef long[::1] head = np.zeros(ncell + 1, dtype=np.int64)
    cdef long k, jj, cx, cy, x0, x1, y0, y1, c, e, idx
    cdef double ax, ay, bx, by

    # counting sort of Q segments into cells
    for k in range(m):
        ax = q[k, 0]; ay = q[k, 1]
        bx = q[(k + 1) % m, 0]; by = q[(k + 1) % m, 1]
        x0 = _cell(min(ax, bx), lox, hx, gx); x1 = _cell(max(ax, bx), lox, hx, gx)
        y0 = _cell(min(ay, by), loy, hy, gy); y1 = _cell(max(ay, by), loy, hy, gy)
        for cy in range(y0, y1 + 1):
            for cx in range(x0, x1 + 1):
                head[cy * gx + cx + 1] += 1
    for c in range(ncell):
        head[c + 1] += head[c]
    cdef long[::1] fill = np.array(head[:ncell], dtype=np.int64)
    cdef long[::1] items = np.empty(head[ncell], dtype=np.int64)
    for k in range(m):
        ax = q[k, 0]; ay = q[k, 1]
        bx = q[(k + 1) % m, 0]; by = q[(k + 1) % m, 1]
        x0 = _cell(min(ax, bx), lox, hx, gx); x1 = _cell(max(ax, bx), lox, hx, gx)
        y0 = _cell(min(ay, by), loy, hy, gy); y1 = _cell(max(ay, by), loy, hy, gy)
        for cy in range(y0, y1 + 1):
            for cx in range(x0, x1 + 1):
                c = cy * gx + cx
                items[fill[c]] = k
                fill[c] += 1

    out_i = []
    out_j = []
    out_a = []
    out_b = []
    cdef double d1x, d1y, d2x, d2y, den, rx, ry, a, b, px, py
    for k in range(n):
        ax = p[k, 0]; ay = p[k, 1]
        bx = p[(k + 1) % n, 0]; by = p[(k + 1) % n, 1]
        d1x = bx - ax; d1y = by - ay
        x0 = _cell(min(ax, bx), lox, hx, gx); x1 = _cell(max(ax, bx), lox, hx, gx)
        y0 = _cell(min(ay, by), loy, hy, gy); y1 = _cell(max(ay, by), loy, hy, gy)
        for cy in range(y0, y1 + 1):
            for cx in range(x0, x1 + 1):
                c = cy * gx + cx
                for e in range(head[c], head[c + 1]):
                    jj = items[e]
                    if same:
                        if jj <= k + 1 or (k == 0 and jj == n - 1):
                            continue
                    d2x = q[(jj + 1) % m, 0] - q[jj, 0]
                    d2y = q[(jj + 1) % m, 1] - q[jj, 1]
                    den = d1x * d2y - d1y * d2x
                    if den == 0.0:
                        continue
                    rx = q[jj, 0] - ax
                    ry = q[jj, 1] - ay
                    a = (rx * d2y - ry * d2x) / den
                    if a < 0.0 or a >= 1.0:
                        continue
                    b = (rx * d1y - ry * d1x) / den
                    if b < 0.0 or b >= 1.0:
                        continue
                    px = ax + a * d1x
                    py = ay + a * d1y
                    if _cell(py, loy, hy, gy) * gx + _cell(px, lox, hx, gx) != c:
                        continue
                    out_i.append(k)
                    out_j.append(jj)
                    out_a.append(a)
                    out_b.append(b)
    i = np.array(out_i, dtype=np.int64)
    j = np.array(out_j, dtype=np.int64)
    fa = np.array(out_a, dtype=np.float64)
    fb = np.array(out_b, dtype=np.float64)
    order = np.lexsort((j, i))
    return i[order], j[order], fa[order], fb[order]


def gauss_sum(a, da, b, db, w):
    cdef double[:, ::1] A = np.ascontiguousarray(a, dtype=np.float64)
    cdef double[:, ::1] DA = np.ascontiguousarray(da, dtype=np.float64)
    cdef double[:, :, ::1] B = np.ascontiguousarray(b, dtype=np.float64)
    cdef double[:, :, ::1] DB = np.ascontiguousarray(db, dtype=np.float64)
    cdef double[::1] W = np.ascontiguousarray(w, dtype=np.float64)
    cdef Py_ssize_t ns = A.shape[0], nx = B.shape[1], i, j
    cdef double total = 0.0, row, rx, ry, rz, cx, cy, cz, d2
    with nogil:
        for i in range(ns):
            row = 0.0
            for j in range(nx):
                rx = A[i, 0] - B[i, j, 0]
                ry = A[i, 1] - B[i, j, 1]
                rz = A[i, 2] - B[i, j, 2]
                d2 = rx * rx + ry * ry + rz * rz
                if d2 == 0.0:
                    continue
                cx = DA[i, 1] * DB[i, j, 2] - DA[i, 2] * DB[i, j, 1]
                cy = DA[i, 2] * DB[i, j, 0] - DA[i, 0] * DB[i, j, 2]
                cz = DA[i, 0] * DB[i, j, 1] - DA[i, 1] * DB[i, j, 0]
                row += W[j] * (cx * rx + cy * ry + cz * rz) / (d2 * sqrt(d2))
            total += row
    return total


def starshaped_scan(c, dx, dy, px, py):
    cdef double[::1] C = np.ascontiguousarray(c, dtype=np.float64)
    cdef double[::1] DX = np.ascontiguousarray(dx, dtype=np.float64)
    cdef double[::1] DY = np.ascontiguousarray(dy, dtype=np.float64)
    cdef double[::1] PX = np.ascontiguousarray(px, dtype=np.float64)
    cdef double[::1] PY = np.ascontiguousarray(py, dtype=np.float64)
    out_np = np.empty(PX.shape[0])
    cdef double[::1] out = out_np
    cdef Py_ssize_t k, t, nt = C.shape[0]
    cdef double s, g, lo
    with nogil:
        for k in range(PX.shape[0]):
            g = C[0] - PX[k] * DY[0] + PY[k] * DX[0]
            s = 1.0 if g >= 0 else -1.0
            lo = s * g
            for t in range(1, nt):
                g = s * (C[t] - PX[k] * DY[t] + PY[k] * DX[t])
                if g < lo:
                    lo = g
            out[k] = lo
    return out_np
