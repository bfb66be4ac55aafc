"""Pure numpy versions of the hot loops.

These are the reference implementations; ``_kernels.pyx`` mirrors them
loop-for-loop. Both are selected through :mod:`asymptote.kernels`.
"""

import numpy as np


def _grid_params(P, Q):
    pts = np.concatenate([P, Q])
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    span = np.maximum(hi - lo, 1e-300)
    seg = np.concatenate(
        [np.linalg.norm(np.roll(P, -1, axis=0) - P, axis=1),
         np.linalg.norm(np.roll(Q, -1, axis=0) - Q, axis=1)]
    )
    n = len(P) + len(Q)
    h = max(float(np.sqrt(span[0] * span[1] / n)) * 2.0, float(seg.mean()), 1e-300)
    gx = min(int(span[0] / h) + 1, 4096)
    gy = min(int(span[1] / h) + 1, 4096)
    hx = span[0] / gx * (1 + 1e-12)
    hy = span[1] / gy * (1 + 1e-12)
    return lo, hx, hy, gx, gy


def _register(V, lo, hx, hy, gx, gy):
    A = V
    B = np.roll(V, -1, axis=0)
    x0 = np.clip(((np.minimum(A[:, 0], B[:, 0]) - lo[0]) / hx).astype(np.int64), 0, gx - 1)
    x1 = np.clip(((np.maximum(A[:, 0], B[:, 0]) - lo[0]) / hx).astype(np.int64), 0, gx - 1)
    y0 = np.clip(((np.minimum(A[:, 1], B[:, 1]) - lo[1]) / hy).astype(np.int64), 0, gy - 1)
    y1 = np.clip(((np.maximum(A[:, 1], B[:, 1]) - lo[1]) / hy).astype(np.int64), 0, gy - 1)
    nx = x1 - x0 + 1
    ny = y1 - y0 + 1
    count = nx * ny
    seg = np.repeat(np.arange(len(V)), count)
    k = np.arange(count.sum()) - np.repeat(np.cumsum(count) - count, count)
    cx = np.repeat(x0, count) + k % np.repeat(nx, count)
    cy = np.repeat(y0, count) + k // np.repeat(nx, count)
    return cy * gx + cx, seg


def segment_intersections(P, Q, same):
    """Intersections between the closed polylines ``P`` and ``Q``.

    Returns integer arrays ``i, j`` (segment indices) and the fractional
    positions ``a, b`` in ``[0, 1)`` along them. With ``same`` the polylines
    are identical and only pairs ``j > i + 1`` (cyclically non-adjacent) are
    reported.
    """
    P = np.ascontiguousarray(P, dtype=float)
    Q = np.ascontiguousarray(Q, dtype=float)
    lo, hx, hy, gx, gy = _grid_params(P, Q)
    pc, ps = _register(P, lo, hx, hy, gx, gy)
    qc, qs = _register(Q, lo, hx, hy, gx, gy)
    order = np.argsort(qc, kind="stable")
    qc = qc[order]
    qs = qs[order]
    start = np.searchsorted(qc, pc, side="left")
    stop = np.searchsorted(qc, pc, side="right")
    cnt = stop - start
    total = int(cnt.sum())
    empty = np.zeros(0, dtype=np.int64)
    if total == 0:
        return empty, empty, np.zeros(0), np.zeros(0)
    offs = np.arange(total) - np.repeat(np.cumsum(cnt) - cnt, cnt)
    i = np.repeat(ps, cnt)
    cell = np.repeat(pc, cnt)
    j = qs[np.repeat(start, cnt) + offs]
    if same:
        n = len(P)
        keep = (j > i + 1) & ~((i == 0) & (j == n - 1))
        i, j, cell = i[keep], j[keep], cell[keep]
    p0 = P[i]
    d1 = P[(i + 1) % len(P)] - p0
    q0 = Q[j]
    d2 = Q[(j + 1) % len(Q)] - q0
    den = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]
    r = q0 - p0
    with np.errstate(divide="ignore", invalid="ignore"):
        a = (r[:, 0] * d2[:, 1] - r[:, 1] * d2[:, 0]) / den
        b = (r[:, 0] * d1[:, 1] - r[:, 1] * d1[:, 0]) / den
    hit = (den != 0) & (a >= 0) & (a < 1) & (b >= 0) & (b < 1)
    i, j, a, b, cell = i[hit], j[hit], a[hit], b[hit], cell[hit]
    x = p0[hit] + a[:, None] * d1[hit]
    cx = np.clip(((x[:, 0] - lo[0]) / hx).astype(np.int64), 0, gx - 1)
    cy = np.clip(((x[:, 1] - lo[1]) / hy).astype(np.int64), 0, gy - 1)
    own = cy * gx + cx == cell
    i, j, a, b = i[own], j[own], a[own], b[own]
    order = np.lexsort((j, i))
    return i[order].astype(np.int64), j[order].astype(np.int64), a[order], b[order]


def gauss_sum(a, da, b, db, w):
    """Weighted sum of the Gauss linking integrand.

    ``a, da`` have shape (Ns, 3); ``b, db`` have shape (Ns, Nx, 3); ``w`` has
    shape (Nx,). Coincident points contribute zero.
    """
    total = 0.0
    ns = a.shape[0]
    step = max(1, 2_000_000 // max(1, b.shape[1]))
    for lo in range(0, ns, step):
        hi = min(ns, lo + step)
        r = a[lo:hi, None, :] - b[lo:hi]
        cr = np.cross(da[lo:hi, None, :], db[lo:hi])
        num = np.einsum("ijk,ijk->ij", cr, r)
        d2 = np.einsum("ijk,ijk->ij", r, r)
        with np.errstate(divide="ignore", invalid="ignore"):
            val = np.where(d2 > 0, num / (d2 * np.sqrt(d2)), 0.0)
        total += float((val @ w).sum())
    return total


def starshaped_scan(c, dx, dy, px, py):
    """Signed margins of candidate star centres.

    For each centre ``(px[k], py[k])`` evaluates
    ``g(t) = c(t) - px*dy(t) + py*dx(t)`` over the samples and returns the
    smallest value of ``sign(g(0)) * g``. A non-positive result means ``g``
    vanishes or changes sign, so the centre lies on some tangent line.
    """
    out = np.empty(len(px))
    step = max(1, 4_000_000 // max(1, len(c)))
    for lo in range(0, len(px), step):
        hi = min(len(px), lo + step)
        g = c[None, :] - px[lo:hi, None] * dy[None, :] + py[lo:hi, None] * dx[None, :]
        s = np.sign(g[:, :1])
        s[s == 0] = 1.0
        out[lo:hi] = (g * s).min(axis=1)
    return out
