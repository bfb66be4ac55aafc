"""Planar projections, crossings and related counts.

Crossing signs use tangents: for a double point with over-strand parameter
``t+`` (larger height along ``u``) and under-strand ``t-`` the sign is
``sign det2(G_u'(t+), G_u'(t-))`` in the right-handed basis ``(e1, e2)``.
"""

import csv
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.spatial import cKDTree

from asymptote import kernels
from asymptote._numerics import TWO_PI, det2, dot, periodic_roots, uniform_grid, wrap
from asymptote.curves import PushOff
from asymptote.errors import (
    EpsilonResolutionFailure,
    InputError,
    NonGenericDirection,
    ResolutionFailure,
    SamplingFailure,
)

GRID = 4096


@dataclass(frozen=True)
class Direction:
    """Unit vector ``u`` with a right-handed basis ``(e1, e2)`` of its normal plane."""

    u: np.ndarray
    e1: np.ndarray
    e2: np.ndarray

    def __iter__(self):
        return iter(self.u)

    def as_list(self):
        return [float(x) for x in self.u]


def direction(u):
    if isinstance(u, Direction):
        return u
    u = np.asarray(u, dtype=float)
    nu = np.linalg.norm(u)
    if u.shape != (3,) or not np.isfinite(nu) or nu == 0:
        raise InputError(f"direction must be a nonzero 3-vector, got {u!r}")
    u = u / nu
    e1 = np.cross(u, [0.0, 0.0, 1.0])
    if np.linalg.norm(e1) < 1e-6:
        e1 = np.cross(u, [1.0, 0.0, 0.0])
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(u, e1)
    return Direction(u, e1, e2)


class PlanarProjection:
    """Orthogonal projection ``G_u`` of a curve onto the plane normal to ``u``."""

    def __init__(self, curve, u):
        self.curve = curve
        self.direction = direction(u)
        d = self.direction
        self.basis = np.stack([d.e1, d.e2], axis=1)

    @property
    def u(self):
        return self.direction.u

    def _map(self, ds):
        return [x @ self.basis for x in ds]

    def xy(self, t, order=1):
        return self._map(self.curve._derivs(np.asarray(t, dtype=float), order))

    def grid(self, n=GRID, order=1):
        return self._map(self.curve.grid(n, order))

    def height(self, t):
        return self.curve._derivs(np.asarray(t, dtype=float), 0)[0] @ self.u

    def to_csv(self, path, n=GRID):
        t = uniform_grid(n)
        p = self.grid(n, 0)[0]
        h = self.curve.grid(n, 0)[0] @ self.u
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "x", "y", "height"])
            for k in range(n):
                w.writerow([f"{t[k]:.17g}", f"{p[k, 0]:.17g}", f"{p[k, 1]:.17g}", f"{h[k]:.17g}"])


def project(curve, u):
    return PlanarProjection(curve, u)


@dataclass(frozen=True)
class Crossing:
    t_plus: float
    t_minus: float
    point: tuple
    sign: int
    kind: str = "self"
    angle: float = float("nan")
    height_gap: float = float("nan")


def _crossing_sign(d_plus, d_minus):
    return int(np.sign(det2(d_plus, d_minus)))


def _newton_pairs(fa, fb, s, t, scale, tol=1e-11, max_iter=50):
    """Solve ``fa(s) = fb(t)`` in the plane from initial guesses (vectorized).

    ``fa`` and ``fb`` return ``[position, derivative]`` arrays of shape (k, 2).
    Returns refined ``s, t`` and a convergence mask.
    """
    s = s.astype(float).copy()
    t = t.astype(float).copy()
    ok = np.zeros(len(s), dtype=bool)
    for _ in range(max_iter):
        act = np.flatnonzero(~ok)
        if not len(act):
            break
        a = fa(s[act])
        b = fb(t[act])
        F = a[0] - b[0]
        res = np.linalg.norm(F, axis=1)
        conv = res < tol * scale
        ok[act[conv]] = True
        det = -det2(a[1], b[1])
        safe = np.abs(det) > 1e-300
        dd = np.where(safe, det, 1.0)
        # J = [a', -b'];  J^{-1} F
        ds = (-b[1][:, 1] * F[:, 0] + b[1][:, 0] * F[:, 1]) / dd
        dt = (-a[1][:, 1] * F[:, 0] + a[1][:, 0] * F[:, 1]) / dd
        step = np.maximum(np.abs(ds), np.abs(dt))
        damp = np.minimum(1.0, 0.05 / np.maximum(step, 1e-300))
        upd = ~conv & safe
        s[act[upd]] -= (damp * ds)[upd]
        t[act[upd]] -= (damp * dt)[upd]
    return s % TWO_PI, t % TWO_PI, ok


def _merge(s, t, tol=1e-8):
    keep = []
    for k in np.lexsort((t, s)):
        if any(abs(wrap(s[k] - s[j])) < tol and abs(wrap(t[k] - t[j])) < tol for j in keep[-8:]):
            continue
        keep.append(k)
    return np.asarray(keep, dtype=np.int64)


def _build(proj_a, proj_b, s, t, kind, angle_tol, gap_tol, strict):
    pa = proj_a.xy(s, 1)
    pb = proj_b.xy(t, 1)
    ha = proj_a.height(s)
    hb = proj_b.height(t)
    out = []
    for k in range(len(s)):
        da, db = pa[1][k], pb[1][k]
        c = abs(det2(da, db)) / (np.linalg.norm(da) * np.linalg.norm(db))
        angle = float(np.arcsin(min(1.0, c)))
        gap = float(abs(ha[k] - hb[k]))
        if strict and angle < angle_tol:
            raise NonGenericDirection(f"near-tangential crossing (angle {angle:.2e})")
        if strict and gap <= gap_tol:
            raise NonGenericDirection(f"strands meet in space (height gap {gap:.2e})")
        if ha[k] > hb[k]:
            tp, tm, sign = s[k], t[k], _crossing_sign(da, db)
        else:
            tp, tm, sign = t[k], s[k], _crossing_sign(db, da)
        out.append(Crossing(float(tp), float(tm), (float(pa[0][k, 0]), float(pa[0][k, 1])),
                            sign, kind, angle, gap))
    return out


def _scale(proj, n):
    p = proj.grid(n, 0)[0]
    return max(1.0, float(np.ptp(p, axis=0).max()))


def self_crossings(proj, n=GRID, angle_tol=1e-4, gap_tol=1e-10, strict=True):
    """All transversal double points of ``G_u``, sorted by ``t+``."""
    P = proj.grid(n, 0)[0]
    scale = _scale(proj, n)
    i, j, a, b = kernels.segment_intersections(P, P, same=True)
    if not len(i):
        return []
    h = TWO_PI / n
    s0 = (i + a) * h
    t0 = (j + b) * h

    def f(x):
        return proj.xy(x, 1)

    s, t, ok = _newton_pairs(f, f, s0, t0, scale)
    sep = np.abs(wrap(s - t)) > 1e-6
    bad = ~ok & sep
    if bad.any():
        raise NonGenericDirection(f"{int(bad.sum())} crossing candidate(s) failed to converge")
    s, t = s[ok & sep], t[ok & sep]
    lo, hi = np.minimum(s, t), np.maximum(s, t)
    keep = _merge(lo, hi)
    out = _build(proj, proj, lo[keep], hi[keep], "self", angle_tol, gap_tol * scale, strict)
    return sorted(out, key=lambda c: (c.t_plus, c.t_minus))


def crossing_number(proj, n=GRID, crossings=None):
    cr = self_crossings(proj, n) if crossings is None else crossings
    return int(sum(c.sign for c in cr))


def polyline_crossings(curve, u, n=65536):
    """Brute-force crossings of the dense polyline (oracle).

    Signs come from segment directions and heights linearly interpolated
    along each segment; no refinement is done.
    """
    d = direction(u)
    X = curve.samples(n)
    P = X @ np.stack([d.e1, d.e2], axis=1)
    H = X @ d.u
    i, j, a, b = kernels.segment_intersections(P, P, same=True)
    nxt = lambda k: (k + 1) % n  # noqa: E731
    da = P[nxt(i)] - P[i]
    db = P[nxt(j)] - P[j]
    ha = H[i] + a * (H[nxt(i)] - H[i])
    hb = H[j] + b * (H[nxt(j)] - H[j])
    sgn = np.where(ha > hb, np.sign(det2(da, db)), np.sign(det2(db, da))).astype(int)
    h = TWO_PI / n
    return [((i[k] + a[k]) * h, (j[k] + b[k]) * h, int(sgn[k])) for k in range(len(i))]


# ---- ribbon (push-off) crossings ------------------------------------------


@dataclass
class RibbonCrossings:
    total: int
    local: int
    nonlocal_: int
    eps: float
    crossings: list = field(default_factory=list)
    self_crossing_number: int = 0

    @property
    def consistent(self):
        return self.nonlocal_ == 2 * self.self_crossing_number

    @property
    def linking(self):
        return self.self_crossing_number + 0.5 * self.local


def _min_distance(curve, other, n):
    A = curve.samples(n)
    B = other.samples(n)
    d, _ = cKDTree(A).query(B)
    step = float(np.linalg.norm(np.roll(A, -1, axis=0) - A, axis=1).max())
    return float(d.min()), step


def ribbon_crossings(curve, v, u, eps=None, n=GRID, retries=5, self_cr=None):
    """Crossings between ``G_u`` and ``(G + eps v)_u``, split local/nonlocal.

    Nonlocal crossings sit near self-crossings of ``G_u``; local ones have
    ``s ~ t`` and occur where ``v`` is close to ``+-u``.
    """
    proj = PlanarProjection(curve, u)
    if self_cr is None:
        self_cr = self_crossings(proj, n)
    cr_self = int(sum(c.sign for c in self_cr))
    pairs = np.array([[c.t_plus, c.t_minus] for c in self_cr]).reshape(-1, 2)
    if eps is None:
        eps = 1e-3 * curve.diameter()
    vproj = np.linalg.norm(proj.grid(n, 1)[1], axis=1).min()
    for _ in range(retries + 1):
        other = PushOff(curve, v, eps)
        m = n
        while True:
            dmin, step = _min_distance(curve, other, m)
            if dmin - step > eps / 2 or m >= 65536:
                break
            m *= 2
        if dmin - step <= eps / 2 and dmin <= eps / 2:
            eps /= 2
            continue
        oproj = PlanarProjection(other, u)
        P = proj.grid(n, 0)[0]
        Q = oproj.grid(n, 0)[0]
        scale = _scale(proj, n)
        i, j, a, b = kernels.segment_intersections(P, Q, same=False)
        h = TWO_PI / n
        s, t, ok = _newton_pairs(lambda x: proj.xy(x, 1), lambda x: oproj.xy(x, 1),
                                 (i + a) * h, (j + b) * h, scale)
        if (~ok).any():
            eps /= 2
            continue
        keep = _merge(s, t)
        s, t = s[keep], t[keep]
        r_loc = 10.0 * eps / vproj
        dloc = np.abs(wrap(s - t))
        if len(pairs):
            d1 = np.hypot(wrap(s[:, None] - pairs[None, :, 0]), wrap(t[:, None] - pairs[None, :, 1]))
            d2 = np.hypot(wrap(s[:, None] - pairs[None, :, 1]), wrap(t[:, None] - pairs[None, :, 0]))
            dnl = np.minimum(d1, d2).min(axis=1)
        else:
            dnl = np.full(len(s), np.inf)
        is_loc = dloc < r_loc
        is_nl = dnl < r_loc
        if np.any(is_loc == is_nl):
            eps /= 2
            continue
        crs = []
        for k in range(len(s)):
            kind = "local" if is_loc[k] else "nonlocal"
            crs += _build(proj, oproj, s[k : k + 1], t[k : k + 1], kind, 0.0, -1.0, False)
        loc = int(sum(c.sign for c in crs if c.kind == "local"))
        nl = int(sum(c.sign for c in crs if c.kind == "nonlocal"))
        return RibbonCrossings(loc + nl, loc, nl, eps, crs, cr_self)
    raise EpsilonResolutionFailure(f"ribbon crossings unresolved after {retries} eps reductions")


# ---- counts along a direction ---------------------------------------------


@dataclass
class ZeroSet:
    roots: np.ndarray
    tau_signs: np.ndarray

    @property
    def count(self):
        return int(len(self.roots))

    def signed_sum(self):
        return int(np.sum(self.tau_signs))


def normal_direction_zeros(framed, u, n=None, slope_tol=1e-8):
    """Zeros of ``<u, n(t)>`` with the sign of ``tau_g`` at each."""
    u = direction(u).u
    f = lambda t: framed.normal.derivs(t, 0)[0] @ u  # noqa: E731
    roots, touches = periodic_roots(f, n or framed.n)
    if len(touches):
        raise NonGenericDirection("<u, n> touches zero without changing sign")
    if len(roots):
        slope = framed.normal.derivs(roots, 1)[1] @ u
        if np.min(np.abs(slope)) <= slope_tol:
            raise NonGenericDirection("tangential zero of <u, n>")
        tau = framed.quantities(roots)["tau_g"]
    else:
        tau = np.zeros(0)
    return ZeroSet(roots, np.sign(tau).astype(int))


def rotation_index(proj, n=GRID, max_n=2**20):
    """Winding number of the planar tangent ``G_u'``."""
    while True:
        d = proj.grid(n, 1)[1]
        ang = np.arctan2(d[:, 1], d[:, 0])
        steps = wrap(np.diff(np.concatenate([ang, ang[:1]])))
        if np.abs(steps).max() < np.pi / 2:
            return int(np.rint(steps.sum() / TWO_PI))
        if n >= max_n:
            raise ResolutionFailure("tangent angle steps too large at maximal grid density")
        n *= 2


def planar_inflections(proj, n=GRID):
    """Zeros of the planar curvature numerator ``det2(G_u', G_u'')``."""
    f = lambda t: det2(*proj.xy(t, 2)[1:])  # noqa: E731
    roots, touches = periodic_roots(f, n)
    if len(touches):
        raise NonGenericDirection("planar curvature touches zero without changing sign")
    return roots


@dataclass
class StarResult:
    witness: tuple = None
    margin: float = 0.0
    verdict: str = "none (sampled)"

    @property
    def found(self):
        return self.witness is not None


def locally_starshaped(proj, grid=64, n=GRID, refine=4):
    """Search for a point lying on no tangent line of ``G_u``.

    Candidates: the box centre, the enclosed-area centroid and a
    ``grid x grid`` lattice over the bounding box enlarged 1.5 times.
    """
    P, D = proj.grid(n, 1)
    c = det2(P, D)
    lo, hi = P.min(axis=0), P.max(axis=0)
    mid, half = 0.5 * (lo + hi), 0.75 * (hi - lo)
    xs = np.linspace(mid[0] - half[0], mid[0] + half[0], grid)
    ys = np.linspace(mid[1] - half[1], mid[1] + half[1], grid)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    area = 0.5 * np.mean(c) * TWO_PI
    cand = [mid]
    if abs(area) > 1e-12:
        cx = np.mean(P[:, 0] * c) * TWO_PI / (3 * area)
        cy = np.mean(P[:, 1] * c) * TWO_PI / (3 * area)
        cand.append(np.array([cx, cy]))
    px = np.concatenate([[q[0] for q in cand], gx.ravel()])
    py = np.concatenate([[q[1] for q in cand], gy.ravel()])
    scale = float(np.abs(c).max() + np.abs(D).max() * np.abs(P).max()) or 1.0
    marg = kernels.starshaped_scan(c, D[:, 0], D[:, 1], px, py) / scale
    order = np.argsort(-marg, kind="stable")
    # the two fixed candidates go first if they pass
    order = np.concatenate([np.array([k for k in range(len(cand)) if marg[k] > 0], dtype=int), order])
    fine = None
    for k in order:
        if marg[k] <= 0:
            break
        p = np.array([px[k], py[k]])
        if fine is None:
            Pf, Df = proj.grid(n * refine, 1)
            fine = (Pf, Df)
        g = det2(fine[0] - p, fine[1])
        sgn = np.sign(g[0])
        kmin = int(np.argmin(sgn * g))
        if sgn * g[kmin] <= 0:
            continue
        h = TWO_PI / (n * refine)
        t0 = kmin * h

        def gp(x, p=p, sgn=sgn):
            q = proj.xy(np.array([x]), 1)
            return float(sgn * det2(q[0][0] - p, q[1][0]))

        res = minimize_scalar(gp, bounds=(t0 - 2 * h, t0 + 2 * h), method="bounded",
                              options={"xatol": 1e-12})
        if res.fun > 0:
            return StarResult((float(p[0]), float(p[1])), float(res.fun) / scale, "witness")
    return StarResult(None, float(marg.max()), "none (sampled)")


# ---- admissible directions -------------------------------------------------


def check_admissible(curve, u, framed=None, n=GRID, tangent_tol=1e-3, angle_tol=1e-3,
                     gap_tol=1e-6, triple_tol=1e-6, slope_tol=1e-6):
    """Return ``(ok, reason, crossings)`` for direction ``u``."""
    d = direction(u)
    T = curve.grid(n, 1)[1]
    T = T / np.linalg.norm(T, axis=1, keepdims=True)
    if np.linalg.norm(np.cross(T, d.u), axis=1).min() <= tangent_tol:
        return False, "tangent nearly parallel to u", None
    proj = PlanarProjection(curve, d)
    try:
        cr = self_crossings(proj, n, angle_tol=angle_tol, gap_tol=gap_tol / _scale(proj, n))
    except NonGenericDirection as exc:
        return False, str(exc), None
    if len(cr) > 1:
        pts = np.array([c.point for c in cr])
        if cKDTree(pts).query_pairs(triple_tol):
            return False, "triple point candidate", None
    if framed is not None:
        try:
            normal_direction_zeros(framed, d, slope_tol=slope_tol)
        except NonGenericDirection as exc:
            return False, str(exc), None
    return True, "", cr


def random_admissible_direction(curve, framed=None, seed=None, rng=None, max_rejections=10_000, n=GRID):
    """Uniformly random admissible direction (rejection sampling)."""
    rng = rng if rng is not None else np.random.default_rng(seed)
    for _ in range(max_rejections):
        v = rng.normal(size=3)
        if np.linalg.norm(v) < 1e-12:
            continue
        d = direction(v)
        ok, _, _ = check_admissible(curve, d, framed, n)
        if ok:
            return d
    raise SamplingFailure(f"no admissible direction after {max_rejections} draws")


def admissible_directions(curve, count, seed=0, framed=None, n=GRID):
    """``count`` admissible directions from one seeded stream, with crossings."""
    rng = np.random.default_rng(seed)
    out = []
    rejected = 0
    while len(out) < count:
        d = direction(rng.normal(size=3))
        ok, _, cr = check_admissible(curve, d, framed, n)
        if ok:
            out.append((d, cr))
        else:
            rejected += 1
            if rejected > 10_000:
                raise SamplingFailure("too many rejected directions")
    return out


def export_crossings_csv(crossings, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t_plus", "t_minus", "x", "y", "sign", "kind"])
        for c in crossings:
            w.writerow([f"{c.t_plus:.17g}", f"{c.t_minus:.17g}", f"{c.point[0]:.17g}",
                        f"{c.point[1]:.17g}", c.sign, c.kind])
