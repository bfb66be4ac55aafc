"""Frenet and Darboux frames along closed curves.

Conventions, all per unit arclength ``s`` (so raw derivatives are divided
by ``|G'|``):

    T' = kappa_g n_perp,   n_perp' = -kappa_g T + tau_g n,   n' = -tau_g n_perp

with ``n_perp = n x T``. For ``n = B`` this gives ``kappa_g = kappa`` and
``tau_g = tau``.
"""

import csv
from dataclasses import dataclass

import numpy as np
import sympy as sp
from scipy.spatial import cKDTree

from asymptote._numerics import TWO_PI, det3, dot, periodic_roots, uniform_grid
from asymptote.curves import AnalyticCurve, FourierCurve, fourier_coefficients
from asymptote.errors import (
    DegeneratePatch,
    InconsistentFraming,
    InflectionPoint,
    InvalidFraming,
    NoDarbouxFraming,
    NotAsymptotic,
    SphericalSingularity,
    UnsupportedOrder,
)

GRID = 4096


def unit_jet(ms):
    """Derivatives of ``m/|m|`` from those of ``m`` (orders up to 2)."""
    m = ms[0]
    r = np.linalg.norm(m, axis=-1, keepdims=True)
    n = m / r
    out = [n]
    if len(ms) > 1:
        r1 = dot(n, ms[1])[..., None]
        n1 = (ms[1] - r1 * n) / r
        out.append(n1)
        if len(ms) > 2:
            r2 = dot(n, ms[2])[..., None] + r * dot(n1, n1)[..., None]
            out.append((ms[2] - r2 * n - 2.0 * r1 * n1) / r)
    return out


# ---- normal fields ---------------------------------------------------------


class NormalField:
    """Unit vector field along a curve, ``t -> n(t)`` with two derivatives.

    ``source`` is any object with the curve interface (``_derivs``, ``grid``,
    ``shifted_grid``); its values are normalized when ``normalize`` is set.
    """

    max_order = 2

    def __init__(self, source, name="n", provenance="analytic", normalize=True):
        self.source = source
        self.name = name
        self.provenance = provenance
        self.normalize = normalize

    def _post(self, ds):
        return unit_jet(ds) if self.normalize else ds

    def _check(self, order):
        if order > self.max_order:
            raise UnsupportedOrder(f"{self.name}: derivatives above order {self.max_order} unavailable")

    def derivs(self, t, order=1):
        self._check(order)
        return self._post(self.source._derivs(np.asarray(t, dtype=float), order))

    def grid(self, n, order=1):
        self._check(order)
        return self._post(self.source.grid(n, order))

    def shifted_grid(self, ns, delta, order=1):
        self._check(order)
        return self._post(self.source.shifted_grid(ns, delta, order))

    def __call__(self, t):
        return self.derivs(t, 0)[0]

    def negated(self):
        return DerivedField(self.name + "-neg", lambda t, g, v, order: [-x for x in v[: order + 1]],
                            None, self, max_order=self.max_order)


def analytic_normal(expr, name="n", normalize=True):
    """Normal field from a sympy 3-vector in the symbol ``t``."""
    t = sp.Symbol("t", real=True)
    expr = [sp.sympify(e).subs(sp.Symbol("t"), t) for e in expr]
    return NormalField(AnalyticCurve(name, expr, symbol=t), name=name, normalize=normalize)


def fourier_normal(samples, name="n", provenance="fourier", shift=0.0):
    """Normal field interpolating unit samples at ``t_k + shift``."""
    n = len(samples)
    coef = fourier_coefficients(samples, trim=0)
    k = np.arange(coef.shape[0])
    if shift:
        coef = coef * np.exp(-1j * k * shift)[:, None]
        if n % 2 == 0 and coef.shape[0] == n // 2 + 1:
            coef = coef[:-1]
    scale = np.abs(coef).max()
    big = np.flatnonzero(np.abs(coef).max(axis=1) > 1e-16 * scale)
    coef = coef[: big[-1] + 1]
    return NormalField(FourierCurve(coef, name=name), name=name, provenance=provenance)


class DerivedField(NormalField):
    """Field built pointwise from the curve jet and a base field's jet.

    ``combine(t, g, v, order)`` returns the list of derivatives up to
    ``order``; ``g`` holds curve derivatives up to ``order + depth`` and
    ``v`` the base field's derivatives up to ``order``.
    """

    def __init__(self, name, combine, curve, base, max_order=1, provenance="derived", depth=1):
        super().__init__(None, name=name, provenance=provenance, normalize=False)
        self.combine = combine
        self.curve = curve
        self.base = base
        self.max_order = max_order
        self.depth = depth

    def _eval(self, t, g, v, order):
        return self.combine(t, g, v, order)

    def derivs(self, t, order=1):
        self._check(order)
        t = np.asarray(t, dtype=float)
        g = self.curve._derivs(t, order + self.depth) if self.curve is not None else None
        v = self.base.derivs(t, order) if self.base is not None else None
        return self._eval(t, g, v, order)

    def grid(self, n, order=1):
        self._check(order)
        t = uniform_grid(n)
        g = self.curve.grid(n, order + self.depth) if self.curve is not None else None
        v = self.base.grid(n, order) if self.base is not None else None
        return self._eval(t, g, v, order)

    def shifted_grid(self, ns, delta, order=1):
        self._check(order)
        t = uniform_grid(ns)[None, :] + np.asarray(delta, dtype=float)[:, None]
        g = self.curve.shifted_grid(ns, delta, order + self.depth) if self.curve is not None else None
        v = self.base.shifted_grid(ns, delta, order) if self.base is not None else None
        return self._eval(t, g, v, order)


def _tangent_jet(g, order):
    sp_ = np.linalg.norm(g[1], axis=-1, keepdims=True)
    T = g[1] / sp_
    out = [T]
    if order >= 1:
        out.append((g[2] - dot(T, g[2])[..., None] * T) / sp_)
    return out


def perp_field(curve, normal):
    """``n_perp = n x T``."""

    def combine(t, g, v, order):
        T = _tangent_jet(g, order)
        out = [np.cross(v[0], T[0])]
        if order >= 1:
            out.append(np.cross(v[1], T[0]) + np.cross(v[0], T[1]))
        return out

    return DerivedField(normal.name + "_perp", combine, curve, normal)


def rotated_field(curve, normal, m):
    """``v_m = cos(mt) n_perp + sin(mt) n``; rotates m times relative to n."""

    def combine(t, g, v, order):
        T = _tangent_jet(g, order)
        c, s = np.cos(m * t)[..., None], np.sin(m * t)[..., None]
        p0 = np.cross(v[0], T[0])
        out = [c * p0 + s * v[0]]
        if order >= 1:
            p1 = np.cross(v[1], T[0]) + np.cross(v[0], T[1])
            out.append(-m * s * p0 + c * p1 + m * c * v[0] + s * v[1])
        return out

    return DerivedField(f"v_{m}", combine, curve, normal)


def direction_perp_field(curve, u):
    """``u_perp = u x T / |u x T|``."""
    u = np.asarray(u, dtype=float)

    def combine(t, g, v, order):
        T = _tangent_jet(g, order)
        ms = [np.cross(u, T[0])]
        if order >= 1:
            ms.append(np.cross(u, T[1]))
        return unit_jet(ms)

    return DerivedField("u_perp", combine, curve, None)


def constant_field(curve, vector):
    """Constant unit field (valid as a normal only along planar curves)."""
    vec = np.asarray(vector, dtype=float)
    vec = vec / np.linalg.norm(vec)

    def combine(t, g, v, order):
        shape = np.shape(t) + (3,)
        return [np.broadcast_to(vec, shape).copy()] + [np.zeros(shape) for _ in range(order)]

    return DerivedField("const", combine, None, None, max_order=2)


def binormal_field(curve):
    """Frenet binormal ``B = G' x G'' / |G' x G''|`` (no sign continuation)."""

    def combine(t, g, v, order):
        ms = [np.cross(g[1], g[2])]
        if order >= 1:
            ms.append(np.cross(g[1], g[3]))
        return unit_jet(ms)

    return DerivedField("B", combine, curve, None, max_order=1, depth=2)


def principal_normal_field(curve):
    """Frenet principal normal ``N = B x T``."""

    def combine(t, g, v, order):
        b = [np.cross(g[1], g[2])]
        if order >= 1:
            b.append(np.cross(g[1], g[3]))
        B = unit_jet(b)
        T = _tangent_jet(g, order)
        out = [np.cross(B[0], T[0])]
        if order >= 1:
            out.append(np.cross(B[1], T[0]) + np.cross(B[0], T[1]))
        return out

    return DerivedField("N", combine, curve, None, max_order=1, depth=2)


# ---- Frenet quantities -----------------------------------------------------


def curvature(curve, t):
    g = curve.jet(t, 2)
    sp_ = np.linalg.norm(g.d1, axis=-1)
    return np.linalg.norm(np.cross(g.d1, g.d2), axis=-1) / sp_**3


def _kappa_tol(curve, rel=1e-8):
    g = curve.grid(GRID, 2)
    k = np.linalg.norm(np.cross(g[1], g[2]), axis=-1) / np.linalg.norm(g[1], axis=-1) ** 3
    return rel * float(k.max())


def torsion(curve, t, rel_tol=1e-8):
    g = curve.jet(t, 3)
    b = np.cross(g.d1, g.d2)
    bb = dot(b, b)
    kappa = np.sqrt(bb) / np.linalg.norm(g.d1, axis=-1) ** 3
    if np.any(kappa <= _kappa_tol(curve, rel_tol)):
        raise InflectionPoint("torsion undefined where curvature vanishes")
    return dot(b, g.d3) / bb


def frenet_frame(curve, t, rel_tol=1e-8):
    """Unit tangent, principal normal and binormal at ``t``."""
    g = curve.jet(t, 2)
    b = np.cross(g.d1, g.d2)
    kappa = np.linalg.norm(b, axis=-1) / np.linalg.norm(g.d1, axis=-1) ** 3
    if np.any(kappa <= _kappa_tol(curve, rel_tol)):
        raise InflectionPoint("Frenet frame undefined at an inflection")
    T = g.d1 / np.linalg.norm(g.d1, axis=-1, keepdims=True)
    B = b / np.linalg.norm(b, axis=-1, keepdims=True)
    return T, np.cross(B, T), B


# ---- Darboux frame ---------------------------------------------------------


@dataclass(frozen=True)
class FrameSample:
    t: np.ndarray
    T: np.ndarray
    n_perp: np.ndarray
    n: np.ndarray


def _darboux(g, nn):
    """Frame data from curve derivatives (>= 2) and field derivatives (>= 1)."""
    sp_ = np.linalg.norm(g[1], axis=-1)
    T = g[1] / sp_[..., None]
    n = nn[0]
    nperp = np.cross(n, T)
    kg = dot(g[2], nperp) / sp_**2
    tg = -dot(nn[1], nperp) / sp_
    return {"speed": sp_, "T": T, "n": n, "n_perp": nperp, "kappa_g": kg, "tau_g": tg}


class FramedCurve:
    """A curve with a unit normal field and the resulting Darboux frame.

    With ``strict`` the field must be normal to the curve and ``tau_g`` must
    keep one sign; otherwise the same quantities are computed and the
    violations are recorded in ``issues``.
    """

    def __init__(self, curve, normal, n=GRID, strict=True, normal_tol=1e-8):
        self.curve = curve
        self.normal = normal
        self.n = int(n)
        self.t = uniform_grid(self.n)
        self._g = curve.grid(self.n, 3)
        self._nn = normal.grid(self.n, min(2, normal.max_order))
        d = _darboux(self._g, self._nn)
        self.speed = d["speed"]
        self.T = d["T"]
        self.n_perp = d["n_perp"]
        self.nvec = d["n"]
        self.kappa_g = d["kappa_g"]
        self.tau_g = d["tau_g"]
        self.issues = []
        unit_err = float(np.abs(np.linalg.norm(self.nvec, axis=1) - 1).max())
        orth_err = float(np.abs(dot(self.nvec, self.T)).max())
        if unit_err > 1e-9 or orth_err > normal_tol:
            msg = f"field is not a unit normal (|n|-1: {unit_err:.2e}, <n,T>: {orth_err:.2e})"
            if strict:
                raise InvalidFraming(msg)
            self.issues.append(msg)
        tmin, tmax = float(self.tau_g.min()), float(self.tau_g.max())
        self.tau_sign = 1 if tmin > 0 else (-1 if tmax < 0 else 0)
        if self.tau_sign == 0:
            msg = f"tau_g is not one-signed (range [{tmin:.4g}, {tmax:.4g}])"
            if strict:
                raise NotAsymptotic(msg)
            self.issues.append(msg)

    @property
    def name(self):
        return self.curve.name

    def quantities(self, t):
        """Darboux data at arbitrary parameters."""
        t = np.asarray(t, dtype=float)
        g = self.curve._derivs(t, 3)
        nn = self.normal.derivs(t, min(2, self.normal.max_order))
        d = _darboux(g, nn)
        d["g"] = g
        d["nn"] = nn
        return d

    def frame(self, t):
        d = self.quantities(t)
        return FrameSample(np.asarray(t), d["T"], d["n_perp"], d["n"])

    def min_abs_tau(self):
        """Minimum of ``|tau_g|``; exactly 0 when ``tau_g`` changes sign."""
        return 0.0 if self.tau_sign == 0 else float(np.abs(self.tau_g).min())

    def darboux_residuals(self, n=1024):
        """Max residuals of the three frame equations, per unit arclength."""
        t = uniform_grid(n)
        g = self.curve._derivs(t, 3)
        nn = self.normal.derivs(t, 1)
        d = _darboux(g, nn)
        sp_ = d["speed"][:, None]
        T, p, nv, kg, tg = d["T"], d["n_perp"], d["n"], d["kappa_g"][:, None], d["tau_g"][:, None]
        dT = _tangent_jet(g, 1)[1] / sp_
        dn = nn[1] / sp_
        dp = (np.cross(nn[1], T) + np.cross(nv, dT * sp_)) / sp_
        return {
            "T": float(np.linalg.norm(dT - kg * p, axis=1).max()),
            "n_perp": float(np.linalg.norm(dp + kg * T - tg * nv, axis=1).max()),
            "n": float(np.linalg.norm(dn + tg * p, axis=1).max()),
        }

    def to_csv(self, path, n=None):
        """Write t, T, n_perp, n, kappa_g, tau_g samples."""
        n = n or self.n
        t = uniform_grid(n)
        d = self.quantities(t)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "Tx", "Ty", "Tz", "px", "py", "pz", "nx", "ny", "nz", "kappa_g", "tau_g"])
            for k in range(n):
                w.writerow([f"{t[k]:.17g}", *(f"{x:.17g}" for x in d["T"][k]),
                            *(f"{x:.17g}" for x in d["n_perp"][k]), *(f"{x:.17g}" for x in d["n"][k]),
                            f"{d['kappa_g'][k]:.17g}", f"{d['tau_g'][k]:.17g}"])


def geodesic_quantities(framed, t, check=True, tol=1e-6):
    """``(kappa_g, tau_g)`` at ``t``; checks ``dn/ds = -tau_g n_perp``."""
    d = framed.quantities(t)
    kg, tg = d["kappa_g"], d["tau_g"]
    if check:
        res = np.linalg.norm(d["nn"][1] / d["speed"][..., None] + tg[..., None] * d["n_perp"], axis=-1)
        if np.max(res) > tol:
            raise InconsistentFraming(f"dn/ds + tau_g n_perp residual {np.max(res):.3e}")
    return kg, tg


def binormal_source(curve, sign=1.0):
    """Exact ``sign * G' x G''`` as a curve-like object with derivatives."""
    if isinstance(curve, AnalyticCurve):
        t = sp.Symbol("t", real=True)
        sym = next(iter(curve.expr.free_symbols), t)
        d1 = curve.expr.diff(sym)
        return AnalyticCurve(curve.name + "-b", list(sign * d1.cross(d1.diff(sym))), symbol=sym)
    if isinstance(curve, FourierCurve):
        # product of trig polynomials: sample finely enough to avoid aliasing
        m = 4 * curve.modes + 8
        g = curve.grid(m, 2)
        coef = fourier_coefficients(sign * np.cross(g[1], g[2]), trim=1e-16)
        return FourierCurve(coef, name=curve.name + "-b")
    m = 8192
    g = curve.grid(m, 2)
    return FourierCurve(fourier_coefficients(sign * np.cross(g[1], g[2]), trim=1e-16), name=curve.name + "-b")


def asymptotic_normal(curve, n=GRID, sign=1, strict=True, max_n=65536):
    """Unit field equal to +-B, continued through inflections.

    The binormal direction is sampled where defined and its sign propagated
    so that neighbouring samples agree. Without sign changes the field is
    the exact normalized ``G' x G''``; otherwise the sign-corrected samples
    are interpolated spectrally. ``sign`` fixes the choice at ``t = 0``.
    """
    while True:
        h = TWO_PI / n
        shift = 0.0
        g = curve.grid(n, 2)
        b = np.cross(g[1], g[2])
        nb = np.linalg.norm(b, axis=1)
        small = nb < 1e-12 * nb.max()
        if nb.max() == 0 or small.sum() > 3:
            raise NoDarbouxFraming("curvature vanishes on an interval")
        if small.any() or nb.min() < 1e-6 * nb.max():
            shift = 0.5 * h
            gs = curve._derivs(uniform_grid(n) + shift, 2)
            b = np.cross(gs[1], gs[2])
            nb = np.linalg.norm(b, axis=1)
            if nb.min() < 1e-12 * nb.max():
                raise NoDarbouxFraming("curvature vanishes at both staggered grids")
        bh = b / nb[:, None]
        flips = dot(bh, np.roll(bh, -1, axis=0)) < 0
        if flips.sum() % 2:
            raise NoDarbouxFraming("binormal cannot be continued around the curve (odd flip count)")
        if not flips.any():
            field = NormalField(binormal_source(curve, float(sign)), name="n",
                                provenance="asymptotic-from-curve")
            break
        s = np.ones(n)
        s[1:] = np.where(np.cumsum(flips[:-1]) % 2, -1.0, 1.0)
        samples = sign * s[:, None] * bh
        field = fourier_normal(samples, name="n", provenance="asymptotic-from-curve", shift=shift)
        coef = field.source.coef
        tail = np.abs(coef[3 * len(coef) // 4 :]).max() / np.abs(coef).max()
        if tail < 1e-11 or 2 * n > max_n:
            break
        n *= 2
    field.flip_count = int(flips.sum())
    if strict:
        FramedCurve(curve, field, strict=True)
    return field


def inflections(framed, n=None):
    """Zeros of ``kappa_g``; returns ``(zeros, degenerate)``."""

    def kg(t):
        return framed.quantities(t)["kappa_g"]

    roots, touches = periodic_roots(kg, n or framed.n)
    return roots, touches


def ruled_patch_curvature(framed, t):
    """Gauss curvature at ``s = 0`` of ``(t, s) -> G(t) + s n_perp(t)``."""
    d = framed.quantities(t)
    g, nn = d["g"], d["nn"]
    T = d["T"]
    dT = _tangent_jet(g, 1)[1]
    Xt = g[1]
    Xs = d["n_perp"]
    Xts = np.cross(nn[1], T) + np.cross(d["n"], dT)
    Xtt = g[2]
    E, F, G = dot(Xt, Xt), dot(Xt, Xs), dot(Xs, Xs)
    W = E * G - F * F
    if np.any(W <= 1e-14 * E):
        raise DegeneratePatch("first fundamental form is degenerate")
    nu = np.cross(Xt, Xs)
    nu = nu / np.linalg.norm(nu, axis=-1, keepdims=True)
    L, M = dot(Xtt, nu), dot(Xts, nu)
    N = 0.0
    return (L * N - M * M) / W


def spherical_geodesic_curvature(framed, t, tol=1e-10):
    """Geodesic curvature of the spherical curve ``n(t)``.

    Returns ``(kt, residual, residual_printed)``: the curvature
    ``<n'', n x n'>/|n'|^3``, its distance from ``kappa_g/|tau_g|`` and its
    distance from ``kappa_g/tau_g``.
    """
    d = framed.quantities(t)
    n0, n1, n2 = d["nn"][0], d["nn"][1], d["nn"][2]
    s1 = np.linalg.norm(n1, axis=-1)
    if np.any(s1 < tol * max(1.0, float(np.max(s1)))):
        raise SphericalSingularity("normal field has a stationary point")
    kt = dot(n2, np.cross(n0, n1)) / s1**3
    return kt, np.abs(kt - d["kappa_g"] / np.abs(d["tau_g"])), np.abs(kt - d["kappa_g"] / d["tau_g"])


@dataclass
class InjectivityResult:
    injective: bool
    pairs: list
    degenerate: bool = False
    unresolved: int = 0

    @property
    def inconclusive(self):
        return self.unresolved > 0


def spherical_image_injective(field, m=8192, fine=16384, max_iter=40, tol=1e-12):
    """Self-intersections of the closed spherical curve ``t -> field(t)``.

    The curve is resampled at ``m`` points of equal spherical arclength;
    pairs of non-neighbouring samples closer than two steps are refined by
    Newton's method on two tangent-plane components of ``n(s) - n(t)``.
    """
    tf = uniform_grid(fine)
    speed = np.linalg.norm(field.grid(fine, 1)[1], axis=1)
    if speed.min() <= 0:
        raise SphericalSingularity("normal field has a stationary point")
    # cumulative arclength by the trapezoid rule, closed up periodically
    arc = np.concatenate([[0.0], np.cumsum(0.5 * (speed + np.roll(speed, -1)) * (TWO_PI / fine))])
    total = float(arc[-1])
    tfx = np.concatenate([tf, [TWO_PI]])

    def arclen(t):
        return np.interp(np.mod(t, TWO_PI), tfx, arc)

    delta = total / m
    tk = np.interp(np.arange(m) * delta, arc, tfx)
    P = field.derivs(tk, 0)[0]
    tree = cKDTree(P)
    raw = np.array(sorted(tree.query_pairs(2.5 * delta)), dtype=np.int64).reshape(-1, 2)
    if len(raw):
        gap = np.abs(raw[:, 1] - raw[:, 0])
        raw = raw[np.minimum(gap, m - gap) > 6]
    s_, t_ = tk[raw[:, 0]].copy(), tk[raw[:, 1]].copy()
    active = np.ones(len(raw), dtype=bool)
    for _ in range(max_iter):
        idx = np.flatnonzero(active)
        if not len(idx):
            break
        a = field.derivs(s_[idx], 1)
        b = field.derivs(t_[idx], 1)
        F = a[0] - b[0]
        done = np.linalg.norm(F, axis=1) < tol
        active[idx[done]] = False
        # tangent-plane coordinates at n(s) give two independent equations
        e1 = np.cross(a[0], a[1])
        e1 /= np.linalg.norm(e1, axis=1, keepdims=True)
        e2 = a[1] / np.linalg.norm(a[1], axis=1, keepdims=True)
        J00, J01 = dot(a[1], e1), -dot(b[1], e1)
        J10, J11 = dot(a[1], e2), -dot(b[1], e2)
        r0, r1 = dot(F, e1), dot(F, e2)
        det = J00 * J11 - J01 * J10
        safe = np.abs(det) > 1e-14
        dd = np.where(safe, det, 1.0)
        ds = np.where(safe, (J11 * r0 - J01 * r1) / dd, 0.0)
        dt = np.where(safe, (-J10 * r0 + J00 * r1) / dd, 0.0)
        # damp steps to a few sample spacings of arclength
        lim = 4 * delta / np.maximum(np.linalg.norm(a[1], axis=1), 1e-300)
        lim2 = 4 * delta / np.maximum(np.linalg.norm(b[1], axis=1), 1e-300)
        s_[idx] -= np.where(done, 0.0, np.clip(ds, -lim, lim))
        t_[idx] -= np.where(done, 0.0, np.clip(dt, -lim2, lim2))
    pairs, degenerate, unresolved = [], False, 0
    if len(raw):
        a = field.derivs(s_, 1)
        b = field.derivs(t_, 1)
        dist = np.linalg.norm(a[0] - b[0], axis=1)
        sa = np.abs(arclen(s_) - arclen(t_))
        sep = np.minimum(sa, total - sa) > 2 * delta
        ok = (dist < 1e-9) & sep
        # near misses that drifted away are not crossings; only stalled
        # candidates that stayed close without converging are unresolved
        unresolved = int(np.sum(~ok & sep & (dist < 0.1 * delta)))
        cosang = np.abs(dot(a[1], b[1])) / (np.linalg.norm(a[1], axis=1) * np.linalg.norm(b[1], axis=1))
        if ok.any():
            sol = np.sort(np.stack([s_[ok] % TWO_PI, t_[ok] % TWO_PI], 1), axis=1)
            tang = cosang[ok] > 1 - 1e-8
            degenerate = bool(tang.any())
            for k in np.lexsort((sol[:, 1], sol[:, 0])):
                if any(np.hypot(*(sol[k] - q)) < 1e-7 for q in pairs[-4:]):
                    continue
                pairs.append(sol[k])
    pairs = [tuple(map(float, p)) for p in pairs]
    return InjectivityResult(not pairs, pairs, degenerate, unresolved)


def wrap_angle(a):
    return (np.asarray(a) + np.pi) % TWO_PI - np.pi
