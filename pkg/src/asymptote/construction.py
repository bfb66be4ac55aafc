"""Closing a curve with a prescribed spherical normal.

Starting from an immersed loop ``n`` on the sphere, the tangent
``T = n x n' / |n'|`` is orthogonal to ``n`` with ``<T', n> = 0``, so any
closed ``G = int rho T`` with ``rho > 0`` is an asymptotic curve framed by
``n``. Closing requires ``int rho T = 0``, solved here with positive
combinations of bump functions.
"""

import functools
from dataclasses import dataclass, field

import numpy as np
import sympy as sp
from scipy.optimize import linprog, minimize
from scipy.spatial import ConvexHull, QhullError

from asymptote._numerics import TWO_PI, dot, fibonacci_sphere, periodic_roots, uniform_grid
from asymptote.curves import AnalyticCurve, FourierCurve, fourier_coefficients
from asymptote.errors import ClosureFailure, ClosureInfeasible, ImaginaryComponent, NotImmersed
from asymptote.framing import FramedCurve, NormalField

DEFAULT_ANCHORS = (7 * np.pi / 6, 11 * np.pi / 6, np.pi / 6, 5 * np.pi / 6, np.pi / 2)
GRID = 4096


# ---- spherical loop and its tangent field ----------------------------------


class SphericalLoop(NormalField):
    """Analytic loop on the unit sphere (no normalization needed)."""

    def __init__(self, expr, name="n", params=None):
        t = sp.Symbol("t", real=True)
        expr = [sp.sympify(e).subs(sp.Symbol("t"), t) for e in expr]
        self.expr = sp.Matrix(expr)
        self.symbol = t
        self.params = dict(params or {})
        super().__init__(AnalyticCurve(name, expr, self.params, symbol=t), name=name,
                         provenance="analytic", normalize=False)


def example2_normal(sigma=0.22):
    """``n = (s r cos(5/2 cos t), s r sin(5/2 cos t), sqrt(1 - s^2 r^2))``, ``r = 3 + sin t``."""
    sigma = float(sigma)
    if not sigma > 0:
        raise ImaginaryComponent(f"sigma must be positive, got {sigma}")
    if sigma * 4.0 >= 1.0:
        raise ImaginaryComponent(
            f"sigma = {sigma} gives |(n1, n2)| = {4 * sigma:.3g} >= 1 at t = pi/2; need sigma < 1/4")
    t = sp.Symbol("t", real=True)
    s = sp.nsimplify(sigma)
    r = s * (3 + sp.sin(t))
    a = sp.Rational(5, 2) * sp.cos(t)
    return SphericalLoop([r * sp.cos(a), r * sp.sin(a), sp.sqrt(1 - r**2)], params={"sigma": sigma})


class TangentField(NormalField):
    """``T = n x n' / |n'|`` for a spherical loop ``n``."""

    def __init__(self, loop):
        cross = loop.expr.cross(loop.expr.diff(loop.symbol))
        super().__init__(AnalyticCurve("T", list(cross), symbol=loop.symbol), name="T",
                         provenance="from-normal", normalize=True)
        self.loop = loop


def tangent_from_normal(loop, n=GRID):
    """Tangent field and ``tau_g`` per raw parameter (``|n'|``) on a grid."""
    dn = loop.grid(n, 1)[1]
    speed = np.linalg.norm(dn, axis=1)
    if speed.min() < 1e-10:
        raise NotImmersed(f"|n'| = {speed.min():.2e} somewhere; loop is not immersed")
    return TangentField(loop), speed


def tangent_cusps(loop, n=GRID):
    """Parameters where ``T`` is stationary: zeros of ``<n'', n x n'>``."""

    def f(t):
        v = loop.derivs(t, 2)
        return dot(v[2], np.cross(v[0], v[1]))

    return periodic_roots(f, n)[0]


# ---- convex hull -----------------------------------------------------------


@dataclass
class HullResult:
    inside: bool
    margin: float
    support_margin: float
    degenerate: bool = False


def _support_margin(P, m=4000):
    W = fibonacci_sphere(m)
    h = (P @ W.T).max(axis=0)
    k = int(np.argmin(h))

    def f(x):
        w = x / np.linalg.norm(x)
        return float((P @ w).max())

    res = minimize(f, W[k], method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 4000})
    return min(float(h[k]), float(res.fun))


def hull_contains_origin(T, tol=1e-12):
    """Whether 0 lies in the interior of the convex hull of the rows of ``T``.

    ``margin`` is the distance from 0 to the hull boundary (negative when
    outside); ``support_margin`` is ``min_w max_t <T(t), w>`` over unit ``w``
    found independently by a spherical scan with local refinement.
    """
    P = np.asarray(T, dtype=float)
    if len(P) < 4:
        return HullResult(False, 0.0, 0.0, True)
    sup = _support_margin(P)
    try:
        hull = ConvexHull(P)
    except QhullError:
        return HullResult(False, 0.0, sup, True)
    margin = float(np.min(-hull.equations[:, 3]))
    if abs(margin) <= tol:
        return HullResult(False, 0.0, sup, True)
    return HullResult(margin > tol, margin, sup, False)


# ---- bump functions and closure --------------------------------------------


@dataclass(frozen=True)
class BumpBasis:
    """``phi_i = (offset + cos(t - t_i))^exponent``, normalized to unit integral."""

    anchors: tuple = DEFAULT_ANCHORS
    exponent: int = 10
    offset: float = 1.1

    @functools.cached_property
    def norm(self):
        t = uniform_grid(8 * self.exponent + 64)
        # trigonometric polynomial of degree `exponent`: the trapezoid rule is exact
        return TWO_PI * float(np.mean((self.offset + np.cos(t)) ** self.exponent))

    def values(self, t):
        t = np.asarray(t, dtype=float)
        a = np.asarray(self.anchors, dtype=float)
        return (self.offset + np.cos(t[None, :] - a[:, None])) ** self.exponent / self.norm


@dataclass
class ClosureSolution:
    coefficients: np.ndarray
    moments: np.ndarray
    residual: float
    lp_margin: float


def moments(T_samples, basis):
    """``p_i = int phi_i T dt`` as columns of a 3 x k matrix."""
    n = len(T_samples)
    phi = basis.values(uniform_grid(n))
    return (phi @ T_samples).T * (TWO_PI / n)


def closure_coefficients(T_samples, basis=None, anchors=DEFAULT_ANCHORS, exponent=10, offset=1.1):
    """Positive ``c`` with ``sum c_i p_i = 0``, scaled so ``c_1 = 1``.

    The solution set ``{P c = 0, sum c = k}`` is an affine subspace; its
    minimum-norm point is used when strictly positive, otherwise the point
    maximizing ``min c_i`` (a small LP).
    """
    basis = basis or BumpBasis(tuple(anchors), int(exponent), float(offset))
    P = moments(np.asarray(T_samples, dtype=float), basis)
    k = P.shape[1]
    A = np.vstack([P, np.ones((1, k))])
    rhs = np.concatenate([np.zeros(3), [float(k)]])
    # LP: maximize d subject to P c = 0, sum c = k, c_i - d >= 0
    lp = linprog(np.concatenate([np.zeros(k), [-1.0]]),
                 A_ub=np.hstack([-np.eye(k), np.ones((k, 1))]), b_ub=np.zeros(k),
                 A_eq=np.hstack([A, np.zeros((4, 1))]), b_eq=rhs,
                 bounds=[(None, None)] * (k + 1), method="highs")
    if lp.status != 0 or -lp.fun <= 1e-12:
        margin = float(-lp.fun) if lp.status == 0 else float("nan")
        raise ClosureInfeasible(f"no positive closing coefficients (best min c_i = {margin:.3g})")
    c = np.linalg.lstsq(A, rhs, rcond=None)[0]
    if c.min() <= 0:
        c = lp.x[:k]
    # polish onto the null space of P
    _, _, Vt = np.linalg.svd(P)
    N = Vt[3:].T
    c = N @ (N.T @ c)
    c = c / c[0]
    return ClosureSolution(c, P, float(np.linalg.norm(P @ c)), float(-lp.fun))


def integrate_curve(rho, T_samples, name="constructed", params=None, gap_tol=1e-8):
    """``G(t) = int_0^t rho T`` by spectral integration of uniform samples."""
    v = np.asarray(rho, dtype=float)[:, None] * np.asarray(T_samples, dtype=float)
    n = len(v)
    gap = float(np.linalg.norm(v.mean(axis=0))) * TWO_PI
    if gap >= gap_tol:
        raise ClosureFailure(f"closure gap {gap:.3e} >= {gap_tol:.0e}")
    a = fourier_coefficients(v, trim=0)
    if n % 2 == 0:
        a = a[:-1]  # drop the Nyquist cosine, which has no periodic antiderivative in this basis
    k = np.arange(len(a))
    coef = np.zeros_like(a)
    coef[1:] = a[1:] / (1j * k[1:, None])
    coef[0] = -coef[1:].sum(axis=0).real
    scale = np.abs(coef).max()
    big = np.flatnonzero(np.abs(coef).max(axis=1) > 1e-16 * scale)
    curve = FourierCurve(coef[: big[-1] + 1], name=name, params=params)
    curve.closure_gap = gap
    return curve


# ---- the full pipeline -----------------------------------------------------


@dataclass
class Example2:
    curve: FourierCurve
    normal: SphericalLoop
    tangent: TangentField
    framed: FramedCurve
    basis: BumpBasis
    closure: ClosureSolution
    hull: HullResult
    provenance: dict = field(default_factory=dict)


@functools.lru_cache(maxsize=8)
def _build(sigma, anchors, exponent, offset, n, max_exponent):
    loop = example2_normal(sigma)
    tangent, _ = tangent_from_normal(loop, n)
    T = tangent.grid(n, 0)[0]
    hull = hull_contains_origin(T)
    tried = []
    e = int(exponent)
    while True:
        tried.append(e)
        basis = BumpBasis(tuple(anchors), e, float(offset))
        try:
            sol = closure_coefficients(T, basis)
            break
        except ClosureInfeasible:
            # sharper bumps concentrate the moments at T(t_i)
            if 2 * e > max_exponent:
                raise
            e *= 2
    rho = sol.coefficients @ basis.values(uniform_grid(n))
    params = {"sigma": sigma, "anchors": list(anchors), "exponent": e, "offset": offset}
    curve = integrate_curve(rho, T, name="example2", params=params)
    framed = FramedCurve(curve, loop, strict=True)
    prov = {
        "sigma": sigma,
        "anchors": [float(a) for a in anchors],
        "offset": float(offset),
        "exponents_tried": tried,
        "exponent": e,
        "coefficients": [float(c) for c in sol.coefficients],
        "closure_residual": sol.residual,
        "closure_gap": curve.closure_gap,
        "hull_margin": hull.margin,
        "min_rho": float(rho.min()),
        "grid": n,
        "fourier_modes": curve.modes,
    }
    return Example2(curve, loop, tangent, framed, basis, sol, hull, prov)


def build_example2(sigma=0.22, anchors=DEFAULT_ANCHORS, exponent=10, offset=1.1, n=GRID, max_exponent=160):
    """Spherical loop -> tangent -> closing coefficients -> curve.

    Starts at ``exponent`` and doubles it while no positive closing
    combination exists, up to ``max_exponent``.
    """
    return _build(float(sigma), tuple(float(a) for a in anchors), int(exponent), float(offset), int(n),
                  int(max_exponent))
