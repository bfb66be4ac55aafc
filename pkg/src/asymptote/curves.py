"""Closed space curves: analytic built-ins, trigonometric fits, quadrature.

Every curve is parametrized over ``[0, 2pi)`` and exposes position and
derivatives up to order three with respect to the raw parameter. Nothing
here assumes unit speed.
"""

import json
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import sympy as sp
from scipy.spatial.distance import pdist

from asymptote._numerics import TWO_PI, fold_spectrum, uniform_grid
from asymptote.errors import InputError, IrregularCurve, QuadratureFailure, UnsupportedOrder

MAX_ORDER = 3


@dataclass(frozen=True)
class CurveJet:
    """Position and raw-parameter derivatives at one or many parameters."""

    position: np.ndarray
    d1: np.ndarray = None
    d2: np.ndarray = None
    d3: np.ndarray = None

    def __getitem__(self, k):
        return (self.position, self.d1, self.d2, self.d3)[k]


def _check_order(order):
    if not 0 <= int(order) <= MAX_ORDER:
        raise UnsupportedOrder(f"derivative order {order} not in 0..{MAX_ORDER}")
    return int(order)


class ClosedCurve(ABC):
    """A regular 2pi-periodic curve in R^3."""

    kind = "abstract"

    def __init__(self, name, params=None):
        self.name = name
        self.params = dict(params or {})
        self._grid_cache = {}

    @abstractmethod
    def _derivs(self, t, order):
        """List ``[pos, d1, ..., d_order]`` of arrays of shape ``t.shape + (3,)``."""

    def jet(self, t, order=3):
        order = _check_order(order)
        t = np.asarray(t, dtype=float)
        return CurveJet(*self._derivs(t, order))

    def grid(self, n, order=3):
        """Derivatives on the uniform grid of ``n`` points (cached)."""
        order = _check_order(order)
        key = (int(n), order)
        if key not in self._grid_cache:
            hit = next((k for k in self._grid_cache if k[0] == n and k[1] >= order), None)
            if hit is not None:
                return self._grid_cache[hit][: order + 1]
            self._grid_cache[key] = self._grid_derivs(int(n), order)
        return self._grid_cache[key]

    def _grid_derivs(self, n, order):
        return self._derivs(uniform_grid(n), order)

    def shifted_grid(self, ns, delta, order=1):
        """Values at ``t_j + delta_x`` for the uniform ``t_j``; arrays of shape (Nx, Ns, 3)."""
        t = uniform_grid(ns)[None, :] + np.asarray(delta, dtype=float)[:, None]
        return self._derivs(t, order)

    def samples(self, n):
        return self.grid(n, 0)[0]

    def speed(self, n=4096):
        return np.linalg.norm(self.grid(n, 1)[1], axis=1)

    def diameter(self, n=1024):
        return float(pdist(self.samples(n)).max())

    def reversed(self):
        return MappedCurve(self, reverse=True)

    def transformed(self, rotation=None, shift=None, scale=1.0):
        return MappedCurve(self, rotation=rotation, shift=shift, scale=scale)

    def to_spec(self, n=1024):
        """Curve-spec dictionary holding ``n`` uniform samples."""
        return {"kind": "samples", "name": self.name, "points": self.samples(n).tolist()}

    def __repr__(self):
        return f"{type(self).__name__}({self.name!r}, {self.params})"


def evaluate(curve, t, order=3):
    """Jet of ``curve`` at ``t`` (scalar or array)."""
    return curve.jet(t, order)


class AnalyticCurve(ClosedCurve):
    """Curve given by a sympy expression in ``t``; derivatives are exact."""

    kind = "analytic-builtin"

    def __init__(self, name, expr, params=None, symbol=None):
        super().__init__(name, params)
        t = symbol if symbol is not None else sp.Symbol("t", real=True)
        expr = sp.Matrix(expr)
        self.expr = expr
        self._funcs = []
        cur = expr
        for _ in range(MAX_ORDER + 1):
            self._funcs.append([sp.lambdify(t, c, "numpy") for c in cur])
            cur = cur.diff(t)

    def _derivs(self, t, order):
        out = []
        for k in range(order + 1):
            comps = [np.broadcast_to(np.asarray(f(t), dtype=float), t.shape) for f in self._funcs[k]]
            out.append(np.stack(comps, axis=-1))
        return out


class FourierCurve(ClosedCurve):
    """Real trigonometric polynomial ``Re sum_k a_k e^{ikt}``, k = 0..K-1."""

    kind = "fourier"

    def __init__(self, coef, name="fourier", params=None):
        super().__init__(name, params)
        coef = np.asarray(coef, dtype=complex)
        if coef.ndim != 2 or coef.shape[1] != 3:
            raise InputError("Fourier coefficients must have shape (K, 3)")
        self.coef = coef
        self.k = np.arange(coef.shape[0])

    @property
    def modes(self):
        return self.coef.shape[0]

    def _derivs(self, t, order):
        flat = t.reshape(-1)
        out = [np.empty((flat.size, 3)) for _ in range(order + 1)]
        step = max(1, 4_000_000 // max(1, self.modes))
        for lo in range(0, flat.size, step):
            e = np.exp(1j * np.outer(flat[lo : lo + step], self.k))
            for m in range(order + 1):
                out[m][lo : lo + step] = (e @ (self.coef * ((1j * self.k) ** m)[:, None])).real
        return [o.reshape(t.shape + (3,)) for o in out]

    def _grid_derivs(self, n, order):
        out = []
        for m in range(order + 1):
            spec = (self.coef * ((1j * self.k) ** m)[:, None]).T
            out.append((np.fft.ifft(fold_spectrum(spec, n), axis=-1) * n).real.T.copy())
        return out

    def shifted_grid(self, ns, delta, order=1):
        delta = np.asarray(delta, dtype=float)
        phase = np.exp(1j * np.outer(delta, self.k))
        out = []
        for m in range(order + 1):
            c = self.coef * ((1j * self.k) ** m)[:, None]
            comps = []
            for d in range(3):
                spec = fold_spectrum(phase * c[:, d][None, :], ns)
                comps.append((np.fft.ifft(spec, axis=-1) * ns).real)
            out.append(np.stack(comps, axis=-1))
        return out


def fourier_coefficients(samples, trim=1e-15):
    """Coefficients ``a_k`` of the trigonometric interpolant of uniform samples."""
    x = np.asarray(samples, dtype=float)
    n = x.shape[0]
    a = np.fft.rfft(x, axis=0) / n
    a[1 : (n + 1) // 2] *= 2.0
    if n % 2 == 0:
        a[n // 2] = a[n // 2].real
    scale = np.abs(a).max()
    if trim and scale > 0:
        big = np.flatnonzero(np.abs(a).max(axis=1) > trim * scale)
        a = a[: big[-1] + 1]
    return a


def fourier_fit(samples, name="samples", params=None, regular_tol=1e-8):
    """Trigonometric interpolant of samples taken at uniform ``t`` in [0, 2pi)."""
    x = np.asarray(samples, dtype=float)
    if x.ndim != 2 or x.shape[1] != 3:
        raise InputError("samples must be an (N, 3) array")
    n = x.shape[0]
    if n < 16 or n % 2:
        raise InputError(f"sample count must be even and at least 16, got {n}")
    if not np.all(np.isfinite(x)):
        raise InputError("samples contain non-finite values")
    curve = FourierCurve(fourier_coefficients(x), name=name, params=params)
    sp_ = np.linalg.norm(curve.grid(4 * n, 1)[1], axis=1)
    if sp_.max() == 0.0 or sp_.min() <= regular_tol * sp_.max():
        raise IrregularCurve(f"fitted curve is not regular (min |G'| = {sp_.min():.3e})")
    return curve


def spectral_proxy(curve, tol=1e-12, m0=256, max_m=2**15):
    """Trigonometric interpolant of ``curve`` whose dropped tail is below ``tol``.

    Shifted-grid evaluation of a ``FourierCurve`` is a few FFTs, so double
    integrals run on the proxy. Falls back to ``curve`` itself when the
    spectrum has not decayed by ``max_m`` samples.
    """
    if isinstance(curve, FourierCurve):
        return curve
    m = m0
    while m <= max_m:
        a = fourier_coefficients(curve.samples(m), trim=0)
        mag = np.abs(a[1:]).max(axis=1)
        if mag[-(len(mag) // 4):].max() < tol * max(mag.max(), 1e-300):
            return FourierCurve(fourier_coefficients(curve.samples(m)), name=curve.name, params=curve.params)
        m *= 2
    return curve


class MappedCurve(ClosedCurve):
    """Similarity image and/or orientation reversal of another curve."""

    def __init__(self, base, rotation=None, shift=None, scale=1.0, reverse=False):
        super().__init__(base.name + ("-reversed" if reverse else "-mapped"), base.params)
        self.kind = base.kind
        self.base = base
        self.A = float(scale) * (np.eye(3) if rotation is None else np.asarray(rotation, dtype=float))
        self.b = np.zeros(3) if shift is None else np.asarray(shift, dtype=float)
        self.reverse = bool(reverse)

    def _map(self, ds):
        out = []
        for m, d in enumerate(ds):
            if self.reverse and m % 2:
                d = -d
            d = d @ self.A.T
            out.append(d + self.b if m == 0 else d)
        return out

    def _derivs(self, t, order):
        return self._map(self.base._derivs(-t if self.reverse else t, order))

    def _grid_derivs(self, n, order):
        if not self.reverse:
            return self._map(self.base.grid(n, order))
        ds = self.base.grid(n, order)
        return self._map([np.roll(d[::-1], 1, axis=0) for d in ds])


class PushOff(ClosedCurve):
    """The curve ``G + eps * v`` for a unit normal field ``v``."""

    def __init__(self, curve, field, eps):
        super().__init__(f"{curve.name}+eps*{getattr(field, 'name', 'v')}", {"eps": eps})
        self.kind = curve.kind
        self.curve = curve
        self.field = field
        self.eps = float(eps)

    def _derivs(self, t, order):
        g = self.curve._derivs(t, order)
        v = self.field.derivs(t, order)
        return [a + self.eps * b for a, b in zip(g, v)]

    def _grid_derivs(self, n, order):
        g = self.curve.grid(n, order)
        v = self.field.grid(n, order)
        return [a + self.eps * b for a, b in zip(g, v)]

    def shifted_grid(self, ns, delta, order=1):
        g = self.curve.shifted_grid(ns, delta, order)
        v = self.field.shifted_grid(ns, delta, order)
        return [a + self.eps * b for a, b in zip(g, v)]


def integrate_periodic(f, tol=1e-10, n0=64, max_n=2**20):
    """Integral over one period of a smooth 2pi-periodic ``f`` (vectorized).

    Uses the trapezoid rule, doubling the grid until two successive values
    agree to ``tol * max(1, |I|)``.
    """
    return integrate_on_grids(lambda n: f(uniform_grid(n)), tol, n0, max_n)


def integrate_on_grids(values, tol=1e-10, n0=64, max_n=2**20):
    """Like ``integrate_periodic`` but ``values(n)`` supplies samples on the n-point grid."""
    n = n0
    prev = TWO_PI * float(np.mean(values(n)))
    while n < max_n:
        n *= 2
        cur = TWO_PI * float(np.mean(values(n)))
        if abs(cur - prev) < tol * max(1.0, abs(cur)):
            return cur
        prev = cur
    raise QuadratureFailure(f"trapezoid rule did not converge by N={max_n}")


# ---- built-in curves -------------------------------------------------------

_T = sp.Symbol("t", real=True)


def circle(radius=1.0):
    r = sp.nsimplify(radius)
    return AnalyticCurve("circle", [r * sp.cos(_T), r * sp.sin(_T), 0], {"radius": radius}, _T)


def torus_knot(p=2, q=3, R=2.0, r=1.0, wobble=0.15, mirror=False):
    """(p, q) torus knot; ``wobble`` adds ``sin(2qt)`` to the height only.

    The height carries a minus sign, so for the default radii the torsion is
    positive; ``mirror=True`` gives the reflected knot. The wobble leaves the
    projection along the torus axis unchanged and, for the default radii,
    keeps the torsion one-signed.
    """
    p, q = int(p), int(q)
    Rs, rs, ws = (sp.nsimplify(v) for v in (R, r, wobble))
    rad = Rs + rs * sp.cos(q * _T)
    height = rs * sp.sin(q * _T) + ws * sp.sin(2 * q * _T)
    expr = [rad * sp.cos(p * _T), rad * sp.sin(p * _T), height if mirror else -height]
    params = {"p": p, "q": q, "R": R, "r": r, "wobble": wobble, "mirror": bool(mirror)}
    return AnalyticCurve("torus-knot", expr, params, _T)


def kovaleva():
    a = sp.sqrt(sp.Rational(63, 8))
    c = sp.cos(_T)
    expr = [
        (3 + sp.sin(_T)) * sp.cos(a * c),
        (3 + sp.sin(_T)) * sp.sin(a * c),
        sp.sin(2 * _T) + 46 * c - 27 * c**3 + sp.Rational(27, 8) * c**5,
    ]
    return AnalyticCurve("kovaleva", expr, {}, _T)


def figure_eight(lift=0.1):
    """Planar figure-eight ``(sin t, sin 2t / 2)`` lifted by ``lift * sin 3t``."""
    h = sp.nsimplify(lift)
    expr = [sp.sin(_T), sp.sin(2 * _T) / 2, h * sp.sin(3 * _T)]
    return AnalyticCurve("figure-eight", expr, {"lift": lift}, _T)


def convex_lift(a=1.5):
    """Lift of the locally convex ``e^{3it} + a e^{it}`` with positive torsion.

    The height was found by a linear program (torsion is linear in the
    height for a fixed planar shadow); the projection along ``e3`` has no
    inflections and rotation index 3. Torsion is positive only near a = 1.5.
    """
    a = sp.nsimplify(a)
    h = -sp.sin(2 * _T) - sp.Rational(1692, 10000) * sp.sin(4 * _T) + sp.Rational(104, 10000) * sp.sin(6 * _T)
    expr = [sp.cos(3 * _T) + a * sp.cos(_T), sp.sin(3 * _T) + a * sp.sin(_T), h]
    return AnalyticCurve("convex-lift", expr, {"a": float(a)}, _T)


def random_fourier_curve(seed, modes=4, decay=1.0):
    """Seeded band-limited random curve with coefficients decaying like k^-decay."""
    rng = np.random.default_rng(seed)
    coef = np.zeros((modes + 1, 3), dtype=complex)
    for k in range(1, modes + 1):
        coef[k] = (rng.normal(size=3) + 1j * rng.normal(size=3)) / k**decay
    return FourierCurve(coef, name="random-fourier", params={"seed": seed, "modes": modes})


BUILTINS = {
    "circle": circle,
    "torus-knot": torus_knot,
    "kovaleva": kovaleva,
    "figure-eight": figure_eight,
    "convex-lift": convex_lift,
}


def builtin(name, **params):
    if name == "example2":
        from asymptote.construction import build_example2

        return build_example2(**params).curve
    try:
        factory = BUILTINS[name]
    except KeyError:
        raise InputError(f"unknown builtin curve {name!r}; choose from {sorted(BUILTINS) + ['example2']}")
    try:
        return factory(**params)
    except TypeError as exc:
        raise InputError(f"bad parameters for {name}: {exc}")


def load_curve_spec(spec):
    """Build a curve from a spec dict or a path to a JSON spec file."""
    if isinstance(spec, (str, Path)):
        try:
            spec = json.loads(Path(spec).read_text())
        except (OSError, ValueError) as exc:
            raise InputError(f"cannot read curve spec: {exc}")
    if not isinstance(spec, dict):
        raise InputError("curve spec must be a JSON object")
    kind = spec.get("kind")
    if kind == "builtin":
        return builtin(spec.get("name"), **spec.get("params", {}))
    if kind == "samples":
        pts = spec.get("points")
        if pts is None:
            raise InputError("samples spec needs 'points'")
        return fourier_fit(np.asarray(pts, dtype=float), name=spec.get("name", "samples"))
    raise InputError(f"unknown curve spec kind {kind!r}")
