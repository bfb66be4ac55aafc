"""Linking, writhe, twist, self-linking and the identity checks built on them."""

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from asymptote import kernels
from asymptote._numerics import TWO_PI, det2, det3, dot, uniform_grid, uniform_sphere, wrap
from asymptote.curves import PushOff, integrate_on_grids, integrate_periodic, spectral_proxy
from asymptote.errors import (
    IllConditionedLinking,
    InapplicableDirection,
    InconsistencyError,
    InflectionPoint,
    InputError,
    InvalidFraming,
    NoSelfLinking,
    QuadratureFailure,
    ResolutionFailure,
    TheoremViolation,
)
from asymptote.framing import (
    GRID,
    FramedCurve,
    asymptotic_normal,
    binormal_field,
    direction_perp_field,
    perp_field,
    principal_normal_field,
    spherical_image_injective,
)
from asymptote.projection import (
    PlanarProjection,
    admissible_directions,
    check_admissible,
    crossing_number,
    direction,
    normal_direction_zeros,
    planar_inflections,
    ribbon_crossings,
    self_crossings,
)

# ---- Gauss double integrals ------------------------------------------------


def _gauss_double(c1, c2, ns, nx):
    """(1/4pi) * double integral of det(G1', G2', G1 - G2)/|G1 - G2|^3.

    The inner variable is ``t = s + phi(xi)`` with ``phi(xi) = xi - sin xi``,
    which clusters nodes cubically at ``t = s`` where the integrand is
    nearly singular (push-offs) or has a kink (writhe).
    """
    c1, c2 = spectral_proxy(c1), spectral_proxy(c2)
    xi = uniform_grid(nx)
    phi = xi - np.sin(xi)
    w = (1.0 - np.cos(xi)) * (TWO_PI / nx)
    a, da = c1.grid(ns, 1)
    b, db = c2.shifted_grid(ns, phi, 1)
    b = np.ascontiguousarray(b.transpose(1, 0, 2))
    db = np.ascontiguousarray(db.transpose(1, 0, 2))
    return kernels.gauss_sum(a, da, b, db, w) * (TWO_PI / ns) / (4.0 * np.pi)


def gauss_integral(c1, c2, tol=1e-4, n0=128, max_n=2048):
    """Refine the Gauss integral by grid doubling; returns ``(value, n, change)``."""
    n = n0
    prev = _gauss_double(c1, c2, n, n)
    while n < max_n:
        n *= 2
        cur = _gauss_double(c1, c2, n, n)
        if abs(cur - prev) < tol:
            return cur, n, abs(cur - prev)
        prev = cur
    raise QuadratureFailure(f"Gauss integral not converged at N={max_n} (last change {abs(cur - prev):.2e})")


@dataclass
class LinkResult:
    value: float
    integer: int
    residual: float
    n: int

    def __int__(self):
        return self.integer


def linking_gauss(c1, c2, tol=1e-4, accept=0.01, max_n=2048):
    """Linking number of two disjoint closed curves by the Gauss integral."""
    A, B = c1.samples(GRID), c2.samples(GRID)
    diam = float(np.ptp(np.concatenate([A, B]), axis=0).max())
    dmin = float(cKDTree(A).query(B)[0].min())
    if dmin < 1e-6 * diam:
        raise IllConditionedLinking(f"curves nearly touch (distance {dmin:.2e})")
    n = 128
    prev = _gauss_double(c1, c2, n, n)
    while True:
        n *= 2
        cur = _gauss_double(c1, c2, n, n)
        k = int(np.rint(cur))
        if abs(cur - prev) < tol and abs(cur - k) < accept:
            return LinkResult(cur, k, abs(cur - k), n)
        if n >= max_n:
            raise QuadratureFailure(f"linking integral {cur:.6f} not resolved to an integer at N={n}")
        prev = cur


def push_eps(curve):
    return 1e-3 * curve.diameter()


def linking_of_framing(curve, v, u=None, eps=None, check=True):
    """``Lk(G, G + eps v)`` by the Gauss integral, cross-checked by crossings.

    With a direction ``u`` the crossing count ``Cr(G_u) + Cr_local/2`` must
    agree with the integral.
    """
    eps = push_eps(curve) if eps is None else eps
    lk = linking_gauss(curve, PushOff(curve, v, eps))
    if u is not None and check:
        rib = ribbon_crossings(curve, v, u, eps=eps)
        by_cr = rib.total / 2
        if by_cr != lk.integer:
            raise InconsistencyError(f"Gauss linking {lk.value:.4f} vs crossing count {by_cr}")
    return lk.integer


def writhe_gauss(curve, tol=1e-4, max_n=2048):
    return gauss_integral(curve, curve, tol=tol, max_n=max_n)[0]


def writhe_average(curve, n_dirs=2000, seed=0, n=GRID):
    """Monte Carlo mean of ``Cr(G_u)`` over admissible directions; ``(mean, stderr)``."""
    if n_dirs < 100:
        raise InputError("writhe_average needs at least 100 directions")
    crs = np.array([sum(c.sign for c in cr) for _, cr in admissible_directions(curve, n_dirs, seed, n=n)],
                   dtype=float)
    return float(crs.mean()), float(crs.std(ddof=1) / np.sqrt(n_dirs))


# ---- twist and rotation ----------------------------------------------------


def _check_field(curve, v, n=1024):
    t = uniform_grid(n)
    vv = v.derivs(t, 0)[0]
    T = curve._derivs(t, 1)[1]
    T = T / np.linalg.norm(T, axis=1, keepdims=True)
    if np.abs(np.linalg.norm(vv, axis=1) - 1).max() > 1e-8 or np.abs(dot(vv, T)).max() > 1e-8:
        raise InvalidFraming(f"{getattr(v, 'name', 'v')} is not a unit normal field")


def twist(curve, v, tol=1e-10):
    """``(1/2pi) int <(v x T)', v>``, i.e. ``(1/2pi) int det(v', T, v) dt``."""
    _check_field(curve, v)

    def f(t):
        g = curve._derivs(t, 1)
        vv = v.derivs(t, 1)
        T = g[1] / np.linalg.norm(g[1], axis=1, keepdims=True)
        return det3(vv[1], T, vv[0])

    return integrate_periodic(f, tol=tol) / TWO_PI


def rotation_of_field(curve, v, normal, n=GRID, max_n=2**18):
    """Integer turns of ``v`` relative to ``normal`` in the frame ``(n_perp, n)``."""
    while True:
        t = uniform_grid(n)
        vv = v.derivs(t, 0)[0]
        nn = normal.derivs(t, 0)[0]
        T = curve._derivs(t, 1)[1]
        T = T / np.linalg.norm(T, axis=1, keepdims=True)
        th = np.arctan2(dot(vv, nn), dot(vv, np.cross(nn, T)))
        steps = wrap(np.diff(np.concatenate([th, th[:1]])))
        if np.abs(steps).max() < np.pi / 2:
            return int(np.rint(steps.sum() / TWO_PI))
        if n >= max_n:
            raise ResolutionFailure("field rotates too fast for the maximal grid")
        n *= 2


def tau_integral(framed, tol=1e-10):
    """``int tau_g ds``."""
    return integrate_periodic(lambda t: framed.quantities(t)["tau_g"] * framed.quantities(t)["speed"], tol=tol)


def twist_via_frame(framed, v, tol=1e-10):
    """``(1/2pi) int tau_g ds + Rot(v, n)``."""
    return tau_integral(framed, tol) / TWO_PI + rotation_of_field(framed.curve, v, framed.normal)


# ---- Theorem 1 -------------------------------------------------------------


@dataclass
class Theorem1:
    lhs: int
    rhs: int
    rhs_signed: int
    crossing_number: int
    zeros: int
    tau_sign: int
    lk_value: float = float("nan")

    @property
    def holds(self):
        return self.rhs is not None and self.lhs == self.rhs


def theorem1_rhs(framed, u, crossings=None):
    """Right-hand side pieces for direction ``u``.

    Returns ``(rhs, rhs_signed, Cr, zeros)``. ``rhs`` uses one global sign of
    ``tau_g`` and is ``None`` when that sign is not constant; ``rhs_signed``
    sums ``sign tau_g`` over the zeros individually.
    """
    d = direction(u)
    proj = PlanarProjection(framed.curve, d)
    cr = crossing_number(proj, crossings=crossings if crossings is not None else self_crossings(proj))
    z = normal_direction_zeros(framed, d)
    rhs = None if framed.tau_sign == 0 else cr + z.count * framed.tau_sign // 2
    return rhs, cr + z.signed_sum() // 2, cr, z.count


def theorem1_both_sides(framed, u, lhs=None, strict=True):
    """Linking number of ``(G, n)`` and the crossing/zero count for ``u``."""
    if lhs is None:
        lk = linking_gauss(framed.curve, PushOff(framed.curve, framed.normal, push_eps(framed.curve)))
        lhs, val = lk.integer, lk.value
    else:
        val = float("nan")
    rhs, rhs_signed, cr, zeros = theorem1_rhs(framed, u)
    res = Theorem1(lhs, rhs, rhs_signed, cr, zeros, framed.tau_sign, val)
    if strict and not res.holds:
        raise TheoremViolation(f"Lk = {lhs} but Cr + zeros term = {rhs} (u = {direction(u).as_list()})")
    return res


# ---- self-linking ----------------------------------------------------------


@dataclass
class SelfLinking:
    value: int
    by_crossings: int
    by_gauss: int
    by_writhe: float
    direction: list


def _frenet_framed(curve):
    g = curve.grid(GRID, 2)
    k = np.linalg.norm(np.cross(g[1], g[2]), axis=1) / np.linalg.norm(g[1], axis=1) ** 3
    if k.min() <= 1e-6 * k.max():
        raise NoSelfLinking("curve has inflections")
    try:
        n = asymptotic_normal(curve, strict=False)
    except Exception as exc:
        raise NoSelfLinking(str(exc))
    # a sign change of G' x G'' between grid points is an inflection the grid missed
    if getattr(n, "flip_count", 0):
        raise NoSelfLinking(f"curve has inflections ({n.flip_count} binormal flips)")
    framed = FramedCurve(curve, n, strict=False)
    if framed.tau_sign == 0:
        raise NoSelfLinking("torsion is not one-signed")
    return framed


def self_linking(curve, u=None, seed=0):
    """Self-linking number by three routes, which must agree."""
    framed = _frenet_framed(curve)
    if u is None:
        u = admissible_directions(curve, 1, seed, framed)[0][0]
    rhs, _, _, _ = theorem1_rhs(framed, u)
    lk = linking_gauss(curve, PushOff(curve, principal_normal_field(curve), push_eps(curve))).integer
    wr_tw = writhe_gauss(curve) + tau_integral(framed) / TWO_PI
    if not (rhs == lk == int(np.rint(wr_tw))) or abs(wr_tw - lk) > 1e-3:
        raise InconsistencyError(f"self-linking routes disagree: {rhs}, {lk}, {wr_tw:.6f}")
    return SelfLinking(lk, rhs, lk, wr_tw, direction(u).as_list())


@dataclass
class Banchoff:
    residual: int
    crossing_number: int
    inflections: int
    binormal_zeros: int
    tau_sign: int


def banchoff_check(curve, u, sl=None, framed=None):
    """``SL - Cr - (1/2) Inflection(G_u) sign(tau)``; should vanish."""
    framed = framed or _frenet_framed(curve)
    sl = self_linking(curve).value if sl is None else sl
    proj = PlanarProjection(curve, u)
    cr = crossing_number(proj)
    infl = len(planar_inflections(proj))
    zeros = normal_direction_zeros(framed, u).count
    return Banchoff(sl - cr - infl * framed.tau_sign // 2, cr, infl, zeros, framed.tau_sign)


# ---- Crofton / Milnor ------------------------------------------------------


@dataclass
class Crofton:
    mc_average: float
    stderr: float
    length_over_pi: float
    relative_error: float
    tau_identity_residual: float
    abs_tau_integral: float


def crofton_milnor_check(curve, n_dirs=2000, seed=0, n=8192):
    """Average count of zeros of ``<u, B>`` against ``Length(B)/pi``."""
    framed = _frenet_framed(curve)
    B = framed.normal.grid(n, 0)[0]
    rng = np.random.default_rng(seed)
    U = uniform_sphere(rng, n_dirs)
    vals = B @ U.T
    counts = np.sum(np.signbit(vals) != np.signbit(np.roll(vals, -1, axis=0)), axis=0)
    length = integrate_periodic(lambda t: np.linalg.norm(framed.normal.derivs(t, 1)[1], axis=1))
    tau_int = tau_integral(framed)
    abs_tau = integrate_periodic(lambda t: np.abs(framed.quantities(t)["tau_g"]) * framed.quantities(t)["speed"])
    mc = float(counts.mean())
    return Crofton(mc, float(counts.std(ddof=1) / np.sqrt(n_dirs)), length / np.pi,
                   abs(mc - length / np.pi) / (length / np.pi),
                   abs(2 * tau_int - 2 * framed.tau_sign * length), abs_tau)


# ---- spherical image -------------------------------------------------------


@dataclass
class SphericalChecks:
    int_kt: float
    int_kappa_g: float
    int_tau_g: float
    int_kappa: float
    length: float
    kappa_kappa_residual: float
    kappa_kappa_printed_residual: float
    injective: bool
    area: float = None
    area_by_pole: float = None
    flags: dict = field(default_factory=dict)
    skipped: str = ""


def _pole_area(framed, n=1 << 15):
    """Area of the region left of ``n(t)``, integrated about the north pole.

    Only valid when the spherical curve avoids both poles' neighbourhoods in
    the sense used here: it must stay in the open upper hemisphere.
    """
    v = framed.normal.grid(n, 1)
    x, dx = v[0], v[1]
    if x[:, 2].min() <= 0:
        return None
    dphi = (x[:, 0] * dx[:, 1] - x[:, 1] * dx[:, 0]) / (x[:, 0] ** 2 + x[:, 1] ** 2)
    cap = float(np.mean((1 - x[:, 2]) * dphi) * TWO_PI)
    # counter-clockwise (seen from outside) around the pole encloses the cap
    return cap if cap > 0 else 4 * np.pi + cap


def spherical_checks(framed, injectivity=None, tol=1e-10):
    """Integral identities and inequalities for the spherical image ``n(G)``."""

    def q(t):
        return framed.quantities(t)

    def kt_density(t):
        d = q(t)
        n0, n1, n2 = d["nn"]
        return dot(n2, np.cross(n0, n1)) / dot(n1, n1)

    int_kt = integrate_periodic(kt_density, tol=tol)
    int_kg = integrate_periodic(lambda t: q(t)["kappa_g"] * q(t)["speed"], tol=tol)
    int_tg = integrate_periodic(lambda t: q(t)["tau_g"] * q(t)["speed"], tol=tol)

    def kappa_density(n):
        # |T'| has corners where the curvature vanishes, so grids are cheaper than points
        g = framed.curve.grid(n, 2)
        return np.linalg.norm(np.cross(g[1], g[2]), axis=1) / dot(g[1], g[1])

    int_k = integrate_on_grids(kappa_density, tol=1e-9)
    length = integrate_periodic(lambda t: np.linalg.norm(framed.normal.derivs(t, 1)[1], axis=1), tol=tol)
    sgn = framed.tau_sign
    res = abs(int_kt - int_kg)
    res_printed = abs(int_kt - sgn * int_kg) if sgn else float("nan")
    inj = injectivity if injectivity is not None else spherical_image_injective(framed.normal)
    out = SphericalChecks(int_kt, int_kg, int_tg, int_k, length, res, res_printed, inj.injective)
    out.flags["fenchel"] = int_k >= TWO_PI - 1e-6
    out.flags["kappa_tau"] = int_kg**2 + int_tg**2 > 4 * np.pi**2
    if not inj.injective:
        out.skipped = "spherical image not injective; area checks skipped"
        return out
    A = TWO_PI - int_kt
    out.area = A
    out.area_by_pole = _pole_area(framed)
    out.flags["area_range"] = 0 < A < 4 * np.pi
    out.flags["gauss_bonnet_bound"] = abs(int_kt) < TWO_PI
    out.flags["isoperimetric"] = length**2 > 4 * np.pi * A - A**2
    return out


# ---- Petrunin --------------------------------------------------------------


@dataclass
class Petrunin:
    residual: float
    printed_form_residual: float


def petrunin_identity_check(framed, u, n=1024):
    """Relative residual of ``-h' <u,n>^2 = tau_g |T x u| <G, u_perp> |G'|``.

    ``h = <G, n>/<u, n>``. The intermediate form with ``<G, T x u>`` is also
    evaluated; it differs from the chain's outer members by a sign.
    """
    u = direction(u).u
    t = uniform_grid(n)
    d = framed.quantities(t)
    G, dG = d["g"][0], d["g"][1]
    nv, dn = d["nn"][0], d["nn"][1]
    un = nv @ u
    if np.abs(un).min() <= 1e-12 or np.signbit(un).any() != np.signbit(un).all():
        raise InapplicableDirection("<u, n> vanishes somewhere")
    hprime = (dot(dG, nv) + dot(G, dn)) / un - dot(G, nv) * (dn @ u) / un**2
    lhs = -hprime * un**2
    T = d["T"]
    uxT = np.cross(u, T)
    uperp = uxT / np.linalg.norm(uxT, axis=1, keepdims=True)
    rhs = d["tau_g"] * np.linalg.norm(uxT, axis=1) * dot(G, uperp) * d["speed"]
    printed = d["tau_g"] * dot(G, np.cross(T, u)) * d["speed"]
    scale = max(np.abs(lhs).max(), np.abs(rhs).max(), 1e-300)
    return Petrunin(float(np.abs(lhs - rhs).max() / scale), float(np.abs(lhs - printed).max() / scale))


# ---- link2 -----------------------------------------------------------------


def link2_check(framed, m, lk_n=None, u=None):
    """``Lk(G, v_m) - Lk(G, n) - m`` with ``v_m = cos(mt) n_perp + sin(mt) n``."""
    from asymptote.framing import rotated_field

    curve = framed.curve
    eps = push_eps(curve)
    if lk_n is None:
        lk_n = linking_gauss(curve, PushOff(curve, framed.normal, eps)).integer
    v = rotated_field(curve, framed.normal, m)
    lk_v = linking_gauss(curve, PushOff(curve, v, eps)).integer
    return lk_v - lk_n - m, lk_v
