import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.spatial.transform import Rotation

from asymptote import curves, framing, invariants as inv, projection as pj
from asymptote.curves import PushOff
from asymptote.errors import IllConditionedLinking, NoSelfLinking, TheoremViolation

E3 = [0.0, 0.0, 1.0]
# quarter turn about e1 maps the xy-plane onto the xz-plane
XZ = Rotation.from_rotvec([np.pi / 2, 0, 0]).as_matrix()

# [DERIVED] writhe of the default (2,3) torus knot, adaptive Gauss integral
WRITHE_TORUS23 = 3.4105688


def brute_writhe(curve, N=1000):
    """Midpoint double sum of the Gauss integrand with the diagonal dropped."""
    t = np.linspace(0, 2 * np.pi, N, endpoint=False)
    X, D = curve.jet(t, 1)[:2]
    total = 0.0
    for i in range(N):
        r = X[i] - X
        den = np.linalg.norm(r, axis=1) ** 3
        den[i] = np.inf
        total += np.sum(np.einsum("ij,ij->i", np.cross(D[i], D), r) / den)
    return total * (2 * np.pi / N) ** 2 / (4 * np.pi)


@pytest.fixture(scope="module")
def torus():
    c = curves.torus_knot()
    return framing.FramedCurve(c, framing.asymptotic_normal(c))


def test_hopf_link():
    a = curves.circle()
    b = a.transformed(XZ, shift=[1, 0, 0])
    lk = inv.linking_gauss(a, b)
    assert abs(lk.integer) == 1 and lk.residual < 1e-6
    assert inv.linking_gauss(a, b.reversed()).integer == -lk.integer
    assert inv.linking_gauss(b, a).integer == lk.integer


def test_unlinked_and_touching():
    a = curves.circle()
    assert inv.linking_gauss(a, a.transformed(XZ, shift=[3, 0, 0])).integer == 0
    with pytest.raises(IllConditionedLinking):
        inv.linking_gauss(a, a.transformed(XZ, shift=[2, 0, 0]))


def test_writhe_against_brute_force():
    c = curves.torus_knot()
    w = inv.writhe_gauss(c)
    assert w == pytest.approx(WRITHE_TORUS23, abs=1e-6)
    assert brute_writhe(c) == pytest.approx(w, abs=1e-5)
    assert inv.writhe_gauss(curves.torus_knot(mirror=True)) == pytest.approx(-w, abs=1e-6)


def test_planar_writhe_vanishes():
    assert inv.writhe_gauss(curves.circle()) == pytest.approx(0.0, abs=1e-10)


def test_writhe_monte_carlo():
    mean, err = inv.writhe_average(curves.torus_knot(), n_dirs=300, seed=1)
    assert abs(mean - WRITHE_TORUS23) < 4 * err


def test_calugareanu(torus):
    c, n = torus.curve, torus.normal
    lk = inv.linking_of_framing(c, n, u=E3)
    tw = inv.twist(c, n)
    assert lk == 6
    assert inv.writhe_gauss(c) + tw == pytest.approx(lk, abs=1e-4)
    assert inv.twist_via_frame(torus, n) == pytest.approx(tw, abs=1e-8)


@pytest.mark.parametrize("m", [-2, 1, 3])
def test_rotated_field_shifts_linking(torus, m):
    assert inv.link2_check(torus, m, lk_n=6)[0] == 0


def test_theorem1_torus(torus):
    for d, _ in pj.admissible_directions(torus.curve, 5, seed=3, framed=torus):
        res = inv.theorem1_both_sides(torus, d, lhs=6)
        assert res.holds and res.rhs == res.rhs_signed


def test_theorem1_violation_detected(torus, monkeypatch):
    monkeypatch.setattr(pj, "_crossing_sign", lambda a, b: -int(np.sign(a[0] * b[1] - a[1] * b[0])))
    with pytest.raises(TheoremViolation):
        inv.theorem1_both_sides(torus, E3, lhs=6)


def test_kovaleva_signed_count():
    c = curves.kovaleva()
    fr = framing.FramedCurve(c, framing.asymptotic_normal(c, strict=False), strict=False)
    res = inv.theorem1_both_sides(fr, E3, strict=False)
    assert res.lhs == -1 and res.rhs is None
    assert res.rhs_signed == -1 and res.crossing_number == 0 and res.zeros == 2


def test_self_linking_and_banchoff():
    c = curves.torus_knot()
    sl = inv.self_linking(c)
    assert sl.value == 6
    b = inv.banchoff_check(c, E3, sl=sl.value)
    assert b.residual == 0 and b.crossing_number == 3 and b.inflections == 6
    with pytest.raises(NoSelfLinking):
        inv.self_linking(curves.figure_eight())


def test_crofton_milnor():
    res = inv.crofton_milnor_check(curves.torus_knot(), n_dirs=2000, seed=0)
    assert abs(res.mc_average - res.length_over_pi) < 4 * res.stderr
    assert res.tau_identity_residual < 1e-8


def test_spherical_checks_torus(torus):
    sc = inv.spherical_checks(torus)
    assert sc.kappa_kappa_residual < 1e-8
    assert sc.flags["fenchel"] and sc.flags["kappa_tau"]
    assert not sc.injective and sc.area is None


def test_petrunin_on_convex_lift():
    c = curves.convex_lift()
    fr = framing.FramedCurve(c, framing.asymptotic_normal(c))
    res = inv.petrunin_identity_check(fr, E3)
    assert res.residual < 1e-10
    assert res.printed_form_residual > 0.1


@settings(max_examples=6)
@given(st.lists(st.floats(-3, 3), min_size=3, max_size=3), st.floats(0.2, 4.0))
def test_similarity_invariance(rotvec, scale):
    """Lk, Wr and Tw ignore rotations and scaling."""
    R = Rotation.from_rotvec(rotvec).as_matrix()
    c = curves.torus_knot().transformed(R, shift=[0.5, -1, 2], scale=scale)
    n = framing.asymptotic_normal(c)
    assert inv.linking_gauss(c, PushOff(c, n, inv.push_eps(c))).integer == 6
    assert inv.writhe_gauss(c) == pytest.approx(WRITHE_TORUS23, abs=1e-5)
    assert inv.twist(c, n) == pytest.approx(6 - WRITHE_TORUS23, abs=1e-5)


def test_reversal():
    """Reversing the curve keeps Lk(G, n) and Wr."""
    c = curves.torus_knot().reversed()
    n = framing.asymptotic_normal(c)
    assert inv.linking_gauss(c, PushOff(c, n, inv.push_eps(c))).integer == 6
    assert inv.writhe_gauss(c) == pytest.approx(WRITHE_TORUS23, abs=1e-6)
