import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from asymptote import curves, framing, projection as pj
from asymptote.errors import InputError

E3 = [0.0, 0.0, 1.0]


def match_oracle(crossings, oracle, tol=2e-3):
    """Pair refined crossings with polyline ones by parameters and sign."""
    left = list(oracle)
    for c in crossings:
        key = sorted((c.t_plus, c.t_minus))
        hit = [k for k, (a, b, s) in enumerate(left)
               if np.allclose(sorted((a, b)), key, atol=tol) and s == c.sign]
        if not hit:
            return False
        left.pop(hit[0])
    return not left


@given(st.lists(st.floats(-1, 1), min_size=3, max_size=3).filter(lambda v: np.linalg.norm(v) > 1e-3))
def test_direction_basis_right_handed(v):
    d = pj.direction(v)
    M = np.stack([d.e1, d.e2, d.u])
    np.testing.assert_allclose(M @ M.T, np.eye(3), atol=1e-12)
    assert np.linalg.det(M) == pytest.approx(1.0)


@pytest.mark.parametrize("bad", [[0, 0, 0], [1, 2], [np.nan, 0, 1]])
def test_bad_direction(bad):
    with pytest.raises(InputError):
        pj.direction(bad)


def test_torus_axis_crossings():
    c = curves.torus_knot()
    cr = pj.self_crossings(pj.project(c, E3))
    assert len(cr) == 3 and all(x.sign == 1 for x in cr)
    assert match_oracle(cr, pj.polyline_crossings(c, E3))
    assert pj.crossing_number(pj.project(curves.torus_knot(mirror=True), E3)) == -3


def test_kovaleva_axis_crossings():
    c = curves.kovaleva()
    cr = pj.self_crossings(pj.project(c, E3))
    assert sum(x.sign for x in cr) == 0
    assert match_oracle(cr, pj.polyline_crossings(c, E3))


@settings(max_examples=8)
@given(st.integers(0, 2**31 - 1))
def test_crossings_agree_with_polyline(seed):
    c = curves.torus_knot(2, 5, 2.0, 0.5, 0.0)
    d = pj.random_admissible_direction(c, seed=seed)
    cr = pj.self_crossings(pj.project(c, d))
    assert match_oracle(cr, pj.polyline_crossings(c, d))


def test_crossing_sign_antisymmetric():
    a, b = np.array([1.0, 0.2]), np.array([-0.3, 1.0])
    assert pj._crossing_sign(a, b) == -pj._crossing_sign(b, a) == 1


def test_rotation_and_inflections():
    f8 = pj.project(curves.figure_eight(), E3)
    assert pj.rotation_index(f8) == 0
    np.testing.assert_allclose(pj.planar_inflections(f8), [0.0, np.pi], atol=1e-10)
    assert pj.rotation_index(pj.project(curves.circle(), E3)) == 1
    assert pj.rotation_index(pj.project(curves.circle(), [0, 0, -1])) == -1
    assert pj.rotation_index(pj.project(curves.torus_knot(), E3)) == 2
    cl = pj.project(curves.convex_lift(), E3)
    assert pj.rotation_index(cl) == 3 and len(pj.planar_inflections(cl)) == 0


def test_starshaped():
    r = pj.locally_starshaped(pj.project(curves.circle(), E3))
    assert r.found and np.hypot(*r.witness) < 1e-12
    # witness checked against every tangent line of a dense independent sample
    proj = pj.project(curves.torus_knot(), E3)
    r = pj.locally_starshaped(proj)
    assert r.found
    P, D = proj.grid(1 << 16, 1)
    g = (P[:, 0] - r.witness[0]) * D[:, 1] - (P[:, 1] - r.witness[1]) * D[:, 0]
    assert np.all(g > 0) or np.all(g < 0)
    assert not pj.locally_starshaped(pj.project(curves.convex_lift(), E3)).found


def test_kovaleva_zeros_are_shadow_inflections():
    """The e3 part of G' x G'' is the planar curvature numerator of the e3 shadow."""
    c = curves.kovaleva()
    fr = framing.FramedCurve(c, framing.asymptotic_normal(c, strict=False), strict=False)
    z = pj.normal_direction_zeros(fr, E3)
    np.testing.assert_allclose(z.roots, pj.planar_inflections(pj.project(c, E3)), atol=1e-9)
    np.testing.assert_allclose(z.roots, [3.48142956, 5.9433484], atol=1e-7)
    assert list(z.tau_signs) == [-1, -1]


def test_tangent_direction_not_admissible():
    ok, reason, _ = pj.check_admissible(curves.circle(), [1.0, 0.0, 0.0])
    assert not ok and "tangent" in reason


def test_admissible_directions_deterministic():
    c = curves.torus_knot()
    a = [d.as_list() for d, _ in pj.admissible_directions(c, 4, seed=7)]
    b = [d.as_list() for d, _ in pj.admissible_directions(c, 4, seed=7)]
    assert a == b


def test_ribbon_crossings_split():
    c = curves.torus_knot()
    n = framing.asymptotic_normal(c)
    rc = pj.ribbon_crossings(c, n, E3)
    assert rc.consistent
    assert rc.self_crossing_number == 3 and rc.linking == 6
