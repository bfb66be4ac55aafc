import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from asymptote import construction as C, projection as pj
from asymptote._numerics import uniform_grid
from asymptote.curves import integrate_periodic
from asymptote.errors import ClosureFailure, ClosureInfeasible, ImaginaryComponent, NotImmersed

# [DERIVED] closing coefficients at sigma = 0.22 after doubling the bump exponent to 20
COEFFICIENTS = [1.0, 1.0, 0.18184297865, 0.18184297865, 0.74374366961]
HULL_MARGIN = 0.29811233
CUSPS = [3.57250196, 5.852276]


@pytest.fixture(scope="module")
def ex2():
    return C.build_example2()


def toy_tangent(n=1024, h=0.7):
    """Unit loop whose quarter-turn symmetry (with z -> -z) has no fixed vector."""
    t = uniform_grid(n)
    T = np.stack([np.cos(t), np.sin(t), h * np.cos(2 * t)], 1)
    return T / np.linalg.norm(T, axis=1, keepdims=True)


@pytest.mark.parametrize("sigma", [0.0, -0.1, 0.25, 0.3])
def test_sigma_out_of_range(sigma):
    with pytest.raises(ImaginaryComponent):
        C.example2_normal(sigma)


@settings(max_examples=4)
@given(st.floats(0.01, 0.249))
def test_loop_on_sphere_and_tangent_orthogonality(sigma):
    loop = C.example2_normal(sigma)
    t = np.linspace(0, 2 * np.pi, 23)
    n0, n1 = loop.derivs(t, 1)[:2]
    np.testing.assert_allclose(np.linalg.norm(n0, axis=1), 1.0, atol=1e-13)
    T = C.TangentField(loop).derivs(t, 1)
    np.testing.assert_allclose(np.linalg.norm(T[0], axis=1), 1.0, atol=1e-13)
    np.testing.assert_allclose(np.einsum("ij,ij->i", T[0], n0), 0.0, atol=1e-13)
    np.testing.assert_allclose(np.einsum("ij,ij->i", T[0], n1), 0.0, atol=1e-12)
    # <T', n> = -<T, n'> = 0: every closed rho T is asymptotic for n
    np.testing.assert_allclose(np.einsum("ij,ij->i", T[1], n0), 0.0, atol=1e-11)


def test_great_circle_tangent_is_constant():
    loop = C.SphericalLoop(["cos(t)", "sin(t)", "0"])
    T, speed = C.tangent_from_normal(loop, 256)
    np.testing.assert_allclose(T.grid(256, 0)[0], np.tile([0, 0, 1.0], (256, 1)), atol=1e-14)
    np.testing.assert_allclose(speed, 1.0)
    assert C.hull_contains_origin(T.grid(256, 0)[0]).degenerate


def test_stationary_loop_rejected():
    with pytest.raises(NotImmersed):
        C.tangent_from_normal(C.SphericalLoop(["cos(sin(t))", "sin(sin(t))", "0"]), 256)


def test_hull_octahedron():
    P = np.vstack([np.eye(3), -np.eye(3)])
    h = C.hull_contains_origin(P)
    assert h.inside and not h.degenerate
    assert h.margin == pytest.approx(1 / np.sqrt(3), abs=1e-12)
    assert h.support_margin == pytest.approx(1 / np.sqrt(3), abs=1e-8)


def test_hull_small_cap_and_great_circle():
    t = uniform_grid(200)
    cap = np.stack([0.2 * np.cos(t), 0.2 * np.sin(t), np.full_like(t, np.sqrt(0.96))], 1)
    cap = np.vstack([cap, [0, 0, 1.0]])
    h = C.hull_contains_origin(cap)
    assert not h.inside and h.margin < 0 and h.support_margin < 0
    ring = np.stack([np.cos(t), np.sin(t), np.zeros_like(t)], 1)
    assert C.hull_contains_origin(ring).degenerate


def test_bump_basis_normalized():
    b = C.BumpBasis(exponent=20)
    for k in range(5):
        assert integrate_periodic(lambda t: b.values(t)[k]) == pytest.approx(1.0, abs=1e-13)
    assert b.values(uniform_grid(64)).min() > 0


def test_symmetric_toy_closes_with_equal_coefficients():
    sol = C.closure_coefficients(toy_tangent(), anchors=(0, np.pi / 2, np.pi, 3 * np.pi / 2))
    np.testing.assert_allclose(sol.coefficients, 1.0, atol=1e-12)
    assert sol.residual < 1e-13


@pytest.mark.parametrize("exponent", [10, 80])
def test_one_sided_anchors_infeasible(exponent):
    with pytest.raises(ClosureInfeasible):
        C.closure_coefficients(toy_tangent(), anchors=(0, 0.3, 0.6, 0.9), exponent=exponent)


def test_integrate_circle():
    t = uniform_grid(128)
    T = np.stack([-np.sin(t), np.cos(t), np.zeros_like(t)], 1)
    c = C.integrate_curve(np.ones(128), T)
    s = np.linspace(0, 6, 9)
    np.testing.assert_allclose(c.jet(s, 0).position, np.stack([np.cos(s) - 1, np.sin(s), 0 * s], 1), atol=1e-14)


def test_example2_frozen(ex2):
    p = ex2.provenance
    assert p["exponents_tried"] == [10, 20]
    np.testing.assert_allclose(p["coefficients"], COEFFICIENTS, rtol=1e-9)
    assert p["closure_gap"] < 1e-12 and p["min_rho"] > 0
    assert ex2.hull.inside and ex2.hull.margin == pytest.approx(HULL_MARGIN, abs=1e-7)
    assert ex2.hull.support_margin == pytest.approx(ex2.hull.margin, abs=1e-7)
    assert ex2.framed.tau_sign == 1


def test_example2_exponent10_infeasible():
    with pytest.raises(ClosureInfeasible):
        C.build_example2(max_exponent=10)


def test_perturbed_coefficient_fails_to_close(ex2):
    c = np.array(ex2.closure.coefficients)
    c[4] *= 1.01
    n = C.GRID
    rho = c @ ex2.basis.values(uniform_grid(n))
    with pytest.raises(ClosureFailure):
        C.integrate_curve(rho, ex2.tangent.grid(n, 0)[0])


def test_tangent_cusps_are_shadow_inflections(ex2):
    cusps = C.tangent_cusps(ex2.normal)
    np.testing.assert_allclose(cusps, CUSPS, atol=1e-7)
    np.testing.assert_allclose(pj.planar_inflections(pj.project(ex2.curve, [0, 0, 1])), cusps, atol=1e-7)
