import json

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.spatial.transform import Rotation

from asymptote import curves
from asymptote.errors import InputError, IrregularCurve, QuadratureFailure, UnsupportedOrder


def test_circle_jet_exact():
    c = curves.circle(2.0)
    j = c.jet(np.array([0.0, np.pi / 2]))
    np.testing.assert_allclose(j.position, [[2, 0, 0], [0, 2, 0]], atol=1e-15)
    np.testing.assert_allclose(j.d1, [[0, 2, 0], [-2, 0, 0]], atol=1e-15)
    np.testing.assert_allclose(j.d2, [[-2, 0, 0], [0, -2, 0]], atol=1e-15)
    np.testing.assert_allclose(j.d3, [[0, -2, 0], [2, 0, 0]], atol=1e-15)


def test_kovaleva_at_quarter_turn():
    # sin = 1, cos = 0: radius 4, angle 0, height sin(pi) = 0
    p = curves.kovaleva().jet(np.pi / 2, 0).position
    np.testing.assert_allclose(p, [4, 0, 0], atol=1e-14)


def test_torus_knot_mirror_reflects_height():
    a = curves.torus_knot().samples(64)
    b = curves.torus_knot(mirror=True).samples(64)
    np.testing.assert_allclose(a[:, :2], b[:, :2])
    np.testing.assert_allclose(a[:, 2], -b[:, 2])


def test_unsupported_order():
    with pytest.raises(UnsupportedOrder):
        curves.circle().jet(0.0, 4)


@given(st.floats(-50, 50, allow_nan=False))
def test_periodicity(t):
    c = curves.kovaleva()
    a = c.jet(np.array([t]))
    b = c.jet(np.array([t + 2 * np.pi]))
    for k in range(4):
        np.testing.assert_allclose(a[k], b[k], atol=1e-9 * (1 + np.abs(a[k]).max()))


@given(st.integers(0, 10_000), st.integers(1, 6))
def test_fourier_fit_reproduces_trig_polynomials(seed, modes):
    ref = curves.random_fourier_curve(seed, modes=modes)
    fit = curves.fourier_fit(ref.samples(64))
    t = np.random.default_rng(seed).uniform(0, 2 * np.pi, 17)
    for k in range(4):
        np.testing.assert_allclose(fit.jet(t)[k], ref.jet(t)[k], atol=1e-10 * (1 + np.abs(ref.jet(t)[k]).max()))


def test_fourier_grid_matches_direct_evaluation():
    c = curves.random_fourier_curve(3, modes=9)
    t = np.linspace(0, 2 * np.pi, 32, endpoint=False)
    for a, b in zip(c.grid(32, 3), c.jet(t, 3)):
        np.testing.assert_allclose(a, b, atol=1e-12)
    sh = c.shifted_grid(32, np.array([0.1, 0.7]), 2)
    for k in range(3):
        np.testing.assert_allclose(sh[k][1], c.jet(t + 0.7, 2)[k], atol=1e-12)


def test_fit_errors():
    with pytest.raises(InputError):
        curves.fourier_fit(np.zeros((15, 3)))
    with pytest.raises(InputError):
        curves.fourier_fit(np.zeros((16, 2)))
    with pytest.raises(IrregularCurve):
        curves.fourier_fit(np.ones((32, 3)))


def test_reversal_and_similarity():
    c = curves.torus_knot()
    r = c.reversed()
    t = np.array([0.3, 1.9])
    np.testing.assert_allclose(r.jet(t, 0).position, c.jet(-t, 0).position, atol=1e-14)
    np.testing.assert_allclose(r.jet(t, 1).d1, -c.jet(-t, 1).d1, atol=1e-13)
    R = Rotation.from_rotvec([0.3, -0.4, 1.1]).as_matrix()
    m = c.transformed(R, shift=[1, 2, 3], scale=2.0)
    np.testing.assert_allclose(m.jet(t, 0).position, 2.0 * c.jet(t, 0).position @ R.T + [1, 2, 3], atol=1e-13)


def test_integrate_periodic():
    assert curves.integrate_periodic(lambda t: np.cos(t) ** 2) == pytest.approx(np.pi, abs=1e-13)
    with pytest.raises(QuadratureFailure):
        curves.integrate_periodic(lambda t: np.abs(np.sin(t)), tol=1e-15, max_n=2**10)


def test_spectral_proxy_matches_analytic():
    c = curves.kovaleva()
    p = curves.spectral_proxy(c)
    t = np.linspace(0.05, 6.2, 11)
    for k in range(3):
        np.testing.assert_allclose(p.jet(t)[k], c.jet(t)[k], atol=1e-10 * np.abs(c.jet(t)[k]).max())


def test_curve_spec_round_trip(tmp_path):
    c = curves.torus_knot()
    path = tmp_path / "c.json"
    path.write_text(json.dumps(c.to_spec(256)))
    back = curves.load_curve_spec(path)
    t = np.linspace(0, 2 * np.pi, 7)
    np.testing.assert_allclose(back.jet(t, 0).position, c.jet(t, 0).position, atol=1e-9)
    assert curves.load_curve_spec({"kind": "builtin", "name": "torus-knot", "params": {"q": 5}}).params["q"] == 5


@pytest.mark.parametrize("spec", [{"kind": "nope"}, {"kind": "samples"}, [1, 2],
                                  {"kind": "builtin", "name": "missing"},
                                  {"kind": "builtin", "name": "circle", "params": {"bad": 1}}])
def test_bad_specs(spec):
    with pytest.raises(InputError):
        curves.load_curve_spec(spec)


def test_missing_spec_file(tmp_path):
    with pytest.raises(InputError):
        curves.load_curve_spec(tmp_path / "absent.json")
