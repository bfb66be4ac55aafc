import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from asymptote import curves, framing
from asymptote.construction import build_example2
from asymptote.curves import PushOff
from asymptote.invariants import linking_gauss, push_eps

settings.register_profile("ci", max_examples=25, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "ci"))

E3 = np.array([0.0, 0.0, 1.0])

# acceptance lines collected during the session, printed at the end
ACCEPTANCE = {}


def record(k, ok, detail):
    ACCEPTANCE[k] = (bool(ok), detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


class Cache:
    """Session cache for framed curves and expensive linking numbers."""

    def __init__(self):
        self.framed = {}
        self.lk = {}

    def framed_curve(self, name):
        if name not in self.framed:
            if name == "example2":
                self.framed[name] = build_example2().framed
            else:
                c = {
                    "kovaleva": curves.kovaleva,
                    "torus23": curves.torus_knot,
                    "torus25": lambda: curves.torus_knot(2, 5, 2.0, 0.5, 0.0),
                    "convex-lift": curves.convex_lift,
                }[name]()
                n = framing.asymptotic_normal(c, strict=False)
                self.framed[name] = framing.FramedCurve(c, n, strict=False)
        return self.framed[name]

    def linking(self, name, field_name="n", field=None):
        key = (name, field_name)
        if key not in self.lk:
            fr = self.framed_curve(name)
            v = fr.normal if field is None else field
            self.lk[key] = linking_gauss(fr.curve, PushOff(fr.curve, v, push_eps(fr.curve)))
        return self.lk[key]


@pytest.fixture(scope="session")
def cache():
    return Cache()


@pytest.fixture(scope="session")
def e3():
    return E3.copy()
