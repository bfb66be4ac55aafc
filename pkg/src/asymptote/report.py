"""Invariant reports: every computed invariant plus the residual of each identity.

Each identity is recorded with a value, a tolerance and a status: ``pass``,
``fail`` or ``inapplicable`` (a precondition such as one-signed ``tau_g``
does not hold). Reports serialize deterministically: same inputs and seed
give byte-identical JSON.
"""

import csv
import json
from dataclasses import asdict, dataclass, field

import numpy as np

from asymptote import framing, invariants as iv, projection as pj
from asymptote.curves import PushOff
from asymptote.errors import AsymptoteError, InapplicableDirection, NoSelfLinking

TOLERANCES = {
    "calugareanu": 1e-3,
    "link2": 0,
    "darboux_ode": 1e-6,
    "ruled_K": 1e-6,
    "geodesic_curvature_ratio": 1e-7,
    "geodesic_curvature_ratio_abs": 1e-7,
    "kappa_kappa": 1e-6,
    "kappa_kappa_abs": 1e-6,
    "petrunin": 1e-6,
    "crofton_milnor": 0.05,
    "milnor_tau": 1e-6,
    "theorem1": 0,
    "theorem1_signed": 0,
    "self_linking": 0,
    "banchoff": 0,
    "lk_integer": 0.01,
}


@dataclass
class Identity:
    value: float
    tol: float
    status: str
    note: str = ""


def _py(x):
    """Plain Python scalars/lists for JSON."""
    if isinstance(x, dict):
        return {k: _py(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_py(v) for v in x]
    if isinstance(x, np.ndarray):
        return _py(x.tolist())
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if np.isfinite(x) else str(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


@dataclass
class InvariantReport:
    curve: dict
    framing: dict
    lk_gauss: dict
    cr_by_direction: list
    writhe_gauss: float
    writhe_mc: dict
    twist: float
    rot: int
    sl: int = None
    spherical: dict = field(default_factory=dict)
    identity_residuals: dict = field(default_factory=dict)
    inequality_flags: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    @property
    def failures(self):
        return [k for k, v in self.identity_residuals.items() if v.status == "fail"]

    @property
    def ok(self):
        return not self.failures and all(self.inequality_flags.values())

    def to_dict(self):
        d = asdict(self)
        return _py(d)

    def to_json(self, path=None):
        text = json.dumps(self.to_dict(), indent=2) + "\n"
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text

    def residual_rows(self):
        rows = [("identity", "value", "tol", "status", "note")]
        for k, v in self.identity_residuals.items():
            rows.append((k, repr(_py(v.value)), repr(v.tol), v.status, v.note))
        for k, v in self.inequality_flags.items():
            rows.append((k, "", "", "pass" if v else "fail", "inequality"))
        return rows

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            csv.writer(fh).writerows(self.residual_rows())


def _judge(value, tol):
    return Identity(value, tol, "pass" if value <= tol else "fail")


def _record(out, name, fn):
    """Evaluate ``fn() -> value`` (or an Identity) into ``out[name]``."""
    tol = TOLERANCES[name]
    try:
        r = fn()
    except (InapplicableDirection, NoSelfLinking) as exc:
        out[name] = Identity(float("nan"), tol, "inapplicable", str(exc))
        return
    except AsymptoteError as exc:
        out[name] = Identity(float("nan"), tol, "fail", f"{type(exc).__name__}: {exc}")
        return
    out[name] = r if isinstance(r, Identity) else _judge(float(r), tol)


CONTINUOUS = ("darboux_ode", "ruled_K", "geodesic_curvature_ratio", "geodesic_curvature_ratio_abs", "kappa_kappa",
              "kappa_kappa_abs", "petrunin", "milnor_tau")


def retolerance(res, tol):
    """Re-judge the continuous (pointwise or integral) residuals against ``tol``."""
    for k in CONTINUOUS:
        v = res.get(k)
        if v is not None and v.status in ("pass", "fail") and np.isfinite(v.value):
            v.tol = tol
            v.status = "pass" if v.value <= tol else "fail"


def build_report(curve, normal=None, directions=None, n_directions=8, seed=0, mc_dirs=500, link2=True,
                 ms=(-2, -1, 0, 1, 2), tol=None, samples=None):
    """Run the full analysis of ``curve`` framed by ``normal`` (default: asymptotic normal).

    ``tol`` overrides the tolerance of the continuous identities; ``samples``
    sets the frame grid.
    """
    if normal is None:
        normal = framing.asymptotic_normal(curve, strict=False)
    fr = framing.FramedCurve(curve, normal, n=samples or framing.GRID, strict=False)
    res = {}
    flags = {}
    info = {
        "provenance": normal.provenance,
        "flip_count": getattr(normal, "flip_count", None),
        "tau_g_range": [float(fr.tau_g.min()), float(fr.tau_g.max())],
        "kappa_g_range": [float(fr.kappa_g.min()), float(fr.kappa_g.max())],
        "tau_sign": fr.tau_sign,
        "min_abs_tau_g": fr.min_abs_tau(),
        "issues": list(fr.issues),
    }
    roots, _ = framing.inflections(fr)
    info["geodesic_inflections"] = len(roots)

    d = fr.darboux_residuals()
    res["darboux_ode"] = _judge(max(d.values()), TOLERANCES["darboux_ode"])

    # linking of the framing and Calugareanu
    eps = iv.push_eps(curve)
    lk = iv.linking_gauss(curve, PushOff(curve, normal, eps))
    lk_d = {"value": lk.value, "integer": lk.integer, "residual": lk.residual, "grid": lk.n, "eps": eps}
    res["lk_integer"] = _judge(lk.residual, TOLERANCES["lk_integer"])
    wr = iv.writhe_gauss(curve)
    tw = iv.twist(curve, normal)
    res["calugareanu"] = _judge(abs(lk.value - wr - tw), TOLERANCES["calugareanu"])
    if link2:
        def link2_value():
            worst = 0
            for m in ms:
                r, _ = iv.link2_check(fr, m, lk_n=lk.integer)
                worst = max(worst, abs(r))
            return worst

        _record(res, "link2", link2_value)

    # directions
    dirs = []
    for u in directions or []:
        ok, reason, cr = pj.check_admissible(curve, u, fr)
        dirs.append((pj.direction(u), cr, reason))
    if n_directions:
        dirs += [(dd, cr, "") for dd, cr in pj.admissible_directions(curve, n_directions, seed, fr)]
    rows, rhs_set, signed_set = [], set(), set()
    for dd, cr, reason in dirs:
        row = {"direction": dd.as_list()}
        if cr is None:
            row["error"] = reason
            rows.append(row)
            continue
        rhs, rhs_signed, crn, zeros = iv.theorem1_rhs(fr, dd, crossings=cr)
        proj = pj.project(curve, dd)
        row.update({"Cr": crn, "zeros": zeros, "theorem1_rhs": rhs, "theorem1_rhs_signed": rhs_signed,
                    "rotation_index": pj.rotation_index(proj), "planar_inflections": len(pj.planar_inflections(proj)),
                    "starshaped": pj.locally_starshaped(proj).found})
        rows.append(row)
        rhs_set.add(rhs)
        signed_set.add(rhs_signed)
    good_rows = [r for r in rows if "error" not in r]
    if fr.tau_sign == 0:
        res["theorem1"] = Identity(float("nan"), 0, "inapplicable", "tau_g changes sign")
    elif good_rows:
        res["theorem1"] = _judge(max(abs(r["theorem1_rhs"] - lk.integer) for r in good_rows), 0)
    if good_rows:
        res["theorem1_signed"] = _judge(max(abs(r["theorem1_rhs_signed"] - lk.integer) for r in good_rows), 0)
        res["theorem1_signed"].note = "per-zero signs of tau_g"
        if fr.tau_sign != 0:
            flags["theorem2_not_starshaped"] = flags["theorem3_rotation"] = True
        for r in good_rows if fr.tau_sign != 0 else []:
            if r["Cr"] == lk.integer and r["starshaped"]:
                flags["theorem2_not_starshaped"] = False
            if r["planar_inflections"] == 0 and abs(r["rotation_index"]) < 3:
                flags["theorem3_rotation"] = False

    # writhe Monte Carlo
    if mc_dirs:
        mean, se = iv.writhe_average(curve, mc_dirs, seed)
        wmc = {"mean": mean, "stderr": se, "directions": mc_dirs, "z": abs(mean - wr) / se if se > 0 else 0.0}
    else:
        wmc = {}

    # pointwise checks
    t = np.linspace(0, 2 * np.pi, 2048, endpoint=False)
    _record(res, "ruled_K", lambda: np.abs(framing.ruled_patch_curvature(fr, t) + fr.quantities(t)["tau_g"] ** 2).max())

    degenerate = float(np.abs(fr.tau_g).max()) < 1e-10
    if degenerate:
        note = "tau_g vanishes identically; the spherical image is a point"
        for k in ("geodesic_curvature_ratio", "geodesic_curvature_ratio_abs", "kappa_kappa", "kappa_kappa_abs"):
            res[k] = Identity(float("nan"), TOLERANCES[k], "inapplicable", note)
        sph = {}
    else:
        try:
            kt, _, r_printed = framing.spherical_geodesic_curvature(fr, t)
            # relative form: kt is unbounded near zeros of tau_g
            r_rel = np.abs(kt - fr.quantities(t)["kappa_g"] / np.abs(fr.quantities(t)["tau_g"])) / np.maximum(1.0, np.abs(kt))
            res["geodesic_curvature_ratio_abs"] = _judge(float(r_rel.max()), TOLERANCES["geodesic_curvature_ratio_abs"])
            res["geodesic_curvature_ratio_abs"].note = "kappa_g/|tau_g|, relative to max(1, |kt|)"
            if fr.tau_sign == 0:
                res["geodesic_curvature_ratio"] = Identity(float(r_printed.max()), 1e-7, "inapplicable",
                                                           "tau_g changes sign")
            else:
                res["geodesic_curvature_ratio"] = _judge(float(r_printed.max()), 1e-7)
        except AsymptoteError as exc:
            note = f"{type(exc).__name__}: {exc}"
            res["geodesic_curvature_ratio"] = Identity(float("nan"), 1e-7, "inapplicable", note)
            res["geodesic_curvature_ratio_abs"] = Identity(float("nan"), 1e-7, "inapplicable", note)

        sph = {}
        try:
            sc = iv.spherical_checks(fr)
            sph = {k: v for k, v in asdict(sc).items() if k != "flags"}
            res["kappa_kappa_abs"] = _judge(sc.kappa_kappa_residual, 1e-6)
            if fr.tau_sign == 0:
                res["kappa_kappa"] = Identity(float("nan"), 1e-6, "inapplicable", "tau_g changes sign")
            else:
                res["kappa_kappa"] = _judge(sc.kappa_kappa_printed_residual, 1e-6)
            flags.update(sc.flags)
        except AsymptoteError as exc:
            res["kappa_kappa"] = Identity(float("nan"), 1e-6, "fail", f"{type(exc).__name__}: {exc}")

    first = next((dd for dd, cr, _ in dirs if cr is not None), None)
    if first is not None:
        _record(res, "petrunin", lambda: iv.petrunin_identity_check(fr, first).residual)
        res["petrunin"].note = (res["petrunin"].note or f"u={first.as_list()}")

    # Frenet-framing identities
    sl_value = None
    try:
        sl = iv.self_linking(curve, seed=seed)
        sl_value = sl.value
        res["self_linking"] = Identity(0.0, 0, "pass", f"routes {sl.by_crossings}/{sl.by_gauss}/{sl.by_writhe:.6f}")
        if first is not None:
            b = iv.banchoff_check(curve, first, sl.value)
            res["banchoff"] = _judge(abs(b.residual), 0)
        cm = iv.crofton_milnor_check(curve, n_dirs=max(mc_dirs, 200), seed=seed)
        res["crofton_milnor"] = _judge(cm.relative_error, TOLERANCES["crofton_milnor"])
        res["milnor_tau"] = _judge(cm.tau_identity_residual, TOLERANCES["milnor_tau"])
    except NoSelfLinking as exc:
        for k in ("self_linking", "banchoff", "crofton_milnor", "milnor_tau"):
            res[k] = Identity(float("nan"), TOLERANCES[k], "inapplicable", str(exc))
    except AsymptoteError as exc:
        res["self_linking"] = Identity(float("nan"), 0, "fail", f"{type(exc).__name__}: {exc}")

    if tol is not None:
        retolerance(res, tol)
    rot = rows[0]["rotation_index"] if rows and "rotation_index" in rows[0] else None
    injective = sph.get("injective")
    curve_info = {"name": curve.name, "kind": curve.kind, "params": dict(curve.params)}
    return InvariantReport(
        curve=curve_info,
        framing=info,
        lk_gauss=lk_d,
        cr_by_direction=rows,
        writhe_gauss=wr,
        writhe_mc=wmc,
        twist=tw,
        rot=rot,
        sl=sl_value,
        spherical=sph,
        identity_residuals=res,
        inequality_flags=flags,
        extra={"spherical_image_injective": injective,
               "theorem1_rhs_values": sorted(rhs_set, key=str),
               "theorem1_rhs_signed_values": sorted(signed_set)},
    )
