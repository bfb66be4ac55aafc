"""Command line front end.

Exit codes: 0 when every requested identity holds, 1 when an identity or a
reproduced claim fails, 2 for invalid input, 3 for numerical failures and 4
for I/O errors.
"""

import argparse
import csv
import json
import os
import sys
from contextlib import nullcontext
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from asymptote import __version__, curves, framing, invariants as iv, projection as pj
from asymptote.errors import AsymptoteError, InputError
from asymptote.report import build_report

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3, 4


@dataclass
class RunConfig:
    command: str
    builtin: str = None
    input: str = None
    params: dict = field(default_factory=dict)
    direction: list = None
    seed: int = 0
    dirs: int = None
    samples: int = 1024
    tol: float = None
    sigma: float = 0.22
    out: str = None
    fmt: str = "json"
    which: str = None
    count: int = 3
    curves: list = None

    def validate(self):
        if self.tol is not None and not self.tol > 0:
            raise InputError(f"--tol must be positive, got {self.tol}")
        if self.samples < 256 or self.samples & (self.samples - 1):
            raise InputError(f"--samples must be a power of two >= 256, got {self.samples}")
        if self.dirs is not None and self.dirs < 0:
            raise InputError("--dirs must be non-negative")
        if self.direction is not None and np.linalg.norm(self.direction) == 0:
            raise InputError("--direction must be nonzero")
        return self


def _vector(text):
    try:
        v = [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x,y,z, got {text!r}")
    if len(v) != 3:
        raise argparse.ArgumentTypeError(f"expected three components, got {text!r}")
    return v


def _param(text):
    key, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    try:
        return key, json.loads(value)
    except ValueError:
        return key, value


def _threads():
    n = os.environ.get("ASYMPTOTE_THREADS")
    if not n:
        return nullcontext()
    from threadpoolctl import threadpool_limits

    return threadpool_limits(limits=int(n))


def _load_curve(cfg):
    if cfg.input:
        return curves.load_curve_spec(cfg.input)
    if not cfg.builtin:
        raise InputError("give --builtin NAME or --input PATH")
    if cfg.builtin == "example2":
        return curves.builtin("example2", sigma=cfg.sigma, **cfg.params)
    return curves.builtin(cfg.builtin, **cfg.params)


def _outdir(cfg):
    if cfg.out is None:
        return None
    path = Path(cfg.out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_report(report, cfg, stem="report"):
    out = _outdir(cfg)
    if out is None:
        if cfg.fmt == "csv":
            csv.writer(sys.stdout).writerows(report.residual_rows())
        else:
            sys.stdout.write(report.to_json())
        return
    if cfg.fmt == "csv":
        report.to_csv(out / f"{stem}.csv")
    else:
        report.to_json(out / f"{stem}.json")


def _summarize(report, claims=None):
    for k, v in report.identity_residuals.items():
        print(f"{k:30s} {v.status:12s} {v.value!r:>24} tol={v.tol:g} {v.note}", file=sys.stderr)
    for k, v in report.inequality_flags.items():
        print(f"{k:30s} {'pass' if v else 'fail':12s}", file=sys.stderr)
    for k, (want, got, ok) in (claims or {}).items():
        print(f"claim {k:24s} {'pass' if ok else 'fail':12s} expected {want!r}, got {got!r}", file=sys.stderr)


def _samples_csv(path, t, X, names):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", *names])
        for k in range(len(t)):
            w.writerow([f"{t[k]:.17g}", *(f"{x:.17g}" for x in X[k])])


def _export_bundle(curve, framed, u, out, n, extra_spec=None):
    """Curve spec, projection, crossings, spherical image and frame fields."""
    spec = curve.to_spec(n)
    if extra_spec:
        spec["provenance"] = extra_spec
    (out / "curve.json").write_text(json.dumps(spec, indent=2) + "\n")
    proj = pj.project(curve, u)
    proj.to_csv(out / "projection.csv", n)
    pj.export_crossings_csv(pj.self_crossings(proj), out / "crossings.csv")
    t = np.linspace(0, 2 * np.pi, n, endpoint=False)
    _samples_csv(out / "spherical_image.csv", t, framed.normal.derivs(t, 0)[0], ["nx", "ny", "nz"])
    framed.to_csv(out / "frame.csv", n)


# ---- commands --------------------------------------------------------------


def cmd_analyze(cfg):
    curve = _load_curve(cfg)
    report = build_report(curve, directions=[cfg.direction] if cfg.direction else None,
                          n_directions=8, seed=cfg.seed, mc_dirs=500 if cfg.dirs is None else cfg.dirs,
                          tol=cfg.tol)
    _write_report(report, cfg)
    _summarize(report)
    if not report.ok:
        print("failed: " + ", ".join(report.failures or [k for k, v in report.inequality_flags.items() if not v]),
              file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def _kovaleva_claims(report, framed):
    row = report.cr_by_direction[0]
    return {
        "Cr(e3)": (0, row["Cr"], row["Cr"] == 0),
        "zeros(e3)": (0, row["zeros"], row["zeros"] == 0),
        "Lk(G,n)": (0, report.lk_gauss["integer"], report.lk_gauss["integer"] == 0),
        "min|tau_g|>0": (True, framed.min_abs_tau() > 0, framed.min_abs_tau() > 0),
        "n injective": (False, report.extra["spherical_image_injective"],
                        report.extra["spherical_image_injective"] is False),
    }


def _example2_claims(report, ex):
    row = report.cr_by_direction[0]
    c = ex.closure.coefficients
    return {
        "closure gap<1e-8": (True, ex.curve.closure_gap, ex.curve.closure_gap < 1e-8),
        "c_i>0": (True, [float(x) for x in c], bool(np.all(c > 0))),
        "n injective": (True, report.extra["spherical_image_injective"],
                        report.extra["spherical_image_injective"] is True),
        "Cr(e3)": (2, row["Cr"], row["Cr"] == 2),
        "zeros(e3)": (0, row["zeros"], row["zeros"] == 0),
        "Lk(G,n)": (2, report.lk_gauss["integer"], report.lk_gauss["integer"] == 2),
        "inflections(e3)": (2, row["planar_inflections"], row["planar_inflections"] == 2),
        "|rot(e3)|": (1, row["rotation_index"], abs(row["rotation_index"]) == 1),
    }


def cmd_reproduce(cfg):
    from asymptote.construction import build_example2

    e3 = [0.0, 0.0, 1.0]
    mc = 2000 if cfg.dirs is None else cfg.dirs
    provenance = None
    if cfg.which == "kovaleva":
        curve = curves.kovaleva()
        normal = framing.asymptotic_normal(curve, strict=False)
    else:
        ex = build_example2(sigma=cfg.sigma)
        curve, normal, provenance = ex.curve, ex.normal, ex.provenance
    report = build_report(curve, normal, directions=[e3], n_directions=50, seed=cfg.seed, mc_dirs=mc, tol=cfg.tol)
    framed = framing.FramedCurve(curve, normal, strict=False)
    claims = _kovaleva_claims(report, framed) if cfg.which == "kovaleva" else _example2_claims(report, ex)
    report.extra["claims"] = {k: {"expected": w, "computed": g, "holds": ok} for k, (w, g, ok) in claims.items()}
    if provenance is not None:
        report.extra["provenance"] = provenance
    out = _outdir(cfg)
    if out is not None:
        _export_bundle(curve, framed, e3, out, cfg.samples, provenance)
        if cfg.which == "example2":
            t = np.linspace(0, 2 * np.pi, cfg.samples, endpoint=False)
            _samples_csv(out / "tangent_indicatrix.csv", t, ex.tangent.derivs(t, 0)[0], ["Tx", "Ty", "Tz"])
            anchors = np.asarray(provenance["anchors"])
            _samples_csv(out / "anchors.csv", anchors, ex.tangent.derivs(anchors, 0)[0], ["px", "py", "pz"])
    _write_report(report, cfg)
    _summarize(report, claims)
    failed = report.failures + [k for k, v in report.inequality_flags.items() if not v]
    failed += [f"claim {k}" for k, (_, _, ok) in claims.items() if not ok]
    if failed:
        print("failed: " + ", ".join(failed), file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


VERIFY_CURVES = {
    "torus23": lambda: curves.torus_knot(),
    "torus25": lambda: curves.torus_knot(2, 5, 2.0, 0.5, 0.0),
    "convex-lift": curves.convex_lift,
    "kovaleva": curves.kovaleva,
}


def _verify_curve(name, curve, normal, seed, mc_dirs):
    rows = []

    def add(check, value, ok, note=""):
        rows.append({"curve": name, "check": check, "value": value, "status": "pass" if ok else "fail",
                     "note": note})

    framed = framing.FramedCurve(curve, normal, strict=False)
    lk = iv.linking_gauss(curve, curves.PushOff(curve, normal, iv.push_eps(curve)))
    wr = iv.writhe_gauss(curve)
    tw = iv.twist(curve, normal)
    add("calugareanu", abs(lk.value - wr - tw), abs(lk.value - wr - tw) < 1e-3)
    r, _ = iv.link2_check(framed, 1, lk_n=lk.integer)
    add("link2(m=1)", r, r == 0)
    dirs = pj.admissible_directions(curve, 10, seed, framed)
    signed, plain = [], []
    for d, cr in dirs:
        rhs, rhs_signed, _, _ = iv.theorem1_rhs(framed, d, crossings=cr)
        signed.append(rhs_signed)
        plain.append(rhs)
    add("theorem1_signed", max(abs(s - lk.integer) for s in signed), all(s == lk.integer for s in signed))
    if framed.tau_sign != 0:
        add("theorem1", max(abs(s - lk.integer) for s in plain), all(s == lk.integer for s in plain))
    d, cr = dirs[0]
    oracle = pj.polyline_crossings(curve, d.u)
    same = len(oracle) == len(cr) and sorted(s for *_, s in oracle) == sorted(c.sign for c in cr)
    add("crossing_oracle", len(cr), same, f"oracle {len(oracle)}")
    if mc_dirs:
        mean, se = iv.writhe_average(curve, mc_dirs, seed)
        z = abs(mean - wr) / se if se > 0 else 0.0
        add("writhe_mc", z, z < 3, f"Wr={wr:.6f} MC={mean:.6f}+-{se:.6f}")
    return rows


def cmd_verify(cfg):
    from asymptote.construction import build_example2

    mc = 400 if cfg.dirs is None else cfg.dirs
    jobs = []
    names = cfg.curves or list(VERIFY_CURVES) + ["example2"] + [f"random{k}" for k in range(cfg.count)]
    for name in names:
        if name == "example2":
            ex = build_example2(sigma=cfg.sigma)
            jobs.append((name, ex.curve, ex.normal))
        elif name.startswith("random"):
            k = int(name[6:] or 0)
            c = curves.random_fourier_curve(cfg.seed * 1000 + k)
            jobs.append((name, c, None))
        elif name in VERIFY_CURVES:
            jobs.append((name, VERIFY_CURVES[name](), None))
        else:
            raise InputError(f"unknown verify curve {name!r}")
    rows = []
    for name, curve, normal in jobs:
        try:
            normal = normal or framing.asymptotic_normal(curve, strict=False)
            rows += _verify_curve(name, curve, normal, cfg.seed, mc)
        except AsymptoteError as exc:
            rows.append({"curve": name, "check": "suite", "value": None, "status": "fail",
                         "note": f"{type(exc).__name__}: {exc}"})
    out = _outdir(cfg)
    if cfg.fmt == "csv":
        target = open(out / "verify.csv", "w", newline="") if out else sys.stdout
        w = csv.DictWriter(target, fieldnames=["curve", "check", "value", "status", "note"])
        w.writeheader()
        w.writerows(rows)
        if out:
            target.close()
    else:
        text = json.dumps({"seed": cfg.seed, "directions": mc, "rows": rows}, indent=2) + "\n"
        if out:
            (out / "verify.json").write_text(text)
        else:
            sys.stdout.write(text)
    failed = [f"{r['curve']}:{r['check']}" for r in rows if r["status"] != "pass"]
    for r in rows:
        print(f"{r['curve']:12s} {r['check']:18s} {r['status']:5s} {r['value']!r} {r['note']}", file=sys.stderr)
    if failed:
        print("failed: " + ", ".join(failed), file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_export(cfg):
    curve = _load_curve(cfg)
    normal = framing.asymptotic_normal(curve, strict=False)
    framed = framing.FramedCurve(curve, normal, strict=False)
    u = cfg.direction
    if u is None:
        u = pj.admissible_directions(curve, 1, cfg.seed, framed)[0][0].u
    if cfg.out is None:
        raise InputError("export needs --out DIR")
    out = _outdir(cfg)
    _export_bundle(curve, framed, u, out, cfg.samples)
    report = build_report(curve, normal, directions=[u], n_directions=0, seed=cfg.seed,
                          mc_dirs=200 if cfg.dirs is None else cfg.dirs, link2=False, tol=cfg.tol)
    report.to_json(out / "report.json")
    report.to_csv(out / "residuals.csv")
    return EXIT_OK


COMMANDS = {"analyze": cmd_analyze, "reproduce": cmd_reproduce, "verify": cmd_verify, "export": cmd_export}


def _parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for directions and Monte Carlo")
    common.add_argument("--dirs", type=int, default=None, help="Monte Carlo directions for the writhe average")
    common.add_argument("--samples", type=int, default=1024, help="samples in exported files (power of two)")
    common.add_argument("--tol", type=float, default=None, help="tolerance for continuous identity residuals")
    common.add_argument("--sigma", type=float, default=0.22, help="scale of the constructed example's normal")
    common.add_argument("--out", default=None, help="output directory (default: stdout)")
    common.add_argument("--format", dest="fmt", choices=["json", "csv"], default="json")

    curve = argparse.ArgumentParser(add_help=False)
    src = curve.add_mutually_exclusive_group()
    src.add_argument("--builtin", help="built-in curve name")
    src.add_argument("--input", help="curve spec JSON file")
    curve.add_argument("--p", type=int, help="torus knot p")
    curve.add_argument("--q", type=int, help="torus knot q")
    curve.add_argument("--param", type=_param, action="append", default=[], help="extra builtin parameter key=value")
    curve.add_argument("--direction", type=_vector, help="projection direction x,y,z")

    ap = argparse.ArgumentParser(prog="asymptote", description="Invariants of closed space curves.")
    ap.add_argument("--version", action="version", version=f"asymptote {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("analyze", parents=[common, curve], help="full invariant report for one curve")
    rp = sub.add_parser("reproduce", parents=[common], help="rebuild and verify a worked example")
    rp.add_argument("which", choices=["kovaleva", "example2"])
    vp = sub.add_parser("verify", parents=[common], help="identity suite on built-in and random curves")
    vp.add_argument("--count", type=int, default=3, help="number of random Fourier curves")
    vp.add_argument("--curves", type=lambda s: s.split(","), default=None, help="comma-separated subset")
    sub.add_parser("export", parents=[common, curve], help="write samples, projection, frame and report files")
    return ap


def config_from_args(argv=None):
    ns = _parser().parse_args(argv)
    params = dict(getattr(ns, "param", []) or [])
    for key in ("p", "q"):
        if getattr(ns, key, None) is not None:
            params[key] = getattr(ns, key)
    return RunConfig(
        command=ns.command, builtin=getattr(ns, "builtin", None), input=getattr(ns, "input", None),
        params=params, direction=getattr(ns, "direction", None), seed=ns.seed, dirs=ns.dirs,
        samples=ns.samples, tol=ns.tol, sigma=ns.sigma, out=ns.out, fmt=ns.fmt,
        which=getattr(ns, "which", None), count=getattr(ns, "count", 3), curves=getattr(ns, "curves", None),
    ).validate()


def main(argv=None):
    try:
        cfg = config_from_args(argv)
        with _threads():
            return COMMANDS[cfg.command](cfg)
    except AsymptoteError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
