import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from asymptote import cli, curves, projection as pj


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_analyze_circle(capsys):
    code, out, err = run(["analyze", "--builtin", "circle", "--dirs", "0"], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["identity_residuals"]["self_linking"]["status"] == "inapplicable"
    assert rep["lk_gauss"]["integer"] == 0


def test_analyze_deterministic(tmp_path, capsys):
    paths = []
    for k in range(2):
        out = tmp_path / f"run{k}"
        code, _, _ = run(["analyze", "--builtin", "torus-knot", "--dirs", "100", "--seed", "5",
                          "--out", str(out)], capsys)
        assert code == 0
        paths.append(out / "report.json")
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_analyze_csv_stdout(capsys):
    code, out, _ = run(["analyze", "--builtin", "torus-knot", "--dirs", "0", "--format", "csv",
                        "--direction", "0,0,1"], capsys)
    assert code == 0
    rows = list(csv.reader(out.splitlines()))
    assert rows[0][0] == "identity"
    assert any(r[0] == "calugareanu" for r in rows)


@pytest.mark.parametrize("argv, code", [
    (["reproduce", "example2", "--sigma", "0.3"], 2),
    (["analyze", "--input", "/nonexistent/curve.json"], 2),
    (["analyze"], 2),
    (["analyze", "--builtin", "circle", "--samples", "1000"], 2),
    (["analyze", "--builtin", "circle", "--tol", "-1"], 2),
    (["analyze", "--builtin", "circle", "--direction", "0,0,0"], 2),
    (["verify", "--curves", "nope"], 2),
    (["export", "--builtin", "torus-knot", "--dirs", "0"], 2),
])
def test_input_errors(argv, code, capsys):
    assert run(argv, capsys)[0] == code


def test_argparse_rejects_bad_vector():
    with pytest.raises(SystemExit) as exc:
        cli.main(["analyze", "--builtin", "circle", "--direction", "1,2"])
    assert exc.value.code == 2


def test_io_error(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("")
    code, _, err = run(["export", "--builtin", "torus-knot", "--dirs", "0", "--out", str(blocker / "sub")], capsys)
    assert code == 4 and "error" in err


def test_export_bundle(tmp_path, capsys):
    out = tmp_path / "bundle"
    code, _, _ = run(["export", "--builtin", "torus-knot", "--dirs", "0", "--samples", "256",
                      "--direction", "0,0,1", "--out", str(out)], capsys)
    assert code == 0
    for name in ["curve.json", "projection.csv", "crossings.csv", "spherical_image.csv", "frame.csv",
                 "report.json", "residuals.csv"]:
        assert (out / name).stat().st_size > 0
    back = curves.load_curve_spec(out / "curve.json")
    t = np.linspace(0, 2 * np.pi, 9)
    np.testing.assert_allclose(back.jet(t, 0).position, curves.torus_knot().jet(t, 0).position, atol=1e-9)
    with open(out / "crossings.csv") as fh:
        signs = [int(r["sign"]) for r in csv.DictReader(fh)]
    assert signs == [1, 1, 1]


def test_verify_subset(capsys):
    code, out, _ = run(["verify", "--curves", "torus23,random0", "--dirs", "0"], capsys)
    assert code == 0
    rows = json.loads(out)["rows"]
    assert {r["curve"] for r in rows} == {"torus23", "random0"}
    assert all(r["status"] == "pass" for r in rows)


def test_verify_catches_flipped_crossing_sign(monkeypatch, capsys):
    """A sign error in the crossing rule must make verify fail."""
    flipped = lambda a, b: -int(np.sign(a[0] * b[1] - a[1] * b[0]))  # noqa: E731
    monkeypatch.setattr(pj, "_crossing_sign", flipped)
    code, out, err = run(["verify", "--curves", "torus23", "--dirs", "0"], capsys)
    assert code == 1
    failed = {r["check"] for r in json.loads(out)["rows"] if r["status"] == "fail"}
    assert {"theorem1", "theorem1_signed", "crossing_oracle"} <= failed


def test_reproduce_kovaleva_reports_failed_claims(tmp_path, capsys):
    code, _, err = run(["reproduce", "kovaleva", "--dirs", "0", "--out", str(tmp_path)], capsys)
    assert code == 1
    assert "claim" in err
    rep = json.loads((tmp_path / "report.json").read_text())
    assert rep["lk_gauss"]["integer"] == -1


def test_threads_env(monkeypatch, capsys):
    monkeypatch.setenv("ASYMPTOTE_THREADS", "1")
    assert run(["analyze", "--builtin", "circle", "--dirs", "0"], capsys)[0] == 0


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "asymptote", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("asymptote")
