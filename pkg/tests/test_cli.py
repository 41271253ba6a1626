import csv
import io
import json
import subprocess
import sys

import pytest

from hopfgraphs.cli import run


def _run(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_hopf_invariants_passes_and_reports_json(capsys):
    code, out, err = _run(capsys, "hopf-invariants", "--samples", "3")
    assert code == 0
    report = json.loads(out)
    assert report["suite"] == "hopf-invariants" and report["seed"] == 0
    assert report["summary"]["failed"] == 0
    assert {"name", "anchor", "measured", "expected", "tol", "pass"} <= set(report["checks"][0])
    assert err.strip().endswith("0 failed")


def test_target_radius_adds_the_radius_check(capsys):
    code, out, _ = _run(capsys, "hopf-invariants", "--samples", "2", "--target-radius", "2")
    assert code == 0
    names = [c["name"] for c in json.loads(out)["checks"]]
    assert "complex S3->S2(2): |A|^2" in names


def test_output_is_byte_identical_for_a_fixed_seed(tmp_path, capsys):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        assert run(["verify-structure", "--samples", "3", "--seed", "7", "--out", str(p)]) == 0
    capsys.readouterr()
    assert paths[0].read_bytes() == paths[1].read_bytes()
    assert run(["verify-structure", "--samples", "3", "--seed", "8", "--out", str(tmp_path / "c.json")]) == 0
    assert (tmp_path / "c.json").read_bytes() != paths[0].read_bytes()


def test_csv_report_columns(capsys):
    code, out, _ = _run(capsys, "scan-conformal", "--samples", "2", "--format", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["name", "anchor", "measured", "expected", "tol", "pass"]
    assert all(len(r) == 6 and r[5] in ("true", "false") for r in rows[1:])


def test_solve_ode_csv_is_the_profile(capsys):
    code, out, _ = _run(capsys, "solve-ode", "--format", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["s", "a", "a_s", "residual"]
    s_last, a_last = float(rows[-1][0]), float(rows[-1][1])
    assert (float(rows[1][0]), float(rows[1][1])) == (0.0, 0.0)
    assert s_last == pytest.approx(1.5707963267948966) and a_last == pytest.approx(3.141592653589793)


def test_solve_ode_reports_nonexistence(capsys):
    code, out, _ = _run(capsys, "solve-ode", "--k", "2", "--l", "2")
    assert code == 0
    check = json.loads(out)["checks"][0]
    assert check["expected"] == "nonzero" and check["measured"] != 0


def test_failing_check_gives_exit_one(capsys):
    code, out, err = _run(capsys, "verify-structure", "--samples", "2", "--tol", "dictionary=1e-300")
    assert code == 1
    assert json.loads(out)["summary"]["failed"] >= 1
    assert "failed" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["no-such-command"],
        ["hopf-invariants", "--samples", "0"],
        ["hopf-invariants", "--seed", "-1"],
        ["hopf-invariants", "--target-radius", "-1"],
        ["verify-bochner", "--target-radius", "2"],
        ["solve-ode", "--k", "0"],
        ["hopf-invariants", "--tol", "nonsense=1"],
        ["hopf-invariants", "--tol", "minimal"],
        ["hopf-invariants", "--tol", "minimal=-1"],
        ["scan-conformal", "--moebius", "1,2,2,4"],
    ],
)
def test_configuration_errors_give_exit_two(argv, capsys):
    code, _, err = _run(capsys, *argv)
    assert code == 2
    assert err


def test_tolerance_scale_from_environment(monkeypatch, capsys):
    monkeypatch.setenv("MMK_TOL_SCALE", "2")
    _, out, _ = _run(capsys, "hopf-invariants", "--samples", "1")
    tols = [c["tol"] for c in json.loads(out)["checks"] if "|H|" in c["name"]]
    assert tols and all(t == pytest.approx(2e-6) for t in tols)
    monkeypatch.setenv("MMK_TOL_SCALE", "zero")
    assert _run(capsys, "hopf-invariants", "--samples", "1")[0] == 2


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "hopfgraphs.cli", "hopf-invariants", "--samples", "1", "--format", "csv"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("name,anchor,")
