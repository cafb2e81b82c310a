import json
import math
import subprocess
import sys

import pytest

from isoprofile.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_profile_cylinder(capsys):
    code, out, _ = run(capsys, "profile", "--space", "cylinder", "--dim", "3", "--scale", "2", "--volume", "65")
    assert code == 0
    assert json.loads(out)["area"] == pytest.approx(99.4, rel=5e-3)


def test_profile_sphere_hemisphere(capsys):
    code, out, _ = run(capsys, "profile", "--space", "sphere", "--dim", "2", "--volume", "6.2832")
    assert code == 0
    assert json.loads(out)["area"] == pytest.approx(2 * math.pi, rel=1e-4)


def test_profile_euclidean(capsys):
    code, out, _ = run(capsys, "profile", "--space", "euclidean", "--dim", "2", "--volume", "1")
    assert json.loads(out)["area"] == pytest.approx(3.5449, abs=5e-5)


def test_profile_range_csv(capsys):
    code, out, _ = run(capsys, "profile", "--space", "sphere", "--dim", "2", "--volume-range", "1", "12",
                       "--count", "5", "--format", "csv")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "v,area" and len(lines) == 6


def test_profile_domain_error(capsys):
    code, _, err = run(capsys, "profile", "--space", "sphere", "--dim", "2", "--volume", "20")
    assert code == 2
    assert "outside" in err


def test_bound_product(capsys):
    code, out, _ = run(capsys, "bound", "--product", "s2xr2", "--volume", "100")
    d = json.loads(out)
    assert code == 0
    assert d["value"] == pytest.approx(123.2, rel=1e-12)
    assert d["active_segment"]["kind"] == "power-law"
    assert d["provenance"]


def test_bound_tube(capsys):
    code, out, _ = run(capsys, "bound", "--theorem1", "--vol-m", "12.566", "--n", "2", "--alpha", "0.9")
    assert code == 0
    assert json.loads(out)["v0"] == pytest.approx(1.754e5, rel=1e-3)


def test_bound_forward(capsys):
    code, out, _ = run(capsys, "bound", "--forward", "--x0", "65", "--y0", "99.4", "--n", "2")
    assert json.loads(out)["coefficient"] == pytest.approx(12.33, abs=5e-3)


def test_bound_unknown_product(capsys):
    code, _, err = run(capsys, "bound", "--product", "s7xr1", "--volume", "1")
    assert code == 2 and "s7xr1" in err


def test_bound_missing_pair(capsys):
    code, _, err = run(capsys, "bound", "--forward", "--x0", "65")
    assert code == 2 and "--y0" in err


def test_verify_fig1(capsys):
    code, out, err = run(capsys, "verify", "--claim", "fig1")
    assert code == 0
    assert json.loads(out)[0]["passed"] is True
    assert "PASS fig1" in err


def test_verify_fig2_dense(capsys):
    code, out, _ = run(capsys, "verify", "--claim", "fig2", "--samples", "8192")
    rep = json.loads(out)[0]
    assert code == 0 and rep["passed"] and rep["samples"] > 8192


def test_verify_unknown_claim(capsys):
    code, _, _ = run(capsys, "verify", "--claim", "fig9")
    assert code == 2


def test_verify_list(capsys):
    code, out, _ = run(capsys, "verify", "--list")
    assert code == 0 and "fig6" in out.split()


@pytest.mark.slow
def test_verify_all(capsys):
    code, out, err = run(capsys, "verify", "--all", "--format", "csv")
    rows = out.splitlines()[1:]
    assert len(rows) >= 10
    statuses = [r.split(",")[-1] for r in rows]
    assert code == (0 if all(s == "pass" for s in statuses) else 1)
    assert code == 0
    assert [r.split(",")[0] for r in rows] == sorted(r.split(",")[0] for r in rows)


def test_figure_ids(capsys, tmp_path):
    for fid in (4, 6):
        target = tmp_path / f"fig{fid}.csv"
        code, out, _ = run(capsys, "figure", "--id", str(fid), "--samples", "300", "--out", str(target))
        lines = target.read_text().splitlines()
        assert code == 0 and out == ""
        assert lines[0] == "v,lhs,rhs,margin" and len(lines) == 301
        assert all(float(l.split(",")[3]) > 0 for l in lines[1:])


def test_yamabe_product(capsys):
    code, out, _ = run(capsys, "yamabe", "--product", "s3xr2")
    d = json.loads(out)
    assert code == 0
    assert d[0]["estimate"]["ratio"] == pytest.approx(0.8281, abs=5e-5)
    assert d[1]["rounded"] == 0.83


def test_yamabe_s2xr2_note(capsys):
    _, out, _ = run(capsys, "yamabe", "--product", "s2xr2")
    assert "0.785" in out and "0.7833" in out


def test_yamabe_all(capsys):
    _, out, _ = run(capsys, "yamabe", "--all")
    assert "Lambda_{4,1}" in out and "43.9" in out


def test_repeated_runs_are_byte_identical():
    cmd = [sys.executable, "-m", "isoprofile", "figure", "--id", "1", "--samples", "400"]
    first = subprocess.run(cmd, capture_output=True, check=True).stdout
    second = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert first == second and len(first) > 1000


def test_usage_error_exit_code():
    res = subprocess.run([sys.executable, "-m", "isoprofile", "figure", "--id", "9"], capture_output=True)
    assert res.returncode == 2
