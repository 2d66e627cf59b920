import json
import subprocess
import sys

import numpy as np
import pytest

from bhrvt import csvio
from bhrvt.cli import main
from bhrvt.dist import preset
from bhrvt.rvt import DensityCurve


def run(capsys, *argv):
    rc = main(list(argv))
    out = capsys.readouterr()
    return rc, out.out, out.err


def table(text):
    meta, cols, rows = csvio.read_table(text)
    return meta, cols, rows


def test_pdf1_zero_is_flat(capsys):
    rc, out, _ = run(capsys, "--preset", "example1", "pdf1", "--n", "0",
                     "--x-min", "0.01", "--x-max", "0.99", "--points", "50")
    assert rc == 0
    meta, cols, rows = table(out)
    assert cols == ["x", "f"] and meta["n"] == "0" and meta["preset"] == "example1"
    f = np.array(rows)[:, 1]
    np.testing.assert_allclose(f, 1.0, atol=1e-12)


def test_pdf1_n20_mass(capsys):
    # finer grid than the default: trapezoid error of the 200-point grid is about 1.3e-3
    rc, out, _ = run(capsys, "--preset", "example1", "pdf1", "--n", "20", "--points", "400")
    assert rc == 0
    assert abs(float(table(out)[0]["mass"]) - 1) <= 1e-3


def test_example2_pdf1_matches_steady(capsys):
    _, a, _ = run(capsys, "--preset", "example2", "pdf1", "--n", "16")
    _, b, _ = run(capsys, "--preset", "example2", "steady")
    ra, rb = np.array(table(a)[2]), np.array(table(b)[2])
    ca = DensityCurve(ra[:, 0], ra[:, 1], 16)
    cb = DensityCurve(rb[:, 0], rb[:, 1], "steady")
    assert ca.l1_distance(cb) < 0.05


def test_pdf2_equal_periods(capsys):
    rc, _, err = run(capsys, "pdf2", "--n1", "3", "--n2", "3")
    assert rc != 0 and "pdf1" in err


def test_pdf2_rows_row_major(capsys):
    rc, out, _ = run(capsys, "pdf2", "--n1", "1", "--n2", "2", "--points", "5")
    meta, cols, rows = table(out)
    assert cols == ["x1", "x2", "f"] and len(rows) == 25
    r = np.array(rows)
    assert np.all(np.diff(r[:5, 0]) == 0) and np.all(np.diff(r[:5, 1]) > 0)


def test_moments_rows(capsys):
    _, out, _ = run(capsys, "moments", "--n-max", "2")
    meta, cols, rows = table(out)
    assert cols == ["n", "mean", "std"]
    assert [r[0] for r in rows] == [0.0, 1.0, 2.0, "steady"]


def test_cov_example1_symmetric(capsys):
    _, out, _ = run(capsys, "--preset", "example1", "cov", "--n-max", "20")
    meta, cols, rows = table(out)
    assert cols == ["n1", "n2", "gamma", "cov"] and len(rows) == 21 * 21
    r = np.array(rows)
    cov = r[:, 3].reshape(21, 21)
    assert np.max(np.abs(cov - cov.T)) <= 1e-8


def test_mc_histograms(capsys):
    _, out, _ = run(capsys, "--samples", "20000", "--seed", "7", "mc", "--n-max", "2", "--bins", "10")
    meta, cols, rows = table(out)
    assert cols == ["n", "bin_lo", "bin_hi", "height", "stderr"]
    assert meta["seed"] == "7" and len(rows) == 4 * 10
    r = [row for row in rows if row[0] == 1.0]
    assert sum(h * (hi - lo) for _, lo, hi, h, _ in r) == pytest.approx(1, abs=1e-12)


def test_validate_report(capsys):
    rc, out, _ = run(capsys, "--samples", "200000", "validate")
    assert rc == 0
    assert "8/8 checks passed" in out


def test_config_file(capsys, tmp_path):
    path = tmp_path / "d.json"
    path.write_text(json.dumps(preset("example1").to_config()))
    rc, out, _ = run(capsys, "--config", str(path), "steady", "--x-min", "1", "--x-max", "2", "--points", "3")
    assert rc == 0
    f = np.array(table(out)[2])[:, 1]
    assert f[0] == pytest.approx(0.99 / 1.62, abs=1e-9)


def test_bad_inputs(capsys, tmp_path):
    rc, _, err = run(capsys, "--config", str(tmp_path / "missing.json"), "steady")
    assert rc == 1 and "error" in err
    rc, _, err = run(capsys, "steady", "--x-min", "2", "--x-max", "1")
    assert rc == 1
    with pytest.raises(SystemExit):
        main(["--preset", "example9", "steady"])


def test_round_trip_bit_exact(capsys, tmp_path):
    path = tmp_path / "c.csv"
    assert main(["--out", str(path), "pdf1", "--n", "3", "--points", "30"]) == 0
    rows = np.array(table(path.read_text())[2])
    from bhrvt.rvt import pdf1_values
    f, _ = pdf1_values(rows[:, 0], 3, preset("example1"))
    assert np.array_equal(f, rows[:, 1])


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "bhrvt", "steady", "--points", "3",
                        "--x-min", "1", "--x-max", "3"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.startswith("# preset=example1")
