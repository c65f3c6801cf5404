import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from cutapprox import Scenario
from cutapprox.analysis import cdf_table, compare, sweep
from cutapprox.cli import main
from cutapprox.exact_cut import GridSpec, QuadratureConfig
from cutapprox.monte_carlo import sample_cut

MODEL = ["--alpha", "4.7", "--beta", "0.3", "--lambda", "1000", "--mu", "1"]


def run(capsys, argv):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def parse_csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], rows[1:]


def test_cdf_fifty_rows(capsys):
    code, out, _ = run(capsys, ["cdf", *MODEL, "--grid-q", "0.01:0.99:50"])
    assert code == 0
    header, rows = parse_csv(out)
    assert header == ["t", "exact", "approx_exp", "approx_pareto", "limit", "exact_error_estimate"]
    assert len(rows) == 50
    exact = np.array([float(r[1]) for r in rows])
    assert np.all(np.diff(exact) >= 0)


def test_cdf_matches_library_bit_for_bit(capsys):
    code, out, _ = run(capsys, ["cdf", *MODEL, "--grid-q", "0.01:0.99:50"])
    s = Scenario(4.7, 0.3, 1000.0, 1.0)
    cols, _ = cdf_table(s, GridSpec.parse("0.01:0.99:50").points(s), QuadratureConfig())
    header, rows = parse_csv(out)
    for j, name in enumerate(header):
        assert np.array_equal(np.array([float(r[j]) for r in rows]), cols[name])


def test_cdf_zero_row(capsys):
    code, out, _ = run(capsys, ["cdf", *MODEL, "--grid-t", "0:2:5"])
    _, rows = parse_csv(out)
    assert [float(v) for v in rows[0][:5]] == [0.0] * 5


def test_cdf_json(capsys):
    code, out, _ = run(capsys, ["cdf", *MODEL, "--grid-q", "0:0.9:4", "--format", "json"])
    doc = json.loads(out)
    assert len(doc["rows"]) == 4 and doc["meta"]["scenario"]["lambda"] == 1000.0


@pytest.mark.parametrize("argv,field", [
    (["cdf", "--alpha", "-1", "--beta", "0.3", "--lambda", "1", "--mu", "1"], "alpha"),
    (["cdf", "--alpha", "1", "--beta", "0", "--lambda", "1", "--mu", "1"], "beta"),
    (["cdf", "--alpha", "1", "--beta", "1", "--mu", "1"], "lambda"),
    (["cdf", *MODEL, "--grid-q", "0.5:0.1:3"], "grid"),
    (["cdf", *MODEL, "--abs-tol", "0"], "abs-tol"),
    (["sample", *MODEL, "--n", "0"], "n"),
    (["sweep", "--alpha", "4.7", "--beta", "0.3", "--mu", "1", "--ratios", ""], "ratios"),
    (["sweep", "--alpha", "4.7", "--beta", "0.3", "--mu", "1", "--ratios", "1,x"], "ratios"),
])
def test_config_errors_exit_2(capsys, argv, field):
    code, _, err = run(capsys, argv)
    assert code == 2
    assert field in err


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as info:
        main(["cdf", "--alpha", "abc"])
    assert info.value.code == 2


def test_cdf_quadrature_failure_exit_3(capsys):
    code, out, err = run(capsys, ["cdf", "--alpha", "1.5", "--beta", "0.3", "--lambda", "0.1", "--mu", "1",
                                  "--abs-tol", "1e-15", "--rel-tol", "1e-15", "--max-subdivisions", "1",
                                  "--grid-t", "0:5:3"])
    assert code == 3
    header, rows = parse_csv(out)
    assert header[-1] == "status"
    assert rows[0][-1] == "ok" and "FAILED" in [r[-1] for r in rows]


def test_sample_csv_lines(tmp_path, capsys):
    path = tmp_path / "z.csv"
    assert main(["sample", *MODEL, "--n", "10", "--seed", "42", "--out", str(path)]) == 0
    lines = path.read_text().splitlines()
    assert len(lines) == 11 and lines[0] == "z"
    lib = sample_cut(Scenario(4.7, 0.3, 1000.0, 1.0), 42, 10).values
    assert np.array_equal(np.array([float(x) for x in lines[1:]]), lib)


def test_sample_repeat_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["sample", *MODEL, "--n", "1000", "--seed", "7", "--out", str(a)])
    main(["sample", *MODEL, "--n", "1000", "--seed", "7", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_sample_binary_size(tmp_path):
    path = tmp_path / "z.bin"
    assert main(["sample", *MODEL, "--n", "1000000", "--format", "binary", "--out", str(path)]) == 0
    assert path.stat().st_size == 8 * 10**6


def test_sample_io_error_exit_4(tmp_path, capsys):
    code, _, err = run(capsys, ["sample", *MODEL, "--n", "5", "--out", str(tmp_path / "missing" / "z.csv")])
    assert code == 4


def test_compare_summary(capsys):
    code, out, _ = run(capsys, ["compare", "--alpha", "4.7", "--beta", "0.3", "--lambda", "1e12", "--mu", "1",
                                "--n", "100000", "--seed", "3"])
    assert code == 0
    doc = json.loads(out)
    assert doc["ks_emp_vs_exact"] < 0.01
    assert doc["validity_ratio"] == pytest.approx(1 / (1e12 + 1))
    assert doc == json.loads(json.dumps(compare(Scenario(4.7, 0.3, 1e12, 1.0), 3, 100000)))


def test_compare_direction(capsys):
    def sup(lam):
        _, out, _ = run(capsys, ["compare", "--alpha", "4.7", "--beta", "0.3", "--lambda", lam, "--mu", "1", "--n", "1000"])
        return json.loads(out)["sup_exact_vs_pareto"]

    assert sup("0.1") > sup("1000")


def test_sweep_verdicts(capsys):
    code, out, err = run(capsys, ["sweep", "--alpha", "4.7", "--beta", "0.3", "--mu", "1"])
    assert code == 0
    doc = json.loads(out)
    verdicts = err.strip().splitlines()
    assert len(verdicts) == len(doc["rows"]) == 5
    for row, line in zip(doc["rows"], verdicts):
        valid = row["sup_dist_pareto"] < 0.01
        assert ("INVALID" not in line) == valid
        if valid:
            assert row["scr_db"] < -10


def test_sweep_json_and_csv_agree(capsys):
    base = ["sweep", "--alpha", "1.5", "--beta", "0.3", "--mu", "1", "--ratios", "1,100"]
    _, js, _ = run(capsys, base)
    _, cs, _ = run(capsys, base + ["--format", "csv"])
    doc = json.loads(js)
    header, rows = parse_csv(cs)
    for jrow, crow in zip(doc["rows"], rows):
        assert [jrow[k] for k in header] == [float(v) for v in crow]
    assert js == sweep(Scenario(1.5, 0.3, 1.0, 1.0), [1, 100]).to_json()


def test_sweep_all_rows_failed_exit_3(capsys):
    code, _, err = run(capsys, ["sweep", "--alpha", "1.5", "--beta", "0.3", "--mu", "1", "--ratios", "0.1",
                                "--abs-tol", "1e-15", "--rel-tol", "1e-15", "--max-subdivisions", "1"])
    assert code == 3 and "FAILED" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "cutapprox", "cdf", *MODEL, "--grid-q", "0:0.5:3"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert len(proc.stdout.strip().splitlines()) == 4
