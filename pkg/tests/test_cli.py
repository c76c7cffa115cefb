"""Unit tests for the command-line front end, driven through main()."""

import csv
import io
import json
import math

import pytest

from rcsp.bp import ModelParams
from rcsp.cli import main
from rcsp.ensemble import read_instance, sample_instance
from rcsp.interp import ThetaSpec, eta_cluster, functional_exact
from rcsp.thresholds import phi


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_table(capsys):
    code, out, _ = run(capsys, "table", "--kmax", "4")
    assert code == 0
    rows = rows_of(out)
    assert [r["k"] for r in rows] == ["3", "4"]
    assert float(rows[0]["d_star"]) == pytest.approx(6.7417005766105653, abs=2e-9)
    assert rows[0]["ceil_d_star"] == "7"
    assert float(rows[0]["d_first_moment"]) == pytest.approx(7.2282625189596272)
    assert rows[0]["ceil_d1"] == "8"


def test_table_json(capsys):
    code, out, _ = run(capsys, "table", "--kmax", "3", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data[0]["k"] == 3
    assert data[0]["ceil_d_star"] == 7
    assert isinstance(data[0]["d_star"], float)


def test_fixpoint(capsys):
    code, out, _ = run(capsys, "fixpoint", "--k", "3", "--d", "6.74")
    assert code == 0
    row = rows_of(out)[0]
    x = float(row["x"])
    assert x == pytest.approx(0.44653954652540051, abs=1e-11)
    # 17 significant digits round-trip through the text exactly
    assert format(x, ".17g") == row["x"]
    assert float(row["residual"]) < 1e-11
    assert float(row["max_derivative"]) < 1.0


def test_fixpoint_outside_window_exit_2(capsys):
    code, _, err = run(capsys, "fixpoint", "--k", "3", "--d", "4")
    assert code == 2
    assert "window" in err


def test_dstar(capsys):
    code, out, _ = run(capsys, "dstar", "--k", "3")
    assert code == 0
    row = rows_of(out)[0]
    assert float(row["d_star"]) == pytest.approx(6.7417005766105653, abs=2e-9)
    assert row["sign_changes"] == "1"
    assert float(row["bracket_lo"]) < float(row["d_star"]) < float(row["bracket_hi"])


def test_phi_explicit_x(capsys):
    code, out, _ = run(capsys, "phi", "--k", "3", "--d", "7.4", "--x", "0.45")
    assert code == 0
    row = rows_of(out)[0]
    assert float(row["phi"]) == pytest.approx(phi(ModelParams(3, 7.4), 0.45), rel=1e-15)


def test_interp_single_lambda(capsys):
    code, out, _ = run(
        capsys, "interp", "--k", "3", "--d", "7.4", "--betas", "4", "--lam", "0.5"
    )
    assert code == 0
    row = rows_of(out)[0]
    params = ModelParams(3, 7.4)
    expected = functional_exact(
        params, eta_cluster(params, 4.0), ThetaSpec("coloring", 4.0), 0.5
    )
    assert float(row["P"]) == pytest.approx(expected, rel=1e-14)
    assert float(row["P_over_sqrt_beta"]) == pytest.approx(expected / 2.0, rel=1e-14)


def test_interp_lam_needs_one_beta(capsys):
    code, _, err = run(
        capsys, "interp", "--k", "3", "--d", "7.4", "--betas", "4,16", "--lam", "0.5"
    )
    assert code == 1
    assert "exactly one" in err


def test_interp_scan_rows(capsys):
    code, out, _ = run(capsys, "interp", "--k", "3", "--d", "7.4", "--betas", "1,4")
    assert code == 0
    rows = rows_of(out)
    assert [r["beta"] for r in rows] == ["1", "4"]
    assert float(rows[1]["lambda"]) == 0.5


def test_firstmo_csv(capsys):
    code, out, _ = run(capsys, "firstmo", "--k", "3", "--d", "3", "--n", "3")
    assert code == 0
    rows = rows_of(out)
    assert len(rows) == 4
    assert rows[1]["gamma"] == "1/3"
    assert rows[1]["p_gamma"] == "9/28"
    assert rows[1]["contribution"] == "27/28"


def test_firstmo_json(capsys):
    code, out, _ = run(capsys, "firstmo", "--k", "3", "--d", "3", "--n", "3", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data[0]["ez_nae"] == "27/8"
    assert data[0]["ez_col"] == "27/14"
    assert data[0]["ratio"] == pytest.approx(4.0 / 7.0, rel=1e-15)


def test_firstmo_rejects_indivisible(capsys):
    code, _, err = run(capsys, "firstmo", "--k", "3", "--d", "2", "--n", "4")
    assert code == 1
    assert "divisible" in err


def test_gen_solve_z_round_trip(capsys, tmp_path):
    path = tmp_path / "inst.txt"
    code, out, _ = run(
        capsys, "gen", "--n", "6", "--k", "3", "--d", "2",
        "--seed", "1", "--model", "coloring", "--out", str(path),
    )
    assert code == 0
    assert out == ""  # gen writes only the file
    inst = read_instance(path)
    assert inst == sample_instance(6, 3, 2, seed=1, model="coloring")

    code, out, _ = run(capsys, "solve", str(path))
    assert code == 0
    row = rows_of(out)[0]
    assert row["model"] == "coloring"
    assert row["solutions"] == "18"

    code, out, _ = run(capsys, "z", str(path), "--beta", "0")
    assert code == 0
    row = rows_of(out)[0]
    assert float(row["logZ"]) == pytest.approx(6 * math.log(2.0), rel=1e-15)
    assert row["solution_count"] == "18"


def test_gen_deterministic_bytes(capsys, tmp_path):
    p1, p2 = tmp_path / "a.txt", tmp_path / "b.txt"
    for p in (p1, p2):
        code, _, _ = run(
            capsys, "gen", "--n", "9", "--k", "3", "--d", "2",
            "--seed", "42", "--out", str(p),
        )
        assert code == 0
    assert p1.read_bytes() == p2.read_bytes()


def test_solve_missing_file_exit_2(capsys, tmp_path):
    code, _, err = run(capsys, "solve", str(tmp_path / "nope.txt"))
    assert code == 2
    assert "computation failed" in err


def test_solve_malformed_file_exit_1(capsys, tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("p rcsp nae 3 6 4 2\nc 5 0 6 0 3 0\n")
    code, _, err = run(capsys, "solve", str(path))
    assert code == 1
    assert "line 1" in err


def test_sweep_matches_library(capsys):
    from rcsp.ensemble import sat_sweep

    code, out, _ = run(
        capsys, "sweep", "--k", "3", "--n", "9", "--d", "2,4",
        "--trials", "8", "--seed", "7", "--model", "coloring",
    )
    assert code == 0
    rows = rows_of(out)
    points = sat_sweep(3, 9, [2, 4], trials=8, seed=7, model="coloring")
    for row, point in zip(rows, points):
        assert int(row["d"]) == point.d
        assert float(row["sat_fraction"]) == point.sat_fraction


def test_concentrate_matches_library(capsys):
    from rcsp.ensemble import concentration_experiment

    code, out, _ = run(
        capsys, "concentrate", "--k", "3", "--d", "2", "--n", "6,9",
        "--beta", "1", "--samples", "3", "--seed", "5",
    )
    assert code == 0
    rows = rows_of(out)
    stats = concentration_experiment([6, 9], 3, 2, 1.0, 3, 5)
    for row, s in zip(rows, stats):
        assert float(row["mean"]) == pytest.approx(s.mean, rel=1e-15)
        assert float(row["std"]) == pytest.approx(s.std, rel=1e-15)


def test_certify_single_and_errors(capsys):
    code, out, _ = run(capsys, "certify", "--id", "alpha5")
    assert code == 0
    row = rows_of(out)[0]
    assert row["status"] == "pass"
    assert float(row["margin"]) < 0.0

    code, _, err = run(capsys, "certify", "--id", "no_such_id")
    assert code == 1

    code, _, err = run(capsys, "certify", "--digits", "30")
    assert code == 1
    assert "50" in err


def test_certify_full_json(capsys):
    code, out, _ = run(capsys, "certify", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert len(data) == 18
    assert all(entry["passed"] is True for entry in data)
    assert all(entry["inconclusive"] is False for entry in data)


def test_out_flag_writes_file(capsys, tmp_path):
    path = tmp_path / "table.csv"
    code, out, _ = run(capsys, "table", "--kmax", "3", "--out", str(path))
    assert code == 0
    assert out == ""
    text = path.read_text()
    assert text.startswith("k,d_star,")
    code, out, _ = run(capsys, "table", "--kmax", "3")
    assert out == text


def test_usage_errors_exit_1(capsys):
    assert run(capsys, "table", "--bogus")[0] == 1
    assert run(capsys, "fixpoint", "--k", "3")[0] == 1  # missing --d
    assert run(capsys, "nonsense")[0] == 1
    assert run(capsys)[0] == 1
