"""
End-to-end tests of the densitometer command line through cli.run.
"""

import json

import pytest

from src.cli import EXIT_ASSERTION, EXIT_USAGE, EXIT_VALIDATION, run
from src.nbrw import WalkReport
from src.report import COLUMNS


def _run(capsys, *argv):
    code = run(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_rates_table_csv(capsys):
    code, out, _ = _run(capsys, "rates")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == ",".join(COLUMNS["rates"])
    assert len(lines) == 7
    assert any(line.startswith("P,") and ",3," in line for line in lines)


def test_single_rate(capsys):
    code, out, _ = _run(capsys, "rates", "--nu", "1/2,0", "--format", "json")
    assert code == 0
    row = json.loads(out)["rows"][0]
    assert row["rate"] == row["oracle"] == row["decay_threshold"] == "3"


def test_rate_outside_interval_is_a_validation_error(capsys):
    code, out, err = _run(capsys, "rates", "--nu", "2,0")
    assert code == EXIT_VALIDATION
    assert out == ""
    assert err.startswith("error:")


def test_packets_json(capsys):
    code, out, _ = _run(capsys, "packets", "--form", "split", "--levi", "M", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert set(payload) == {"config", "rows"}
    assert set(payload["config"]) == {"command", "dense_limit", "format", "params", "seed"}
    assert payload["config"]["command"] == "packets"
    (row,) = payload["rows"]
    assert list(row) == COLUMNS["packets"]
    assert row["size"] == 3
    assert row["degrees"] == "{2,4} {3} {3}"
    assert row["total_check"] is True


def test_orbits(capsys):
    code, out, _ = _run(capsys, "orbits", "--family", "C", "--N", "4")
    assert code == 0
    assert len(out.splitlines()) == 5


def test_spherical_series(capsys):
    code, out, _ = _run(capsys, "spherical", "--radii", "1,2,3", "--format", "json")
    assert code == 0
    rows = json.loads(out)["rows"]
    assert [row["radius"] for row in rows] == [1, 2, 3]
    assert all(row["threshold"] == "3" and row["converges"] is False for row in rows)


def test_walk_is_deterministic(capsys):
    argv = ("walk", "--random-regular", "50", "3", "--seed", "4", "--format", "json")
    code, first, _ = _run(capsys, *argv)
    assert code == 0
    _, second, _ = _run(capsys, *argv)
    assert first == second
    row = json.loads(first)["rows"][0]
    assert row["graph_id"] == "rr-n50-k3-s4"
    assert row["lower_bound"] <= row["t_mix"]


def test_walk_seed_fan_out(capsys):
    code, out, _ = _run(capsys, "walk", "--random-regular", "50", "3", "--seeds", "1,2", "--format", "json")
    assert code == 0
    ids = [row["graph_id"] for row in json.loads(out)["rows"]]
    assert ids == ["rr-n50-k3-s1", "rr-n50-k3-s2"]


def test_walk_on_periodic_graph_fails_validation(capsys, tmp_path):
    path = tmp_path / "cycle.txt"
    path.write_text("3 1\n0 1\n1 2\n2 0\n")
    code, _, err = _run(capsys, "walk", "--graph", str(path))
    assert code == EXIT_VALIDATION
    assert "period" in err


def test_walk_on_single_vertex(capsys, tmp_path):
    path = tmp_path / "point.txt"
    path.write_text("1 2\n0 0\n0 0\n")
    code, out, _ = _run(capsys, "walk", "--graph", str(path), "--format", "json")
    assert code == 0
    (row,) = json.loads(out)["rows"]
    assert (row["n"], row["d"]) == (1, 2)
    assert row["t_mix"] == row["lower_bound"] == 0
    assert row["log_d_n"] == 0.0
    assert row["cutoff_ratio"] == 0.0
    assert row["diameter"] == row["almost_diameter"] == 0


def test_broken_report_bound_exits_as_assertion(capsys, monkeypatch):
    def inconsistent(g, **kwargs):
        return WalkReport(
            graph_id=g.label, seed=0, n=g.n, d=g.d, eps=0.25, t_mix=0, log_d_n=1.0, cutoff_ratio=0.0,
            lower_bound=5, ad_eps=0.1, almost_diameter=0, diameter=0, collision_horizon=0,
            starts_exact=True, distances_exact=True,
        )

    monkeypatch.setattr("src.cli.walk_report", inconsistent)
    code, out, err = _run(capsys, "walk", "--cayley", "symmetric:3")
    assert code == EXIT_ASSERTION
    assert out == ""
    assert err.startswith("assertion failed:")
    assert "lower bound 5 exceeds t_mix 0" in err


def test_bad_dense_limit_flag_is_a_validation_error(capsys):
    code, _, err = _run(capsys, "ledger", "--dense-limit", "0")
    assert code == EXIT_VALIDATION
    assert err.startswith("error:")


def test_spectrum_rows(capsys):
    code, out, _ = _run(capsys, "spectrum", "--cayley", "symmetric:3", "--r-grid", "3,4", "--format", "json")
    assert code == 0
    rows = json.loads(out)["rows"]
    assert [row["r"] for row in rows] == [3.0, 4.0]
    assert all(row["density_count"] == 0 and row["count_exact"] for row in rows)
    assert rows[0]["n"] == 6


def test_spectrum_dense_limit(capsys):
    code, _, err = _run(capsys, "spectrum", "--cayley", "symmetric:3", "--dense-limit", "4")
    assert code == EXIT_VALIDATION
    assert "dense limit" in err


def test_ledger_table(capsys):
    code, out, _ = _run(capsys, "ledger", "--format", "table")
    assert code == 0
    assert "20/3" in out
    assert len(out.splitlines()) == 7


def test_gross_defaults(capsys):
    code, out, _ = _run(capsys, "gross", "--format", "json")
    assert code == 0
    rows = json.loads(out)["rows"]
    assert len(rows) == 8
    assert [row["gross_form_exists"] for row in rows[:2]] == [False, True]


def test_gross_single_profile(capsys):
    code, out, _ = _run(capsys, "gross", "--n", "2", "--a", "1,2", "--format", "json")
    assert code == 0
    (row,) = json.loads(out)["rows"]
    assert row["signs"] == "+1,-1"
    assert row["gross_form_exists"] is False


@pytest.mark.parametrize("argv,value", [
    (("--kind", "order", "--family", "Sp", "--rank", "2", "--p", "2"), 720),
    (("--kind", "order", "--rank", "1", "--q", "12"), 1152),
])
def test_counts_order(capsys, argv, value):
    code, out, _ = _run(capsys, "counts", *argv, "--format", "json")
    assert code == 0
    assert json.loads(out)["rows"][0]["value"] == value


def test_counts_gsk_and_induction(capsys):
    code, out, _ = _run(capsys, "counts", "--kind", "gsk", "--k", "1", "--n", "2", "--format", "json")
    assert code == 0
    assert [row["value"] for row in json.loads(out)["rows"]] == [2, 5]
    code, out, _ = _run(capsys, "counts", "--kind", "induction", "--format", "json")
    assert [row["value"] for row in json.loads(out)["rows"]] == [4, 4, 4]


def test_out_file(capsys, tmp_path):
    target = tmp_path / "ledger.csv"
    code, out, _ = _run(capsys, "ledger", "--out", str(target))
    assert code == 0
    assert out == ""
    assert target.read_text().splitlines()[0] == ",".join(COLUMNS["ledger"])


@pytest.mark.parametrize("argv", [
    ("bogus",),
    ("walk",),
    ("rates", "--format", "xml"),
    ("walk", "--graph", "a.txt", "--cayley", "cyclic:3"),
    ("spherical", "--r", "x"),
])
def test_usage_errors(capsys, argv):
    code, out, _ = _run(capsys, *argv)
    assert code == EXIT_USAGE
    assert out == ""


def test_help_exits_cleanly(capsys):
    code, out, _ = _run(capsys, "--help")
    assert code == 0
    assert "densitometer" in out


def test_bad_environment(capsys, monkeypatch):
    monkeypatch.setenv("DENSITOMETER_THREADS", "0")
    code, _, err = _run(capsys, "ledger")
    assert code == EXIT_VALIDATION
    assert "DENSITOMETER_THREADS" in err
