import csv
import json
import math
import subprocess
import sys

import pytest

from gridseg import cli
from gridseg import deterministic as det
from gridseg import montecarlo as mc
from gridseg import stochastic as st
from gridseg.grid_core import GridSpec


def run(*argv):
    rec, code, err = cli.run(list(argv))
    return rec, code, err


def out(rec, key):
    return rec["outputs"][key]["value"]


# ---------------------------------------------------------------------------
# max-tiles / min-length


@pytest.mark.parametrize("a, b, length, tiles", [("1.35", "1", "4.7", 8), ("1", "1", "1", 3), ("1.35", "1", "2.4", 5)])
def test_max_tiles(a, b, length, tiles):
    rec, code, _ = run("max-tiles", "--a", a, "--b", b, "--len", length)
    assert code == 0
    assert out(rec, "tiles") == tiles
    assert rec["outputs"]["tiles"]["method"] == "closed-form"
    assert rec["command"] == "max-tiles"
    assert rec["inputs"] == {"a": float(a), "b": float(b), "len": float(length)}


def test_max_tiles_witness_and_oracle():
    rec, code, _ = run("max-tiles", "--a", "1.35", "--b", "1", "--len", "4.7", "--witness", "--oracle")
    assert code == 0
    assert rec["verdict"] == "PASS"
    assert out(rec, "oracle_tiles") == 8
    assert rec["outputs"]["oracle_tiles"]["method"] == "brute-force"
    (x1, y1), (x2, y2) = out(rec, "witness")
    assert math.hypot(x2 - x1, y2 - y1) == pytest.approx(4.7, rel=1e-12)
    assert out(rec, "witness_tiles") == 8


def test_max_tiles_oracle_mismatch_exit(monkeypatch):
    monkeypatch.setattr(mc, "brute_force_max_tiles", lambda length, grid: (99, det.PairIJ(50, 50)))
    rec, code, _ = run("max-tiles", "--len", "1", "--oracle")
    assert code == cli.EXIT_MISMATCH
    assert rec["verdict"] == "FAIL"


@pytest.mark.parametrize(
    "argv",
    [
        ("max-tiles", "--a", "1", "--b", "1", "--len", "-1"),
        ("max-tiles", "--len", "0"),
        ("max-tiles", "--a", "0", "--len", "1"),
        ("max-tiles", "--len", "abc"),
        ("max-tiles",),
        ("min-length", "--tiles", "0"),
        ("seq", "funti", "--count", "0"),
        ("simulate", "--len", "1", "--samples", "0"),
        ("prob", "prob-max", "--a", "1.35", "--len", "1"),
        ("prob", "tail-i", "--len", "1"),
        ("nonsense",),
    ],
)
def test_errors_exit_one(argv):
    rec, code, err = run(*argv)
    assert rec is None and code == cli.EXIT_DOMAIN and err


def test_prob_max_rejection_explains():
    _, _, err = run("prob", "prob-max", "--a", "1.35", "--len", "1")
    assert "unit square" in err


@pytest.mark.parametrize("tiles, expected", [(3, 0.0), (1, 0.0), (8, math.sqrt(13))])
def test_min_length(tiles, expected):
    rec, code, _ = run("min-length", "--a", "1", "--b", "1", "--tiles", str(tiles))
    assert code == 0
    assert out(rec, "inf_length") == pytest.approx(expected, rel=1e-15)
    assert "not attained" in rec["outputs"]["note"]
    assert "rounding_residual" in rec["outputs"]


def test_parse_real_constants():
    assert cli.parse_real("sqrt2") == math.sqrt(2)
    assert cli.parse_real("sqrt(2)") == math.sqrt(2)
    assert cli.parse_real("1/sqrt2") == 1 / math.sqrt(2)
    assert cli.parse_real("-1.5") == -1.5
    rec, _, _ = run("max-tiles", "--len", "sqrt2")
    assert out(rec, "tiles") == 4


# ---------------------------------------------------------------------------
# seq


def test_seq_json():
    rec, code, _ = run("seq", "funti", "--count", "5")
    assert code == 0 and out(rec, "terms") == [3, 5, 7, 8, 9]
    rec, _, _ = run("seq", "funli", "--count", "9")
    assert out(rec, "terms") == [1, 1, 1, 2, 2, 3, 3, 4, 5]


def test_seq_lines(capsys):
    assert cli.main(["seq", "funti", "--count", "5", "--lines"]) == 0
    assert capsys.readouterr().out.split() == ["3", "5", "7", "8", "9"]


# ---------------------------------------------------------------------------
# prob / simulate


def test_prob_closed_forms():
    rec, _, _ = run("prob", "avg", "--a", "1", "--b", "1", "--len", "1")
    assert out(rec, "value") == pytest.approx(4 / math.pi + 1, rel=1e-15)
    rec, _, _ = run("prob", "prob-max", "--len", "1")
    assert out(rec, "value") == pytest.approx(1 / math.pi, rel=1e-14)
    rec, _, _ = run("prob", "tail-i", "--a", "1", "--b", "1", "--len", "0.5", "--n", "2")
    assert out(rec, "value") == pytest.approx(1 / math.pi, rel=1e-14)


def test_prob_simulate_verdict():
    rec, code, _ = run("prob", "avg", "--len", "1", "--simulate", "50000", "--seed", "3")
    sim = rec["outputs"]["simulation"]
    assert code == 0 and rec["verdict"] == "PASS" == sim["verdict"]
    assert sim["method"] == "monte-carlo"
    assert sim["reference"] == out(rec, "value")
    assert rec["method"] == ["closed-form", "monte-carlo"]


def test_simulate_record():
    rec, code, _ = run("simulate", "--a", "1", "--b", "1", "--len", "1", "--samples", "50000", "--seed", "42")
    assert code == 0 and rec["verdict"] == "PASS"
    o = rec["outputs"]
    assert o["max_tiles"]["value"] == 3
    assert o["avg_tiles"]["reference"] == pytest.approx(4 / math.pi + 1)
    assert o["prob_at_max"]["reference"] == pytest.approx(1 / math.pi)
    assert set(o["tail_i"]) == {"1", "2", "3"}


def test_simulate_rectangular_grid_has_no_prob_max_reference():
    rec, code, _ = run("simulate", "--a", "2", "--b", "3", "--len", "5", "--samples", "20000")
    assert code == 0
    assert "reference" not in rec["outputs"]["prob_at_max"]


def test_simulate_same_seed_identical_bytes(capsys):
    argv = ["simulate", "--a", "1.35", "--b", "1", "--len", "2.4", "--samples", "30000", "--seed", "7", "--chunks", "3"]
    cli.main(argv)
    first = capsys.readouterr().out
    cli.main(argv + ["--workers", "3"])
    assert capsys.readouterr().out == first


def test_seed_environment(monkeypatch):
    argv = ["prob", "avg", "--len", "1", "--simulate", "20000"]
    monkeypatch.setenv("GRIDSEG_SEED", "5")
    from_env, _, _ = run(*argv)
    assert from_env["inputs"]["seed"] == 5
    explicit, _, _ = run(*argv, "--seed", "5")
    assert explicit == from_env
    flag_wins, _, _ = run(*argv, "--seed", "6")
    assert flag_wins["inputs"]["seed"] == 6
    monkeypatch.delenv("GRIDSEG_SEED")
    default, _, _ = run(*argv)
    assert default["inputs"]["seed"] == 0
    monkeypatch.setenv("GRIDSEG_SEED", "x")
    assert run(*argv)[1] == cli.EXIT_DOMAIN


# ---------------------------------------------------------------------------
# thin adapter, JSON round trip


def test_outputs_equal_library_calls():
    g = GridSpec(1.35, 1)
    rec, _, _ = run("max-tiles", "--a", "1.35", "--b", "1", "--len", "4.7")
    assert out(rec, "tiles") == det.funt(4.7, g)
    rec, _, _ = run("min-length", "--a", "1.35", "--b", "1", "--tiles", "17")
    assert out(rec, "inf_length") == det.funl(17, g)
    rec, _, _ = run("prob", "tail-j", "--a", "1.35", "--b", "1", "--len", "3.3", "--n", "3")
    assert out(rec, "value") == st.tail_prob_j(3, 3.3, g)
    rec, _, _ = run("prob", "avg", "--a", "1.35", "--b", "1", "--len", "3.3", "--simulate", "10000", "--seed", "4")
    est = mc.estimate_avg_tiles(mc.SamplerConfig(g, 3.3, 10000, 4))
    assert rec["outputs"]["simulation"]["value"] == est.mean
    assert rec["outputs"]["simulation"]["std_error"] == est.std_error


def test_json_round_trip(capsys):
    for argv in (
        ["max-tiles", "--a", "sqrt2", "--len", "7.3", "--witness"],
        ["min-length", "--a", "1.35", "--tiles", "40"],
        ["prob", "prob-max", "--len", "2.1", "--simulate", "1000"],
    ):
        cli.main(argv)
        text = capsys.readouterr().out
        parsed = json.loads(text)
        assert parsed == cli.run(argv)[0]
        assert json.dumps(parsed) + "\n" == text


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "gridseg", "max-tiles", "--a", "1.35", "--b", "1", "--len", "4.7"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert res.returncode == 0
    assert json.loads(res.stdout)["outputs"]["tiles"]["value"] == 8
    bad = subprocess.run([sys.executable, "-m", "gridseg", "max-tiles", "--len", "-1"], capture_output=True, text=True)
    assert bad.returncode == 1 and "error" in bad.stderr and bad.stdout == ""


# ---------------------------------------------------------------------------
# curve


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


@pytest.mark.parametrize("a, b", [(1, 1), (5, 1), (5, 1.5), (10, 3)])
def test_funt_curve_is_closed_form_step(tmp_path, a, b):
    path = tmp_path / "funt.csv"
    rec, code, _ = run("curve", "funt", "--a", str(a), "--b", str(b), "--range", "0", "8", "--step", "0.01", "--out", str(path))
    assert code == 0
    header, rows = read_csv(path)
    assert header == ["x", "value", "method"]
    assert rec["outputs"]["rows"] == len(rows) == 800
    xs = [float(r[0]) for r in rows]
    vals = [int(r[1]) for r in rows]
    assert vals == [det.funt(x, GridSpec(a, b)) for x in xs]
    assert all(v1 >= v0 for v0, v1 in zip(vals, vals[1:]))
    assert vals[0] == 3


def test_funl_curve(tmp_path):
    path = tmp_path / "funl.json"
    run("curve", "funl", "--range", "1", "30", "--out", str(path), "--format", "json")
    data = json.loads(path.read_text())
    assert [d["x"] for d in data] == list(range(1, 31))
    assert [d["value"] for d in data] == [det.funl(T, GridSpec()) for T in range(1, 31)]


def test_ras_curve_peak(tmp_path):
    path = tmp_path / "ras.csv"
    run("curve", "ras", "--range", "0.1", "10", "--step", "0.01", "--out", str(path))
    _, rows = read_csv(path)
    best = max(rows, key=lambda r: float(r[1]))
    assert float(best[0]) == pytest.approx(1.0)
    assert float(best[1]) == pytest.approx(0.9003, abs=5e-5)


def test_probmax_curve_drops_after_first_breakpoint(tmp_path):
    path = tmp_path / "pm.csv"
    run("curve", "probmax", "--range", "0.5", "1.5", "--step", "0.001", "--out", str(path))
    _, rows = read_csv(path)
    pts = {round(float(r[0]), 6): float(r[1]) for r in rows}
    assert pts[1.0] == pytest.approx(1 / math.pi, rel=1e-9)
    assert pts[1.001] < 1e-5


def test_probmax_curve_rejects_rectangular(tmp_path):
    _, code, _ = run("curve", "probmax", "--a", "2", "--range", "0.5", "1.5", "--out", str(tmp_path / "x.csv"))
    assert code == cli.EXIT_DOMAIN


def test_pairs_curve(tmp_path):
    path = tmp_path / "pairs.csv"
    run("curve", "pairs", "--a", "1.35", "--b", "1", "--range", "3", "40", "--out", str(path))
    _, rows = read_csv(path)
    labels = {r[2] for r in rows}
    assert labels == {"optimal-pair", "upper-bound-line", "lower-bound-line"}
    pset = det.OptimalPairSet(GridSpec(1.35, 1))
    pts = [(int(r[0]), int(r[1])) for r in rows if r[2] == "optimal-pair"]
    assert pts == [(p.i, p.j) for p in pset.pairs(40)]


def test_curve_errors(tmp_path):
    _, code, err = run("curve", "funt", "--range", "5", "1", "--out", str(tmp_path / "x.csv"))
    assert code == cli.EXIT_DOMAIN and "empty range" in err
    _, code, err = run("curve", "funt", "--range", "0", "1", "--out", str(tmp_path / "missing" / "x.csv"))
    assert code == cli.EXIT_DOMAIN and "cannot write" in err
    _, code, _ = run("curve", "funt", "--range", "0", "1", "--step", "0", "--out", str(tmp_path / "x.csv"))
    assert code == cli.EXIT_DOMAIN
