import json
from pathlib import Path

import pytest

from hhwb.cli import main

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
GROUND = str(FIXTURES / "ground_field.json")
DUAL = str(FIXTURES / "dual_numbers.json")
QUIVER = str(FIXTURES / "quiver_a2.json")
BROKEN = str(FIXTURES / "broken_nonassociative.json")


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


# -- validate ---------------------------------------------------------------


def test_validate_good_fixtures(capsys):
    for path in (GROUND, DUAL, QUIVER):
        code, out, _ = run(capsys, "validate", path)
        assert code == 0
        assert "ok" in out


def test_validate_broken_fixture(capsys):
    code, out, _ = run(capsys, "validate", BROKEN)
    assert code == 1
    assert "associativity" in out


def test_validate_parse_error(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run(capsys, "validate", str(bad))
    assert code == 2
    assert "line" in err


def test_validate_missing_file(capsys):
    code, _, err = run(capsys, "validate", "/does/not/exist.json")
    assert code == 2


# -- compute ----------------------------------------------------------------


def test_compute_ground_field(capsys):
    rep = run_json(capsys, "compute", GROUND, "--mode", "exact",
                   "--max-level", "3", "--degrees=-2..0")
    dims = {int(k): v["dim"] for k, v in rep["results"].items()}
    assert dims == {0: 1, -1: 0, -2: 0}
    assert all(v["certificate"] == "exact" for v in rep["results"].values())


def test_compute_dual_numbers(capsys):
    rep = run_json(capsys, "compute", DUAL, "--mode", "exact",
                   "--max-level", "5", "--degrees=-4..0")
    dims = {int(k): v["dim"] for k, v in rep["results"].items()}
    assert dims == {0: 2, -1: 1, -2: 1, -3: 1, -4: 1}


def test_compute_quiver(capsys):
    rep = run_json(capsys, "compute", QUIVER, "--mode", "exact",
                   "--max-level", "4", "--degrees=-3..0")
    dims = {int(k): v["dim"] for k, v in rep["results"].items()}
    assert dims == {0: 2, -1: 0, -2: 0, -3: 0}


def test_compute_modular_reports_primes(capsys):
    rep = run_json(capsys, "compute", DUAL, "--max-level", "3",
                   "--degrees=-1..0")
    for v in rep["results"].values():
        assert v["mode"] == "modular"
        assert len(v["primes"]) == 2
        assert v["agreed"]


def test_compute_with_permutation_twist(capsys):
    rep = run_json(capsys, "compute", DUAL, "--mode", "exact",
                   "--max-level", "4", "--degrees=-3..0",
                   "--twist", "perm:2:(1 2)")
    dims = {int(k): v["dim"] for k, v in rep["results"].items()}
    assert dims == {0: 2, -1: 1, -2: 1, -3: 1}


def test_compute_bad_twist(capsys):
    code, _, err = run(capsys, "compute", DUAL, "--twist", "perm:2:(1 3)")
    assert code == 2


def test_compute_bad_degree_range(capsys):
    code, _, err = run(capsys, "compute", DUAL, "--degrees", "zero")
    assert code == 2


def test_compute_out_and_csv(tmp_path, capsys):
    out = tmp_path / "report.json"
    csv = tmp_path / "table.csv"
    code, _, err = run(capsys, "compute", GROUND, "--mode", "exact",
                       "--max-level", "2", "--degrees=-1..0",
                       "--out", str(out), "--csv", str(csv))
    assert code == 0
    rep = json.loads(out.read_text())
    assert rep["results"]["0"]["dim"] == 1
    lines = csv.read_text().strip().splitlines()
    assert lines[0] == "degree,dim,certificate"
    assert lines[1] == "0,1,exact"
    assert lines[2] == "-1,0,exact"


def test_compute_cache_is_byte_identical(tmp_path, capsys):
    cdir = tmp_path / "cache"
    args = ["compute", DUAL, "--mode", "exact", "--max-level", "3",
            "--degrees=-2..0", "--cache-dir", str(cdir)]
    code1, out1, _ = run(capsys, *args)
    cached_files = list(cdir.glob("*.json"))
    assert code1 == 0 and len(cached_files) == 1
    code2, out2, _ = run(capsys, *args)
    assert code2 == 0
    assert out1 == out2
    # different options miss the cache
    code3, _, _ = run(capsys, "compute", DUAL, "--mode", "exact",
                      "--max-level", "2", "--degrees=-1..0",
                      "--cache-dir", str(cdir))
    assert code3 == 0
    assert len(list(cdir.glob("*.json"))) == 2


def test_cache_dir_from_env(tmp_path, capsys, monkeypatch):
    cdir = tmp_path / "envcache"
    monkeypatch.setenv("HHWB_CACHE_DIR", str(cdir))
    code, _, _ = run(capsys, "compute", GROUND, "--mode", "exact",
                     "--max-level", "2", "--degrees=0..0")
    assert code == 0
    assert len(list(cdir.glob("*.json"))) == 1


# -- decompose --------------------------------------------------------------


def test_decompose_ground_field(capsys):
    rep = run_json(capsys, "decompose", GROUND, "--n", "5", "--mode", "exact",
                   "--max-level", "2", "--degrees=0..0")
    assert rep["results"]["lhs_totals"] == {"0": 7}
    assert rep["results"]["verdicts"] == {"0": "Equal"}


def test_decompose_dual_numbers(capsys):
    rep = run_json(capsys, "decompose", DUAL, "--n", "2", "--mode", "exact",
                   "--max-level", "4", "--degrees=-3..0")
    assert rep["results"]["lhs_totals"] == \
        {"0": 5, "-1": 3, "-2": 3, "-3": 4}
    assert all(v == "Equal" for v in rep["results"]["verdicts"].values())


def test_decompose_heuristic_exit_code(capsys):
    # degree -2 is beyond the max-level-2 certificate window
    code, out, _ = run(capsys, "decompose", DUAL, "--n", "2",
                       "--mode", "exact", "--max-level", "2",
                       "--degrees=-2..0")
    assert code == 3
    rep = json.loads(out)
    assert rep["results"]["verdicts"]["-2"] == "Heuristic"
    assert rep["results"]["verdicts"]["0"] == "Equal"


# -- series -----------------------------------------------------------------


def test_series_partition_count(capsys):
    rep = run_json(capsys, "series", "--dims", "0:1", "--n", "6")
    assert rep["results"] == {"0": 11}


def test_series_dual_numbers(capsys):
    rep = run_json(capsys, "series", "--dims", "0:2,-1:1,-2:1,-3:1",
                   "--n", "2")
    assert rep["results"]["0"] == 5
    assert rep["results"]["-1"] == 3
    assert rep["results"]["-2"] == 3
    assert rep["results"]["-3"] == 4


def test_series_empty_dims(capsys):
    rep = run_json(capsys, "series", "--dims", "", "--n", "1")
    assert rep["results"] == {}


def test_series_mixed_sign_contract(capsys):
    code, _, err = run(capsys, "series", "--dims", "1:1,-1:1", "--n", "2")
    assert code == 1
    code, out, _ = run(capsys, "series", "--dims", "1:1,-1:1", "--n", "2",
                       "--allow-truncated")
    assert code == 0
