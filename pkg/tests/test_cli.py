import csv
import io
import json
import time

import numpy as np
import pytest

from polycorners.cli import main, parse_primes
from polycorners.corners import generate_set
from polycorners.serialize import write_gridfn, write_set
from polycorners.transform import GridFn


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_primes():
    assert parse_primes("101..113") == [101, 103, 107, 109, 113]
    assert parse_primes("5,7,11") == [5, 7, 11]


def test_kernel_cache(tmp_path, capsys, caplog):
    args = ("kernel", "--p", "101", "--phi1", "0,0,1", "--phi2", "0,0,0,1",
            "--cache-dir", str(tmp_path), "-v")
    code, out, err = run(capsys, *args)
    first = json.loads(out)
    assert code == 0 and first["cache"] == "miss"
    assert list(tmp_path.iterdir())
    caplog.clear()
    with caplog.at_level("INFO", logger="polycorners"):
        code, out, err = run(capsys, *args)
    second = json.loads(out)
    assert second["cache"] == "hit" and "cache hit" in caplog.text
    assert first["checksum"] == second["checksum"]


def test_not_prime(capsys):
    code, out, err = run(capsys, "kernel", "--p", "9")
    assert code == 2 and "not prime" in err


def test_usage_error(capsys):
    assert run(capsys, "verify-weil", "--p", "x")[0] == 2
    assert run(capsys, "no-such-command")[0] == 2


def test_sweep_weil(capsys):
    code, out, _ = run(capsys, "sweep", "weil", "--primes", "101..199")
    rows = list(csv.DictReader(io.StringIO(out)))
    ps = [int(r["p"]) for r in rows]
    assert code == 0
    assert ps == sorted(ps) and ps[0] == 101 and ps[-1] == 199 and len(ps) == 21
    assert all(float(r["ratio"]) <= 2 for r in rows)


def test_sweep_main_is_report_only_and_deterministic(capsys):
    args = ("sweep", "main", "--primes", "31,37,41,43,47", "--seed", "7", "--trials", "2")
    code, out1, _ = run(capsys, *args)
    rows = list(csv.DictReader(io.StringIO(out1)))
    assert code == 0 and len(rows) == 5
    assert all(r["passed"] == "" for r in rows)
    assert run(capsys, *args)[1] == out1


def test_sweep_workers_preserve_order(capsys):
    base = ("sweep", "weil", "--primes", "53,31,47,37")
    _, serial, _ = run(capsys, *base)
    _, parallel, _ = run(capsys, *base, "--workers", "2")
    strip = lambda text: [{k: v for k, v in r.items() if k != "config"}
                          for r in csv.DictReader(io.StringIO(text))]
    assert strip(serial) == strip(parallel)
    assert [r["p"] for r in strip(serial)] == ["31", "37", "47", "53"]


def test_sweep_empty_range(capsys):
    code, _, err = run(capsys, "sweep", "weil", "--primes", "90..96")
    assert code == 2 and "empty" in err


def test_verify_all(capsys):
    t0 = time.perf_counter()
    code, out, _ = run(capsys, "verify-all", "--p", "31", "--seed", "1")
    assert time.perf_counter() - t0 < 60
    summary = json.loads(out)
    assert code == 0 and summary["passed"] and not summary["failures"]
    assert summary["config"]["p"] == 31
    assert run(capsys, "verify-all", "--p", "31", "--seed", "1")[1] == out


def test_verify_all_config_gate(capsys):
    args = ("verify-all", "--p", "31", "--phi1", "0,0,0,1", "--phi2", "0,0,0,2")
    code, _, err = run(capsys, *args)
    assert code == 2 and "--force" in err
    code, out, err = run(capsys, *args, "--force")
    assert code in (0, 1)
    assert all(r.get("flagged") for r in json.loads(out)["results"])


def test_csv_and_json_agree(capsys):
    base = ("verify-k4", "--p", "31", "--h", "1,1;2,5")
    _, js, _ = run(capsys, *base, "--format", "json")
    _, cs, _ = run(capsys, *base, "--format", "csv")
    jrows = [json.loads(line) for line in js.splitlines()]
    crows = list(csv.DictReader(io.StringIO(cs)))
    assert len(jrows) == len(crows) == 2
    for j, c in zip(jrows, crows):
        for key in ("measured", "scale", "ratio", "bound"):
            assert float(c[key]) == j[key]
        assert json.loads(c["witness"]) == j["witness"]
        assert json.loads(c["params"]) == j["params"]


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"p": 37, "phi1": [0, 0, 1], "phi2": [0, 0, 0, 1], "seed": 3}))
    _, out, _ = run(capsys, "verify-weil", "--config", str(cfg))
    assert json.loads(out)["p"] == 37
    _, out, _ = run(capsys, "verify-weil", "--config", str(cfg), "--p", "41")
    row = json.loads(out)
    assert row["p"] == 41 and row["config"]["seed"] == 3
    cfg.write_text(json.dumps({"bogus": 1}))
    assert run(capsys, "verify-weil", "--config", str(cfg))[0] == 2


def test_avg_with_files(tmp_path, capsys):
    p = 13
    rng = np.random.default_rng(2)
    for name in ("f1", "f2"):
        write_gridfn(tmp_path / name, GridFn(p, rng.choice([-1.0, 1.0], (p, p))))
    code, out, _ = run(capsys, "avg", "--p", str(p), "--f1", str(tmp_path / "f1"),
                       "--f2", str(tmp_path / "f2"))
    row = json.loads(out)
    assert code == 0
    assert set(row) == {"p", "phi1", "phi2", "residual", "ratio", "j2_norm", "j3_norm"}
    code, out, _ = run(capsys, "avg", "--p", "11", "--f1", str(tmp_path / "f1"),
                       "--f2", str(tmp_path / "f2"))
    assert code == 2


def test_corners_and_roth(tmp_path, capsys):
    A = generate_set("random", 31, delta=0.5, seed=3)
    write_set(tmp_path / "a.txt", A)
    code, out, _ = run(capsys, "corners", "--set", str(tmp_path / "a.txt"))
    row = json.loads(out)
    assert code == 0 and (row["total_pairs"], row["nondegenerate_pairs"]) == (3738, 3274)
    assert row["fourier_density"] == pytest.approx(row["density"], abs=1e-12)
    code, out, _ = run(capsys, "roth-chain", "--p", "31", "--random", "0.4,5")
    assert code == 0 and json.loads(out)["holds"]


def test_single_verifiers(capsys):
    assert run(capsys, "verify-gauss", "--p", "31", "--phi1", "0,1,1", "--phi2", "0,0,3")[0] == 0
    assert run(capsys, "verify-gauss", "--p", "31")[0] == 2
    assert run(capsys, "verify-e3", "--p", "7", "--trials", "50")[0] == 0
    code, out, _ = run(capsys, "verify-main", "--p", "31", "--ceiling", "10")
    assert code == 0 and json.loads(out)["passed"]
    code, out, _ = run(capsys, "verify-bombieri", "--p", "101", "--f1", "1,2", "--f2", "0,1,0,1")
    assert code == 0 and json.loads(out)["passed"]
    code, out, _ = run(capsys, "verify-bombieri", "--p", "31")
    assert code == 0 and json.loads(out)["name"] == "bombieri_family"
    assert run(capsys, "verify-k4", "--p", "31", "--h", "0,0")[0] == 2
