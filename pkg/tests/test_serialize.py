import csv
import io
import json

import numpy as np
import pytest

from polycorners.corners import generate_set
from polycorners.fp import parse_poly
from polycorners.kernel import kernel_fast
from polycorners.serialize import (
    CacheCorrupt,
    cached_kernel,
    csv_text,
    json_line,
    kernel_cache_path,
    read_gridfn,
    read_kernel,
    read_set,
    write_gridfn,
    write_kernel,
    write_set,
)
from polycorners.transform import FREQUENCY, GridFn


def test_gridfn_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    for shape in [(7,), (7, 7)]:
        g = GridFn(7, rng.standard_normal(shape) + 1j * rng.standard_normal(shape), FREQUENCY)
        path = tmp_path / "g.bin"
        write_gridfn(path, g)
        back = read_gridfn(path)
        assert back.side == FREQUENCY and np.array_equal(back.values, g.values)


def test_gridfn_layout(tmp_path):
    path = tmp_path / "g.bin"
    write_gridfn(path, GridFn(3, np.arange(9.0).reshape(3, 3)))
    raw = path.read_bytes()
    header, payload = raw.split(b"\n", 1)
    assert json.loads(header) == {"p": 3, "dim": 2, "side": "physical"}
    vals = np.frombuffer(payload, dtype="<f8")
    assert vals[0::2].tolist() == list(range(9)) and not vals[1::2].any()


def test_kernel_round_trip_and_corruption(tmp_path):
    p = 13
    K = kernel_fast(p, parse_poly("0,0,1", p), parse_poly("0,0,0,1", p))
    path = tmp_path / "k.bin"
    write_kernel(path, K)
    back = read_kernel(path)
    assert back.checksum() == K.checksum() and back.matches(p, K.phi1, K.phi2)
    raw = bytearray(path.read_bytes())
    raw[-3] ^= 0xFF
    path.write_bytes(bytes(raw))
    with pytest.raises(CacheCorrupt):
        read_kernel(path)


def test_cached_kernel(tmp_path, caplog):
    p = 31
    phi1, phi2 = parse_poly("0,0,1", p), parse_poly("0,0,0,1", p)
    K1, hit1 = cached_kernel(tmp_path, p, phi1, phi2)
    K2, hit2 = cached_kernel(tmp_path, p, phi1, phi2)
    assert (hit1, hit2) == (False, True)
    assert K1.checksum() == K2.checksum()
    path = kernel_cache_path(tmp_path, p, phi1, phi2)
    path.write_bytes(path.read_bytes()[:-8])
    K3, hit3 = cached_kernel(tmp_path, p, phi1, phi2)
    assert not hit3 and K3.checksum() == K1.checksum()
    other = kernel_cache_path(tmp_path, p, phi1, parse_poly("0,0,0,0,1", p))
    assert other != path


def test_set_round_trip(tmp_path):
    A = generate_set("random", 11, delta=0.3, seed=4)
    path = tmp_path / "a.txt"
    write_set(path, A)
    assert path.read_text().splitlines()[0] == "p=11"
    assert read_set(path) == A
    bad = tmp_path / "bad.txt"
    bad.write_text("1 2\n")
    with pytest.raises(ValueError):
        read_set(bad)


def test_float_text_round_trips():
    x = [0.1 + 0.2, 1 / 3, 2.0**-52, 1e300, np.float64(7.0) / 3]
    rows = [{"v": v} for v in x]
    parsed = [json.loads(json_line(r))["v"] for r in rows]
    assert parsed == [float(v) for v in x]
    cells = list(csv.DictReader(io.StringIO(csv_text(rows))))
    assert [float(c["v"]) for c in cells] == parsed


def test_csv_nested_and_none():
    text = csv_text([{"a": None, "b": [1, 2], "c": True}])
    row = next(csv.DictReader(io.StringIO(text)))
    assert row == {"a": "", "b": "[1, 2]", "c": "True"}
