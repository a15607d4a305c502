"""File formats: grid functions, cached kernel tables, subset files, report rows.

Binary files are one JSON header line, a newline, then little-endian float64
pairs (re, im) in row-major order.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
from pathlib import Path

import numpy as np

from .corners import SubsetGrid
from .fp import FpPoly
from .kernel import KernelTable, kernel_fast
from .transform import GridFn

log = logging.getLogger(__name__)


class CacheCorrupt(ValueError):
    pass


def _write_binary(path, header: dict, values: np.ndarray):
    payload = np.ascontiguousarray(values, dtype="<c16").tobytes()
    with open(path, "wb") as fh:
        fh.write(json.dumps(header).encode() + b"\n")
        fh.write(payload)


def _read_binary(path) -> tuple[dict, bytes]:
    with open(path, "rb") as fh:
        header = json.loads(fh.readline())
        return header, fh.read()


def write_gridfn(path, f: GridFn):
    _write_binary(path, {"p": f.p, "dim": f.dim, "side": f.side}, f.values)


def read_gridfn(path) -> GridFn:
    header, payload = _read_binary(path)
    p, dim = int(header["p"]), int(header["dim"])
    values = np.frombuffer(payload, dtype="<c16")
    if values.size != p**dim:
        raise ValueError(f"{path}: expected {p**dim} values, found {values.size}")
    return GridFn(p, values.reshape((p,) * dim).astype(np.complex128), header["side"])


def payload_checksum(values: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(values, dtype="<c16").tobytes()).hexdigest()


def kernel_cache_path(cache_dir, p: int, phi1: FpPoly, phi2: FpPoly, truncated: bool = False) -> Path:
    key = json.dumps([p, phi1.to_list(), phi2.to_list(), truncated]).encode()
    return Path(cache_dir) / f"kernel_p{p}_{hashlib.sha1(key).hexdigest()[:16]}.bin"


def write_kernel(path, K: KernelTable):
    header = {"p": K.p, "phi1": K.phi1.to_list(), "phi2": K.phi2.to_list(),
              "truncated": K.truncated, "checksum": payload_checksum(K.values)}
    _write_binary(path, header, K.values)


def read_kernel(path) -> KernelTable:
    header, payload = _read_binary(path)
    p = int(header["p"])
    values = np.frombuffer(payload, dtype="<c16")
    if values.size != p * p or hashlib.sha256(payload).hexdigest() != header["checksum"]:
        raise CacheCorrupt(f"{path}: checksum or size mismatch")
    return KernelTable(p, FpPoly(p, tuple(header["phi1"])), FpPoly(p, tuple(header["phi2"])),
                       values.reshape(p, p).astype(np.complex128), bool(header["truncated"]))


def cached_kernel(cache_dir, p: int, phi1: FpPoly, phi2: FpPoly) -> tuple[KernelTable, bool]:
    """Load the kernel from ``cache_dir`` or build and store it; returns (K, hit)."""
    if cache_dir is None:
        return kernel_fast(p, phi1, phi2), False
    path = kernel_cache_path(cache_dir, p, phi1, phi2)
    if path.exists():
        try:
            K = read_kernel(path)
        except (CacheCorrupt, ValueError, KeyError) as err:
            log.warning("discarding cache file %s: %s", path, err)
        else:
            if K.matches(p, phi1, phi2):
                log.info("kernel cache hit: %s", path)
                return K, True
    K = kernel_fast(p, phi1, phi2)
    path.parent.mkdir(parents=True, exist_ok=True)
    write_kernel(path, K)
    log.info("kernel cache miss, wrote %s", path)
    return K, False


def write_set(path, A: SubsetGrid):
    with open(path, "w") as fh:
        fh.write(f"p={A.p}\n")
        for x1, x2 in A.members():
            fh.write(f"{x1} {x2}\n")


def read_set(path) -> SubsetGrid:
    with open(path) as fh:
        first = fh.readline().strip()
        if not first.startswith("p="):
            raise ValueError(f"{path}: first line must be p=<value>")
        p = int(first[2:])
        bits = np.zeros((p, p), dtype=bool)
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                x1, x2 = (int(t) for t in line.split())
                bits[x1 % p, x2 % p] = True
    return SubsetGrid(p, bits)


def _plain(value):
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    return value


def json_line(record: dict) -> str:
    """One JSON object per line; floats use repr, which round-trips float64."""
    return json.dumps(_plain(record))


def _cell(value) -> str:
    value = _plain(value)
    if value is None:
        return ""
    if isinstance(value, (list, dict)):
        return json.dumps(value)
    return repr(value) if isinstance(value, float) else str(value)


def csv_text(rows: list[dict], columns: list[str] | None = None) -> str:
    if columns is None:
        columns = []
        for row in rows:
            columns.extend(k for k in row if k not in columns)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row.get(c)) for c in columns])
    return buf.getvalue()
