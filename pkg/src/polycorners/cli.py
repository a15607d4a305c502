"""polycorners command line.

Exit codes: 0 success, 1 a verifier assertion failed, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import fields

from . import serialize
from .averaging import j_decompose, main_residual
from .bounds import bombieri_sum
from .corners import count_corners, corner_density_fourier, generate_set, roth_chain
from .fp import check_prime
from .suite import (
    ConfigError,
    RunConfig,
    VERIFIERS,
    random_pair,
    record,
    run_verifier,
    summary,
    sweep,
    validate,
    verify_all,
)
from .transform import norm_r

log = logging.getLogger("polycorners")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _int_list(text: str) -> list[int]:
    return [int(t) for t in text.replace(" ", "").strip("[]").split(",") if t]


def parse_primes(text: str) -> list[int]:
    """``101..199`` (inclusive range, primes only) or an explicit list ``5,7,11``."""
    text = text.strip()
    if ".." in text:
        lo, hi = (int(t) for t in text.split(".."))
        from .fp import primes_between

        return primes_between(lo, hi)
    return _int_list(text)


def parse_shifts(text: str) -> list[list[int]]:
    """``1,1;2,5`` -> [[1, 1], [2, 5]]."""
    return [_int_list(chunk) for chunk in text.split(";") if chunk.strip()]


def _random_spec(text: str) -> tuple[float, int]:
    delta, seed = text.split(",")
    return float(delta), int(seed)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("global")
    g.add_argument("--p", type=int, default=argparse.SUPPRESS)
    g.add_argument("--primes", type=parse_primes, default=argparse.SUPPRESS,
                   help="lo..hi or a comma list")
    g.add_argument("--phi1", type=_int_list, default=argparse.SUPPRESS,
                   help="coefficients lowest first, e.g. 0,0,1")
    g.add_argument("--phi2", type=_int_list, default=argparse.SUPPRESS)
    g.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    g.add_argument("--cache-dir", dest="cache_dir", default=argparse.SUPPRESS)
    g.add_argument("--format", choices=("json", "csv"), default=argparse.SUPPRESS)
    g.add_argument("--workers", type=int, default=argparse.SUPPRESS)
    g.add_argument("--threshold-c", dest="threshold_c", type=float, default=argparse.SUPPRESS)
    g.add_argument("--trials", type=int, default=argparse.SUPPRESS)
    g.add_argument("--density", type=float, default=argparse.SUPPRESS)
    g.add_argument("--h", type=parse_shifts, default=argparse.SUPPRESS, help="shifts, e.g. 1,1;2,5")
    g.add_argument("--convention", choices=("plain", "reflected"), default=argparse.SUPPRESS)
    g.add_argument("--ceiling", type=float, default=argparse.SUPPRESS,
                   help="turn the main/j2 ratio reports into assertions")
    g.add_argument("--config", dest="config_file", default=None, help="JSON file mirroring the flags")
    g.add_argument("--force", action="store_true", default=argparse.SUPPRESS,
                   help="run pairs outside the supported case, flagged")
    g.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="polycorners", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("kernel", parents=[common], help="build and cache the kernel table")
    avg = sub.add_parser("avg", parents=[common], help="average residual report")
    avg.add_argument("--f1", help="grid function file (default: seeded random)")
    avg.add_argument("--f2")
    for name in ("corners", "roth-chain"):
        sp = sub.add_parser(name, parents=[common])
        src = sp.add_mutually_exclusive_group()
        src.add_argument("--set", dest="set_file")
        src.add_argument("--random", type=_random_spec, help="delta,seed")
    for name in ("verify-weil", "verify-main", "verify-k4", "verify-gauss", "verify-e3"):
        sub.add_parser(name, parents=[common])
    bomb = sub.add_parser("verify-bombieri", parents=[common])
    bomb.add_argument("--f1", dest="num", type=_int_list, help="numerator, lowest first")
    bomb.add_argument("--f2", dest="den", type=_int_list, help="denominator, lowest first")
    sw = sub.add_parser("sweep", parents=[common], help="one verifier over a prime range, CSV")
    sw.add_argument("verifier", choices=sorted(VERIFIERS))
    sub.add_parser("verify-all", parents=[common], help="the full battery at one prime")
    return parser


def load_config(args: argparse.Namespace) -> RunConfig:
    data = {}
    if args.config_file:
        try:
            with open(args.config_file) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as err:
            raise ConfigError(f"cannot read config {args.config_file}: {err}") from None
        data = {k.replace("-", "_"): v for k, v in data.items()}
    names = {f.name for f in fields(RunConfig)}
    unknown = set(data) - names
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for name in names:
        if hasattr(args, name):
            data[name] = getattr(args, name)
    cfg = RunConfig(**data)
    if cfg.primes is not None and cfg.p is not None and hasattr(args, "p"):
        cfg.primes = None  # an explicit --p wins over a range from the file
    return cfg


def emit(rows: list[dict], fmt: str | None, out=None):
    out = out or sys.stdout
    if fmt == "csv":
        out.write(serialize.csv_text(rows))
    else:
        for row in rows:
            out.write(serialize.json_line(row) + "\n")


def _exit_for(rows: list[dict]) -> int:
    return EXIT_FAIL if any(r.get("passed") is False for r in rows) else EXIT_OK


def _single_prime(cfg: RunConfig, need_theory: bool = True) -> int:
    cfg.primes = None
    (p,) = validate(cfg, need_theory)
    return p


def cmd_kernel(cfg: RunConfig) -> int:
    p = _single_prime(cfg, need_theory=False)
    phi1, phi2 = cfg.polys(p)
    cache_dir = cfg.cache_dir or ".polycorners-cache"
    K, hit = serialize.cached_kernel(cache_dir, p, phi1, phi2)
    row = {"p": p, "phi1": cfg.phi1, "phi2": cfg.phi2, "checksum": K.checksum(),
           "cache": "hit" if hit else "miss",
           "path": str(serialize.kernel_cache_path(cache_dir, p, phi1, phi2))}
    emit([row], cfg.format)
    return EXIT_OK


def cmd_avg(cfg: RunConfig, args) -> int:
    p = _single_prime(cfg)
    phi1, phi2 = cfg.polys(p)
    if args.f1 or args.f2:
        if not (args.f1 and args.f2):
            raise ConfigError("--f1 and --f2 go together")
        g1, g2 = serialize.read_gridfn(args.f1), serialize.read_gridfn(args.f2)
        if g1.p != p or g2.p != p:
            raise ConfigError(f"grid files are not over F_{p}")
        f1, f2 = g1.values, g2.values
    else:
        f1, f2 = random_pair(p, "pm1", cfg.seed, 0)
    res = main_residual(f1, f2, phi1, phi2)
    K, _ = serialize.cached_kernel(cfg.cache_dir, p, phi1, phi2)
    J = j_decompose(f1, f2, K)
    row = {"p": p, "phi1": cfg.phi1, "phi2": cfg.phi2, "residual": res.residual,
           "ratio": res.ratio, "j2_norm": norm_r(J.J2, 2), "j3_norm": norm_r(J.J3, 2)}
    emit([row], cfg.format)
    return EXIT_OK


def _subset(cfg: RunConfig, args, p: int):
    if getattr(args, "set_file", None):
        A = serialize.read_set(args.set_file)
        if A.p != p:
            raise ConfigError(f"set file is over F_{A.p}, expected F_{p}")
        return A
    delta, seed = args.random if getattr(args, "random", None) else (cfg.density, cfg.seed)
    return generate_set("random", p, delta=delta, seed=seed)


def _set_prime(cfg: RunConfig, args) -> None:
    if getattr(args, "set_file", None) and not hasattr(args, "p"):
        with open(args.set_file) as fh:
            first = fh.readline().strip()
        if first.startswith("p="):
            cfg.p = int(first[2:])


def cmd_corners(cfg: RunConfig, args) -> int:
    _set_prime(cfg, args)
    p = _single_prime(cfg, need_theory=False)
    phi1, phi2 = cfg.polys(p)
    A = _subset(cfg, args, p)
    c = count_corners(A, phi1, phi2)
    K, _ = serialize.cached_kernel(cfg.cache_dir, p, phi1, phi2)
    row = {"p": p, "phi1": cfg.phi1, "phi2": cfg.phi2, "cardinality": A.cardinality,
           "delta": A.density, "total_pairs": c.total_pairs,
           "nondegenerate_pairs": c.nondegenerate_pairs, "density": c.density,
           "nondegenerate_density": c.nondegenerate_density,
           "fourier_density": corner_density_fourier(A, K)}
    emit([row], cfg.format)
    return EXIT_OK


def cmd_roth_chain(cfg: RunConfig, args) -> int:
    _set_prime(cfg, args)
    p = _single_prime(cfg)
    phi1, phi2 = cfg.polys(p)
    chain = roth_chain(_subset(cfg, args, p), phi1, phi2)
    row = {"name": "roth_chain", **chain.as_dict(), "phi1": cfg.phi1, "phi2": cfg.phi2,
           "passed": chain.holds}
    emit([row], cfg.format)
    return EXIT_OK if chain.holds else EXIT_FAIL


def cmd_verify(cfg: RunConfig, name: str) -> int:
    need_theory = name not in ("bombieri", "e3")
    p = _single_prime(cfg, need_theory)
    if name == "gauss":
        phi1, phi2 = cfg.polys(p)
        if phi1.degree != 2 or phi2.degree != 2:
            raise ConfigError("verify-gauss needs two quadratic polynomials")
    rows = run_verifier(name, p, cfg)
    emit(rows, cfg.format)
    return _exit_for(rows)


def cmd_bombieri(cfg: RunConfig, args) -> int:
    if args.num is None and args.den is None:
        return cmd_verify(cfg, "bombieri")
    if args.num is None or args.den is None:
        raise ConfigError("--f1 and --f2 go together")
    p = check_prime(cfg.prime_list()[0])
    rows = [record(bombieri_sum(p, args.num, args.den))]
    emit(rows, cfg.format)
    return _exit_for(rows)


def cmd_sweep(cfg: RunConfig, verifier: str) -> int:
    if cfg.primes is None:
        raise ConfigError("sweep needs --primes")
    rows = sweep(verifier, cfg)
    emit(rows, cfg.format or "csv")
    return _exit_for(rows)


def cmd_verify_all(cfg: RunConfig) -> int:
    cfg.primes = None
    rows = verify_all(cfg)
    if cfg.format == "csv":
        emit(rows, "csv")
    else:
        sys.stdout.write(serialize.json_line(summary(rows, cfg)) + "\n")
    return _exit_for(rows)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return EXIT_CONFIG if err.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        cfg = load_config(args)
        cmd = args.command
        if cmd == "kernel":
            return cmd_kernel(cfg)
        if cmd == "avg":
            return cmd_avg(cfg, args)
        if cmd == "corners":
            return cmd_corners(cfg, args)
        if cmd == "roth-chain":
            return cmd_roth_chain(cfg, args)
        if cmd == "verify-bombieri":
            return cmd_bombieri(cfg, args)
        if cmd == "sweep":
            return cmd_sweep(cfg, args.verifier)
        if cmd == "verify-all":
            return cmd_verify_all(cfg)
        return cmd_verify(cfg, cmd.removeprefix("verify-"))
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
