"""Named verifiers over one prime, a prime sweep driver, and the one-prime battery.

Each verifier returns a list of report records (plain dicts).  A record with
``passed`` False is a hard failure; ``passed`` None means report-only.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .averaging import average_direct, average_fourier, j2_ratio, j_decompose, main_residual
from .bounds import (
    BoundReport,
    i_split,
    k4_matrix,
    k4_scan,
    katz_variety_sum,
    admissible_mask,
    verify_bombieri_family,
    verify_gauss,
    verify_i_zero,
    verify_weil,
)
from .corners import SubsetGrid, corner_density_fourier, count_corners, generate_set, roth_chain, verify_e3
from .fp import FpPoly, check_prime, linearly_independent, parse_poly, theory_supported
from .kernel import kernel_fast, kernel_naive, truncate
from .transform import GridFn, dft, dft_fast, inverse_dft_fast, norm_r

log = logging.getLogger(__name__)


class ConfigError(ValueError):
    """Bad run configuration; the CLI maps it to exit code 2."""


@dataclass
class RunConfig:
    p: int | None = None
    primes: list[int] | None = None
    phi1: list[int] = field(default_factory=lambda: [0, 0, 1])
    phi2: list[int] = field(default_factory=lambda: [0, 0, 0, 1])
    seed: int = 1
    threshold_c: float = 20.0
    h: list[list[int]] | None = None
    trials: int = 4
    density: float = 0.5
    convention: str = "plain"
    ceiling: float | None = None
    cache_dir: str | None = None
    format: str | None = None  # json, or csv for sweeps
    workers: int = 1
    force: bool = False

    def to_dict(self) -> dict:
        return asdict(self)

    def polys(self, p: int) -> tuple[FpPoly, FpPoly]:
        return parse_poly(self.phi1, p), parse_poly(self.phi2, p)

    def prime_list(self) -> list[int]:
        if self.primes is not None:
            return list(self.primes)
        return [self.p if self.p is not None else 31]


def validate(cfg: RunConfig, need_theory: bool = True) -> list[int]:
    """Check primes and polynomials before any work; returns the primes in ascending order."""
    primes = sorted(set(cfg.prime_list()))
    if not primes:
        raise ConfigError("empty prime range")
    for p in primes:
        try:
            check_prime(p)
        except ValueError as err:
            raise ConfigError(f"{p}: not prime or out of range ({err})") from None
        try:
            phi1, phi2 = cfg.polys(p)
        except ValueError as err:
            raise ConfigError(f"invalid polynomial at p={p}: {err}") from None
        if need_theory and not theory_supported(phi1, phi2):
            why = ("linearly dependent" if not linearly_independent(phi1, phi2)
                   else "equal degrees, not quadratic")
            if not cfg.force:
                raise ConfigError(f"phi=({phi1}, {phi2}) is outside the supported case ({why}); "
                                  "use --force to run flagged")
            log.warning("running unsupported pair (%s, %s): %s", phi1, phi2, why)
    if cfg.workers < 1:
        raise ConfigError("workers must be >= 1")
    if cfg.trials < 1:
        raise ConfigError("trials must be >= 1")
    return primes


def rng_for(seed: int, *stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), *stream])))


def random_pair(p: int, kind: str, seed: int, trial: int, density: float = 0.5):
    """Two p x p test inputs: ``pm1`` uniform signs, ``indicator`` Bernoulli(density)."""
    rng = rng_for(seed, p, trial)
    if kind == "pm1":
        return tuple(rng.choice(np.array([-1.0, 1.0]), size=(p, p)) for _ in range(2))
    if kind == "indicator":
        return tuple((rng.random((p, p)) < density).astype(np.float64) for _ in range(2))
    raise ValueError(f"unknown input kind {kind!r}")


def trial_kind(trial: int) -> str:
    return "pm1" if trial % 2 == 0 else "indicator"


def random_shifts(p: int, seed: int, count: int) -> list[tuple[int, int]]:
    rng = rng_for(seed, p, 0x4B34)
    out = []
    while len(out) < count:
        h = (int(rng.integers(p)), int(rng.integers(p)))
        if h != (0, 0):
            out.append(h)
    return out


def record(rep: BoundReport, cfg: RunConfig | None = None, **extra) -> dict:
    d = rep.as_dict()
    out = {"name": d["name"], "p": d["p"]}
    if cfg is not None:
        out["phi1"], out["phi2"] = list(cfg.phi1), list(cfg.phi2)
    out.update(measured=d["measured"], scale=d["scale"], ratio=d["ratio"], bound=d["bound"],
               lower=d["lower"], passed=d["passed"], witness=list(d["witness"]))
    out.update(extra)
    out["params"] = d["params"]
    if cfg is not None:
        out["config"] = cfg.to_dict()
    return out


def _identity(name: str, p: int, err: float, tol: float) -> BoundReport:
    return BoundReport(name, p, float(err), 1.0, float(err), tol, passed=bool(err <= tol))


# -- single verifiers ----------------------------------------------------------


def _kernel(p, cfg):
    from .serialize import cached_kernel

    phi1, phi2 = cfg.polys(p)
    return cached_kernel(cfg.cache_dir, p, phi1, phi2)[0]


def v_weil(p, cfg):
    return [verify_weil(_kernel(p, cfg))]


def v_gauss(p, cfg):
    phi1, phi2 = cfg.polys(p)
    if phi1.degree != 2 or phi2.degree != 2:
        return [BoundReport("gauss", p, 0.0, 1.0, 0.0, params={"skipped": "not quadratic"})]
    return [verify_gauss(p, phi1, phi2)]


def v_main(p, cfg):
    """Worst ratio over ``cfg.trials`` seeded inputs; asserts only with a ceiling."""
    phi1, phi2 = cfg.polys(p)
    best = None
    for t in range(cfg.trials):
        f1, f2 = random_pair(p, trial_kind(t), cfg.seed, t, cfg.density)
        res = main_residual(f1, f2, phi1, phi2)
        if res.ratio is not None and (best is None or res.ratio > best[1].ratio):
            best = (t, res)
    t, res = best
    bound = cfg.ceiling
    passed = None if bound is None else bool(res.ratio <= bound)
    return [BoundReport("main", p, res.residual, res.norm4_product * p**-0.125, res.ratio, bound,
                        passed=passed, witness=(t,),
                        params={"trials": cfg.trials, "kind": trial_kind(t)})]


def v_j2(p, cfg):
    K = _kernel(p, cfg)
    worst, wt = -1.0, 0
    for t in range(cfg.trials):
        f1, f2 = random_pair(p, trial_kind(t), cfg.seed, t, cfg.density)
        r = j2_ratio(f1, f2, K)
        if r is not None and r > worst:
            worst, wt = r, t
    bound = cfg.ceiling
    passed = None if bound is None else bool(worst <= bound)
    return [BoundReport("j2", p, worst * p**-0.25, p**-0.25, worst, bound, passed=passed,
                        witness=(wt,), params={"trials": cfg.trials})]


def v_i_zero(p, cfg):
    Kt = truncate(_kernel(p, cfg))
    f1, f2 = random_pair(p, "pm1", cfg.seed, 0)
    return [verify_i_zero(f1, f2, Kt)]


def v_k4(p, cfg):
    phi1, phi2 = cfg.polys(p)
    Kt = truncate(_kernel(p, cfg))
    shifts = [tuple(h) for h in cfg.h] if cfg.h else random_shifts(p, cfg.seed, 3)
    return [k4_scan(p, phi1, phi2, h, cfg.threshold_c, cfg.convention, Kt=Kt)[0] for h in shifts]


def v_bombieri(p, cfg):
    return [verify_bombieri_family(p)]


def v_e3(p, cfg):
    rng = rng_for(cfg.seed, p, 0xE3)
    worst = None
    for _ in range(cfg.trials):
        rep = verify_e3(rng.random((p, p)) ** rng.uniform(0.5, 4.0))
        if worst is None or rep.params["margin"] < worst.params["margin"]:
            worst = rep
    worst.params["trials"] = cfg.trials
    return [worst]


def _random_set(p, cfg) -> SubsetGrid:
    return generate_set("random", p, delta=cfg.density, seed=cfg.seed)


def v_corners(p, cfg, A: SubsetGrid | None = None):
    phi1, phi2 = cfg.polys(p)
    A = _random_set(p, cfg) if A is None else A
    count = count_corners(A, phi1, phi2)
    fourier = corner_density_fourier(A, _kernel(p, cfg))
    err = abs(fourier - count.density)
    delta = A.density
    scale = delta**3
    return [BoundReport("corners", p, err, 1.0, err, 1e-9, passed=bool(err <= 1e-9),
                        params={"delta": delta, "total_pairs": count.total_pairs,
                                "nondegenerate_pairs": count.nondegenerate_pairs,
                                "density": count.density, "fourier_density": fourier,
                                "nondegenerate_over_delta3":
                                    count.nondegenerate_density / scale if scale else 0.0})]


def v_roth(p, cfg, A: SubsetGrid | None = None):
    phi1, phi2 = cfg.polys(p)
    A = _random_set(p, cfg) if A is None else A
    chain = roth_chain(A, phi1, phi2)
    return [BoundReport("roth_chain", p, chain.corner_density, 1.0, chain.corner_density,
                        chain.lower_bound, lower=True, passed=chain.holds, params=chain.as_dict())]


VERIFIERS = {
    "weil": v_weil,
    "gauss": v_gauss,
    "main": v_main,
    "j2": v_j2,
    "i-zero": v_i_zero,
    "k4": v_k4,
    "bombieri": v_bombieri,
    "e3": v_e3,
    "corners": v_corners,
    "roth": v_roth,
}


def run_verifier(name: str, p: int, cfg: RunConfig) -> list[dict]:
    if name not in VERIFIERS:
        raise ConfigError(f"unknown verifier {name!r}; choose from {', '.join(VERIFIERS)}")
    return [record(r, cfg) for r in VERIFIERS[name](p, cfg)]


def _sweep_task(args):
    name, p, cfg = args
    return run_verifier(name, p, cfg)


def sweep(name: str, cfg: RunConfig) -> list[dict]:
    """Rows in ascending p whatever the completion order."""
    if name not in VERIFIERS:
        raise ConfigError(f"unknown verifier {name!r}; choose from {', '.join(VERIFIERS)}")
    primes = validate(cfg, need_theory=name not in ("bombieri", "e3"))
    tasks = [(name, p, cfg) for p in primes]
    if cfg.workers == 1 or len(tasks) == 1:
        chunks = [_sweep_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            chunks = list(pool.map(_sweep_task, tasks))
    return [row for chunk in chunks for row in chunk]


# -- the one-prime battery -----------------------------------------------------


def _identity_checks(p: int, cfg: RunConfig) -> list[BoundReport]:
    phi1, phi2 = cfg.polys(p)
    rng = rng_for(cfg.seed, p, 0x1D)
    f = rng.standard_normal((p, p)) + 1j * rng.standard_normal((p, p))
    g = GridFn(p, f)
    F = dft_fast(g)
    out = [_identity("dft_fast_vs_dft", p, np.max(np.abs(F.values - dft(g).values)), 1e-8)]
    out.append(_identity("fourier_inversion", p, np.max(np.abs(inverse_dft_fast(F).values - f)), 1e-8))
    parseval = abs(norm_r(g, 2) - np.linalg.norm(F.values)) / norm_r(g, 2)
    out.append(_identity("parseval", p, parseval, 1e-9))

    K = kernel_fast(p, phi1, phi2)
    out.append(_identity("kernel_fast_vs_naive", p,
                         np.max(np.abs(K.values - kernel_naive(p, phi1, phi2).values)), 1e-8))

    f1, f2 = random_pair(p, "pm1", cfg.seed, 0)
    direct = average_direct(f1, f2, phi1, phi2).values
    out.append(_identity("average_fourier_vs_direct", p,
                         np.max(np.abs(average_fourier(f1, f2, K).values - direct)), 1e-8))
    J = j_decompose(f1, f2, K)
    out.append(_identity("j_sum", p, np.max(np.abs(J.total.values - direct)), 1e-8))
    if p <= 61:
        i0, rest = i_split(f1, f2, truncate(K))
        j3sq = norm_r(J.J3, 2) ** 2
        out.append(_identity("i_split", p, abs(i0 + rest - j3sq) / max(j3sq, 1e-300), 1e-8))

        Kt = truncate(K)
        worst = 0.0
        for h in random_shifts(p, cfg.seed, 2):
            S = k4_matrix(Kt, (-h[0], h[1]))
            adm = np.argwhere(admissible_mask(p, h[1]))
            for i in rng.choice(len(adm), size=min(5, len(adm)), replace=False):
                m2, m2p = (int(v) for v in adm[i])
                z = katz_variety_sum(p, phi1, phi2, h, m2, m2p)
                worst = max(worst, abs(z - S[m2, m2p]))
        out.append(_identity("katz_vs_k4", p, worst, 1e-8))
    return out


def verify_all(cfg: RunConfig) -> list[dict]:
    (p,) = validate(RunConfig(**{**cfg.to_dict(), "primes": None}))
    flagged = not theory_supported(*cfg.polys(p))
    rows = [record(r, cfg) for r in _identity_checks(p, cfg)]
    for name in ("weil", "gauss", "i-zero", "main", "j2", "k4", "bombieri", "e3", "corners", "roth"):
        rows.extend(run_verifier(name, p, cfg))
    if flagged:
        for row in rows:
            row["flagged"] = True
    return rows


def summary(rows: list[dict], cfg: RunConfig) -> dict:
    failures = [r["name"] for r in rows if r["passed"] is False]
    return {"passed": not failures, "failures": failures, "checks": len(rows),
            "config": cfg.to_dict(), "results": rows}
