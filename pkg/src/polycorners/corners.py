"""Subsets of F_p^2 and polynomial corners (x1, x2), (x1 + phi1(y), x2), (x1, x2 + phi2(y))."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .averaging import average_fourier, main_residual, rank_one_term
from .bounds import BoundReport
from .fp import FpPoly, check_prime, theory_supported
from .kernel import KernelMismatch, KernelTable
from .transform import GridFn


class BadDensity(ValueError):
    pass


class RangeViolation(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SubsetGrid:
    p: int
    bits: np.ndarray

    def __post_init__(self):
        p = check_prime(self.p)
        bits = np.asarray(self.bits, dtype=bool)
        if bits.shape != (p, p):
            raise ValueError(f"bit grid must be {p} x {p}")
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    def __eq__(self, other):
        if not isinstance(other, SubsetGrid):
            return NotImplemented
        return self.p == other.p and np.array_equal(self.bits, other.bits)

    __hash__ = None

    @property
    def cardinality(self) -> int:
        return int(np.count_nonzero(self.bits))

    @property
    def density(self) -> float:
        return self.cardinality / self.p**2

    def indicator(self) -> GridFn:
        return GridFn(self.p, self.bits.astype(np.float64))

    def members(self) -> list[tuple[int, int]]:
        return [(int(a), int(b)) for a, b in zip(*np.nonzero(self.bits))]

    def translate(self, s1: int, s2: int) -> SubsetGrid:
        return SubsetGrid(self.p, np.roll(self.bits, (s1, s2), axis=(0, 1)))


def generate_set(kind: str, p: int, *, delta: float = 0.5, seed: int = 0,
                 B1=None, B2=None, residues=None, coeffs=(1, 1)) -> SubsetGrid:
    """Test-instance generators.

    ``random``   each cell kept independently with probability ``delta``; the
                 uniform for cell (x1, x2) is the (x1 p + x2)-th output of a
                 Philox stream keyed by ``seed``
    ``product``  B1 x B2
    ``residue``  {x : c1 x1 + c2 x2 mod p in residues}, a union of lines
    """
    p = check_prime(p)
    if kind == "random":
        if not 0.0 <= delta <= 1.0:
            raise BadDensity(f"density {delta} outside [0, 1]")
        rng = np.random.Generator(np.random.Philox(key=int(seed)))
        return SubsetGrid(p, rng.random((p, p)) < delta)
    if kind == "product":
        rows = np.zeros(p, dtype=bool)
        cols = np.zeros(p, dtype=bool)
        rows[list(range(p)) if B1 is None else [b % p for b in B1]] = True
        cols[list(range(p)) if B2 is None else [b % p for b in B2]] = True
        return SubsetGrid(p, np.outer(rows, cols))
    if kind == "residue":
        c1, c2 = coeffs
        x = np.arange(p)
        lin = (c1 * x[:, None] + c2 * x[None, :]) % p
        return SubsetGrid(p, np.isin(lin, [r % p for r in (residues or [0])]))
    raise ValueError(f"unknown set kind {kind!r}")


@dataclass(frozen=True)
class CornerCount:
    p: int
    total_pairs: int
    nondegenerate_pairs: int

    @property
    def density(self) -> float:
        return self.total_pairs / self.p**3

    @property
    def nondegenerate_density(self) -> float:
        return self.nondegenerate_pairs / self.p**3


def _popcount(packed: np.ndarray) -> int:
    return int(np.bitwise_count(packed).sum())


def count_corners(A: SubsetGrid, phi1: FpPoly, phi2: FpPoly) -> CornerCount:
    """Exact count of (x, y) in F_p^2 x F_p with all three corner points in A.

    Rows are bit-packed along x2; a shift in x1 is a row permutation and each
    shift in x2 gets its own packed copy, so every y is one AND + popcount.
    """
    p = A.p
    bits = A.bits
    packed = np.packbits(bits, axis=1)
    shifted = {}
    total = nondeg = 0
    for s, t in zip(phi1.values(), phi2.values()):
        s, t = int(s), int(t)
        if t not in shifted:
            shifted[t] = np.packbits(np.roll(bits, -t, axis=1), axis=1)
        rows = np.roll(packed, -s, axis=0)
        c = _popcount(packed & rows & shifted[t])
        total += c
        if s and t:
            nondeg += c
    return CornerCount(p, total, nondeg)


def count_corners_scalar(A: SubsetGrid, phi1: FpPoly, phi2: FpPoly) -> CornerCount:
    """Plain enumeration over (x1, x2, y); the oracle for :func:`count_corners`."""
    p = A.p
    bits = A.bits
    v1, v2 = phi1.values(), phi2.values()
    total = nondeg = 0
    for x1 in range(p):
        for x2 in range(p):
            if not bits[x1, x2]:
                continue
            for y in range(p):
                if bits[(x1 + v1[y]) % p, x2] and bits[x1, (x2 + v2[y]) % p]:
                    total += 1
                    if v1[y] and v2[y]:
                        nondeg += 1
    return CornerCount(p, total, nondeg)


def corner_density_fourier(A: SubsetGrid, K: KernelTable) -> float:
    """E_x f A(f, f)(x) for f = 1_A, through the Fourier-side average."""
    if K.p != A.p or K.truncated:
        raise KernelMismatch("need the untruncated kernel for this p")
    f = A.bits.astype(np.float64)
    avg = average_fourier(f, f, K).values
    return float(np.mean(f * avg).real)


def _real_unit_interval(f) -> np.ndarray:
    v = np.asarray(getattr(f, "values", f))
    if np.iscomplexobj(v):
        if np.any(v.imag != 0):
            raise RangeViolation("values must be real")
        v = v.real
    if np.any(v < 0) or np.any(v > 1):
        raise RangeViolation("values must lie in [0, 1]")
    return v.astype(np.float64)


def verify_e3(f) -> BoundReport:
    """E_x(f E_{x1} f E_{x2} f) >= (E f)^3 / 8 for 0 <= f <= 1."""
    v = _real_unit_interval(f)
    p = v.shape[0]
    delta = float(v.mean())
    measured = float(np.mean(v * rank_one_term(v, v).values.real))
    scale = delta**3
    ratio = measured / scale if scale > 0 else 0.0
    passed = measured >= scale / 8 - 1e-10
    return BoundReport("e3", p, measured, scale, ratio, 0.125, lower=True, passed=passed,
                       params={"delta": delta, "margin": measured - scale / 8})


@dataclass(frozen=True)
class RothChain:
    p: int
    delta: float
    corner_density: float
    nondegenerate_density: float
    e3_term: float
    residual: float
    residual_constant: float
    lower_bound: float
    holds: bool
    in_regime: bool
    theory_supported: bool

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def roth_chain(A: SubsetGrid, phi1: FpPoly, phi2: FpPoly) -> RothChain:
    """The lower-bound chain for f = 1_A, with the measured residual constant.

    corner density = E f A(f, f) >= delta^3 / 8 - C p^(-1/8) ||f||_2 ||f||_4^2,
    and for an indicator ||f||_2 ||f||_4^2 = delta.  C is the measured ratio
    from :func:`main_residual`, so the chain is a checkable inequality.
    ``in_regime`` says whether the lower bound is positive.
    """
    p = A.p
    f = A.bits.astype(np.float64)
    delta = A.density
    count = count_corners(A, phi1, phi2)
    res = main_residual(f, f, phi1, phi2)
    c_hat = res.ratio if res.ratio is not None else 0.0
    e3 = float(np.mean(f * rank_one_term(f, f).values.real))
    lower = delta**3 / 8 - c_hat * p**-0.125 * delta
    return RothChain(
        p=p, delta=delta, corner_density=count.density,
        nondegenerate_density=count.nondegenerate_density, e3_term=e3,
        residual=res.residual, residual_constant=c_hat, lower_bound=lower,
        holds=count.density >= lower - 1e-12, in_regime=lower > 0,
        theory_supported=theory_supported(phi1, phi2),
    )
