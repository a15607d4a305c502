"""Arithmetic over the prime field F_p.

Residues are canonical representatives in ``[0, p-1]``; every public function
reduces its integer inputs first, so negative values are fine.  Complex
values are plain ``complex``/``complex128``; there is no exact cyclotomic
arithmetic.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

MAX_PRIME = 2**31


class ZeroInverse(ZeroDivisionError):
    pass


class NotPrime(ValueError):
    pass


class InvalidPolynomial(ValueError):
    pass


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for n < 3.3e24."""
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primes_between(lo: int, hi: int) -> list[int]:
    """Odd primes in the closed interval [lo, hi]."""
    return [n for n in range(max(lo, 3), hi + 1) if is_prime(n)]


@dataclass(frozen=True)
class PrimeField:
    p: int

    def __post_init__(self):
        p = int(self.p)
        if not is_prime(p):
            raise NotPrime(f"{self.p} is not prime")
        if p < 3:
            raise NotPrime("p must be an odd prime")
        if p >= MAX_PRIME:
            raise NotPrime(f"p={p} exceeds the supported range (< 2**31)")
        object.__setattr__(self, "p", p)

    def residues(self) -> np.ndarray:
        return np.arange(self.p, dtype=np.int64)


def check_prime(p: int) -> int:
    return PrimeField(p).p


@dataclass(frozen=True)
class UnitRootTable:
    """``values[k] = exp(2 pi i k / p)``, each entry from its own cos/sin."""

    p: int
    values: np.ndarray = field(repr=False, compare=False)

    def __call__(self, x):
        return self.values[np.mod(x, self.p)]


@functools.lru_cache(maxsize=64)
def unit_roots(p: int) -> UnitRootTable:
    p = check_prime(p)
    theta = 2.0 * np.pi * np.arange(p, dtype=np.float64) / p
    values = np.cos(theta) + 1j * np.sin(theta)
    values[0] = 1.0
    values.setflags(write=False)
    return UnitRootTable(p, values)


def ep(table: UnitRootTable, x) -> complex:
    """e_p(x) = exp(2 pi i x / p); accepts ints or integer arrays."""
    out = table(x)
    return complex(out) if np.ndim(out) == 0 else out


def mod_inverse(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise ZeroInverse(f"0 has no inverse mod {p}")
    return pow(a, -1, p)


def legendre(a: int, p: int) -> int:
    """Euler's criterion mapped to {-1, 0, 1}."""
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def _strip(coeffs: list[int]) -> list[int]:
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


@dataclass(frozen=True)
class FpPoly:
    """Polynomial over F_p with zero constant term, coefficients lowest first.

    Degree d must satisfy 1 <= d < p (so p does not divide d).
    """

    p: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        p = check_prime(self.p)
        coeffs = _strip([int(c) % p for c in self.coeffs])
        if not coeffs:
            raise InvalidPolynomial("zero polynomial")
        if coeffs[0] != 0:
            raise InvalidPolynomial("constant term must vanish (phi(0) = 0)")
        d = len(coeffs) - 1
        if d >= p or d % p == 0:
            raise InvalidPolynomial(f"degree {d} not allowed for p={p}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "coeffs", tuple(coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> int:
        return self.coeffs[-1]

    def __call__(self, y):
        return poly_eval(self, y)

    def values(self) -> np.ndarray:
        """phi(y) for every y in F_p, as int64."""
        return _poly_values(self.p, self.coeffs)

    def to_list(self) -> list[int]:
        return list(self.coeffs)

    def __str__(self):
        terms = []
        for k, c in enumerate(self.coeffs):
            if c:
                mono = "y" if k == 1 else f"y^{k}"
                terms.append(mono if c == 1 else f"{c}{mono}")
        return " + ".join(reversed(terms))


@functools.lru_cache(maxsize=256)
def _poly_values(p: int, coeffs: tuple[int, ...]) -> np.ndarray:
    y = np.arange(p, dtype=np.int64)
    acc = np.zeros(p, dtype=np.int64)
    for c in reversed(coeffs):
        acc = (acc * y + c) % p
    acc.setflags(write=False)
    return acc


def poly_eval(phi: FpPoly, y):
    """Horner evaluation mod p (scalar or integer array)."""
    p = phi.p
    if np.ndim(y) == 0:
        y = int(y) % p
        acc = 0
        for c in reversed(phi.coeffs):
            acc = (acc * y + c) % p
        return acc
    y = np.mod(np.asarray(y, dtype=np.int64), p)
    acc = np.zeros_like(y)
    for c in reversed(phi.coeffs):
        acc = (acc * y + c) % p
    return acc


def parse_poly(text, p: int) -> FpPoly:
    """Build an FpPoly from "0,0,1", a JSON list, or any int sequence."""
    if isinstance(text, str):
        text = text.strip().strip("[]")
        coeffs = [int(tok) for tok in text.replace(" ", "").split(",") if tok]
    else:
        coeffs = [int(c) for c in text]
    return FpPoly(p, tuple(coeffs))


def linearly_independent(phi1: FpPoly, phi2: FpPoly) -> bool:
    """True iff no nonzero (c1, c2) makes c1*phi1 + c2*phi2 vanish.

    Both polynomials are nonzero, so this is rank 2 of the 2 x n coefficient
    matrix: some 2x2 minor is nonzero mod p.
    """
    if phi1.p != phi2.p:
        raise ValueError("polynomials over different fields")
    p = phi1.p
    n = max(len(phi1.coeffs), len(phi2.coeffs))
    u = list(phi1.coeffs) + [0] * (n - len(phi1.coeffs))
    v = list(phi2.coeffs) + [0] * (n - len(phi2.coeffs))
    for i in range(n):
        for j in range(i + 1, n):
            if (u[i] * v[j] - u[j] * v[i]) % p:
                return True
    return False


def theory_supported(phi1: FpPoly, phi2: FpPoly) -> bool:
    """Degrees distinct, or both quadratic, and linearly independent."""
    degrees_ok = phi1.degree != phi2.degree or phi1.degree == 2
    return degrees_ok and linearly_independent(phi1, phi2)


def primitive_root(p: int) -> int:
    """Smallest generator of F_p^*, by exhaustive order test."""
    factors = _prime_factors(p - 1)
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in factors):
            return g
    raise NotPrime(p)


def _prime_factors(n: int) -> list[int]:
    out = []
    q = 2
    while q * q <= n:
        if n % q == 0:
            out.append(q)
            while n % q == 0:
                n //= q
        q += 1
    if n > 1:
        out.append(n)
    return out


def gauss_sum_phase(p: int) -> complex:
    """sum_y e_p(y^2) / sqrt(p): 1 if p = 1 mod 4, else i."""
    return 1.0 + 0j if p % 4 == 1 else 1j


# General polynomials over F_p (any constant term), lowest degree first,
# with the zero polynomial as [].


def poly_reduce(coeffs, p: int) -> list[int]:
    return _strip([int(c) % p for c in coeffs])


def poly_degree(coeffs) -> int:
    """-1 for the zero polynomial."""
    return len(coeffs) - 1


def poly_derivative(coeffs, p: int) -> list[int]:
    return poly_reduce([k * c for k, c in enumerate(coeffs)][1:], p)


def poly_divmod(num, den, p: int) -> tuple[list[int], list[int]]:
    num, den = poly_reduce(num, p), poly_reduce(den, p)
    if not den:
        raise ZeroInverse("division by the zero polynomial")
    inv_lead = mod_inverse(den[-1], p)
    quot = [0] * max(len(num) - len(den) + 1, 0)
    rem = num[:]
    while len(rem) >= len(den):
        c = rem[-1] * inv_lead % p
        shift = len(rem) - len(den)
        quot[shift] = c
        for i, d in enumerate(den):
            rem[shift + i] = (rem[shift + i] - c * d) % p
        rem = _strip(rem)
    return _strip(quot), rem


def poly_gcd(u, v, p: int) -> list[int]:
    """Monic gcd over F_p ([] only if both inputs are zero)."""
    u, v = poly_reduce(u, p), poly_reduce(v, p)
    while v:
        u, v = v, poly_divmod(u, v, p)[1]
    if not u:
        return []
    inv = mod_inverse(u[-1], p)
    return [c * inv % p for c in u]


def poly_values(coeffs, p: int, x=None) -> np.ndarray:
    """Evaluate a general polynomial at x (default: all of F_p) as int64."""
    x = np.arange(p, dtype=np.int64) if x is None else np.mod(np.asarray(x, dtype=np.int64), p)
    acc = np.zeros_like(x)
    for c in reversed(poly_reduce(coeffs, p)):
        acc = (acc * x + c) % p
    return acc


def inverse_array(values, p: int) -> np.ndarray:
    """Elementwise inverse mod p of nonzero int64 residues (Fermat)."""
    base = np.mod(np.asarray(values, dtype=np.int64), p)
    if np.any(base == 0):
        raise ZeroInverse("0 has no inverse")
    out = np.ones_like(base)
    e = p - 2
    while e:
        if e & 1:
            out = out * base % p
        base = base * base % p
        e >>= 1
    return out
