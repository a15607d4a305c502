"""The exponential-sum kernel K(n1, m2) = E_y e_p(n1 phi1(y) + m2 phi2(y)).

``KernelTable.values[n1, m2]`` holds the full p x p table.  Two independent
routes build it: :func:`kernel_naive` sums over y directly; :func:`kernel_fast`
transforms the pushforward counting measure of y -> (phi1(y), phi2(y)).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .fp import FpPoly, gauss_sum_phase, legendre, mod_inverse, unit_roots
from .transform import fft_axis


class AlreadyTruncated(ValueError):
    pass


class NotQuadratic(ValueError):
    pass


class KernelMismatch(ValueError):
    pass


@dataclass(frozen=True)
class KernelTable:
    p: int
    phi1: FpPoly
    phi2: FpPoly
    values: np.ndarray
    truncated: bool = False

    def __post_init__(self):
        if self.phi1.p != self.p or self.phi2.p != self.p:
            raise KernelMismatch("polynomials live over a different field")
        values = np.asarray(self.values, dtype=np.complex128)
        if values.shape != (self.p, self.p):
            raise ValueError("kernel table must be p x p")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def degrees(self) -> tuple[int, int]:
        return self.phi1.degree, self.phi2.degree

    @property
    def weil_constant(self) -> int:
        """max(d1, d2) - 1: sqrt(p) |K| never exceeds this off the origin."""
        return max(self.degrees) - 1

    def matches(self, p: int, phi1: FpPoly, phi2: FpPoly) -> bool:
        return self.p == p and self.phi1 == phi1 and self.phi2 == phi2

    def checksum(self) -> str:
        return hashlib.sha256(self.values.astype("<c16").tobytes()).hexdigest()


def _check_pair(p: int, phi1: FpPoly, phi2: FpPoly):
    if phi1.p != p or phi2.p != p:
        raise KernelMismatch(f"polynomials are not over F_{p}")


def kernel_naive(p: int, phi1: FpPoly, phi2: FpPoly) -> KernelTable:
    """Direct O(p^3) summation over y, one n1 row at a time."""
    _check_pair(p, phi1, phi2)
    roots = unit_roots(p).values
    v1, v2 = phi1.values(), phi2.values()
    m = np.arange(p, dtype=np.int64)
    phase2 = np.outer(m, v2) % p  # [m2, y]
    out = np.empty((p, p), dtype=np.complex128)
    for n1 in range(p):
        idx = (phase2 + n1 * v1) % p
        out[n1] = roots[idx].sum(axis=1) / p
    return KernelTable(p, phi1, phi2, out)


def pushforward_counts(p: int, phi1: FpPoly, phi2: FpPoly) -> np.ndarray:
    """counts[a, b] = #{y : phi1(y) = a, phi2(y) = b}."""
    _check_pair(p, phi1, phi2)
    counts = np.zeros((p, p), dtype=np.int64)
    np.add.at(counts, (phi1.values(), phi2.values()), 1)
    return counts


def kernel_fast(p: int, phi1: FpPoly, phi2: FpPoly) -> KernelTable:
    """K(n1, m2) = p^-1 sum_{a,b} c(a, b) e_p(n1 a + m2 b), in O(p^2 log p)."""
    counts = pushforward_counts(p, phi1, phi2).astype(np.complex128)
    out = fft_axis(fft_axis(counts, 0, +1), 1, +1) / p
    out[0, 0] = 1.0
    return KernelTable(p, phi1, phi2, out)


def truncate(K: KernelTable) -> KernelTable:
    """Zero the m2 = 0 column."""
    if K.truncated:
        raise AlreadyTruncated("kernel is already truncated")
    values = K.values.copy()
    values[:, 0] = 0.0
    return KernelTable(K.p, K.phi1, K.phi2, values, truncated=True)


def delta_shift(g, u) -> np.ndarray:
    """(Delta_u g)(n) = g(n) * conj(g(n + u)), indices wrapping mod p."""
    g = np.asarray(g)
    if np.ndim(u) == 0:
        u = (int(u),)
    u = tuple(int(s) for s in u)
    if len(u) != g.ndim:
        raise ValueError("shift dimension does not match table")
    shifted = np.roll(g, tuple(-s for s in u), axis=tuple(range(g.ndim)))
    return g * shifted.conj()


def _quadratic_coeffs(phi: FpPoly) -> tuple[int, int]:
    if phi.degree != 2:
        raise NotQuadratic(f"{phi} is not quadratic")
    return phi.coeffs[2], phi.coeffs[1]


def gauss_kernel_quadratic(p: int, phi1: FpPoly, phi2: FpPoly) -> KernelTable:
    """Closed form for phi_i(y) = a_i y^2 + b_i y.

    With alpha = a1 n1 + a2 m2 and beta = b1 n1 + b2 m2, completing the square
    gives, for alpha != 0,

        K = p^-1/2 * (alpha | p) * eps_p * e_p(-beta^2 (4 alpha)^-1)

    where eps_p = 1 or i as p = 1 or 3 mod 4.  For alpha = 0 the sum is linear
    in y and vanishes unless beta = 0 too.
    """
    _check_pair(p, phi1, phi2)
    a1, b1 = _quadratic_coeffs(phi1)
    a2, b2 = _quadratic_coeffs(phi2)
    roots = unit_roots(p).values
    eps = gauss_sum_phase(p)
    chi = np.array([legendre(a, p) for a in range(p)], dtype=np.float64)
    inv4 = np.zeros(p, dtype=np.int64)
    for a in range(1, p):
        inv4[a] = mod_inverse(4 * a, p)
    n = np.arange(p, dtype=np.int64)
    alpha = (a1 * n[:, None] + a2 * n[None, :]) % p
    beta = (b1 * n[:, None] + b2 * n[None, :]) % p
    phase = (-(beta * beta % p) * inv4[alpha]) % p
    out = chi[alpha] * eps * roots[phase] / np.sqrt(p)
    degenerate = alpha == 0
    out[degenerate] = np.where(beta[degenerate] == 0, 1.0, 0.0)
    return KernelTable(p, phi1, phi2, out)


def kernel(p: int, phi1: FpPoly, phi2: FpPoly, method: str = "fast") -> KernelTable:
    builders = {"fast": kernel_fast, "naive": kernel_naive, "gauss": gauss_kernel_quadratic}
    return builders[method](p, phi1, phi2)
