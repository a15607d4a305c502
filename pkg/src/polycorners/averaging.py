"""The corner average A(f1, f2)(x) = E_y f1(x1 + phi1(y), x2) f2(x1, x2 + phi2(y)).

:func:`average_direct` is the ground truth.  :func:`average_fourier` evaluates
the same operator from the Fourier side through the kernel table, and
:func:`j_decompose` splits it by frequency block:

    J1   n1 = 0,  m2 = 0     the rank-one term E_{x1} f1 * E_{x2} f2
    J2   n1 != 0, m2 = 0
    J3   m2 != 0             via the truncated kernel
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fp import FpPoly, unit_roots
from .kernel import KernelMismatch, KernelTable, truncate
from .transform import PHYSICAL, GridFn, SideMismatch, fft_axis, norm_r


class DimensionMismatch(ValueError):
    pass


def _physical_2d(f1, f2) -> tuple[np.ndarray, np.ndarray, int]:
    arrs = []
    for f in (f1, f2):
        if isinstance(f, GridFn):
            if f.side != PHYSICAL:
                raise SideMismatch("averages act on physical-side functions")
            f = f.values
        arrs.append(np.asarray(f))
    a, b = arrs
    if a.ndim != 2 or a.shape != b.shape or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"need two p x p grids, got {a.shape} and {b.shape}")
    return a, b, a.shape[0]


def _compact(values: np.ndarray) -> np.ndarray:
    return values.real.copy() if np.isrealobj(values) or not np.any(values.imag) else values


def average_direct(f1, f2, phi1: FpPoly, phi2: FpPoly) -> GridFn:
    """O(p^3) sum over y; accumulates then divides by p once."""
    a, b, p = _physical_2d(f1, f2)
    if phi1.p != p or phi2.p != p:
        raise DimensionMismatch("polynomial field does not match grid size")
    a, b = _compact(a), _compact(b)
    dtype = np.result_type(a, b)
    # doubled copies turn each cyclic shift into a slice view
    a2 = np.concatenate([a, a], axis=0)
    b2 = np.concatenate([b, b], axis=1)
    out = np.zeros((p, p), dtype=dtype)
    tmp = np.empty((p, p), dtype=dtype)
    for s, t in zip(phi1.values(), phi2.values()):
        np.multiply(a2[s : s + p], b2[:, t : t + p], out=tmp)
        out += tmp
    return GridFn(p, out / p)


def polynomial_average(f, phi: FpPoly, axis: int = 0) -> GridFn:
    """E_y f(x + phi(y) e_axis), the one-polynomial average along one axis."""
    values = f.values if isinstance(f, GridFn) else np.asarray(f)
    p = values.shape[0]
    out = np.zeros(values.shape, dtype=np.result_type(values, np.float64))
    for s in phi.values():
        out += np.roll(values, -int(s), axis=axis)
    return GridFn(p, out / p)


def bilinear_fourier(f1, f2, kernel_values: np.ndarray) -> GridFn:
    """sum_{n,m} f1hat(n) f2hat(m) e_p((n+m).x) k(n1, m2) for an arbitrary table k.

    Summing n2 and m1 first leaves partial transforms P(n1, x2) of f1 and
    Q(x1, m2) of f2; each nonzero row k(n1, .) then costs one batch of
    inverse transforms along x2, so the total is O(p^3 log p).
    """
    a, b, p = _physical_2d(f1, f2)
    k = np.asarray(kernel_values)
    if k.shape != (p, p):
        raise KernelMismatch("kernel table does not match grid size")
    P = fft_axis(a, 0, -1) / p  # [n1, x2]
    Q = fft_axis(b, 1, -1) / p  # [x1, m2]
    n = np.arange(p)
    roots = unit_roots(p).values
    out = np.zeros((p, p), dtype=np.complex128)
    for n1 in np.flatnonzero(np.any(k != 0, axis=1)):
        W = fft_axis(Q * k[n1][None, :], 1, +1)  # [x1, x2]
        chi = roots[(n1 * n) % p]
        out += chi[:, None] * P[n1][None, :] * W
    return GridFn(p, out)


def _check_kernel(K: KernelTable, p: int, allow_truncated: bool = False):
    if K.p != p:
        raise KernelMismatch(f"kernel built for p={K.p}, grids have p={p}")
    if K.truncated and not allow_truncated:
        raise KernelMismatch("expected an untruncated kernel")


def average_fourier(f1, f2, K: KernelTable) -> GridFn:
    _, _, p = _physical_2d(f1, f2)
    _check_kernel(K, p)
    return bilinear_fourier(f1, f2, K.values)


@dataclass(frozen=True)
class JDecomposition:
    J1: GridFn
    J2: GridFn
    J3: GridFn

    @property
    def total(self) -> GridFn:
        return self.J1 + self.J2 + self.J3

    def norms(self) -> tuple[float, float, float]:
        return tuple(norm_r(J, 2) for J in (self.J1, self.J2, self.J3))


def rank_one_term(f1, f2) -> GridFn:
    """(E_{x1} f1)(x2) * (E_{x2} f2)(x1), as an outer product."""
    a, b, p = _physical_2d(f1, f2)
    return GridFn(p, np.outer(b.mean(axis=1), a.mean(axis=0)))


def j2_term(f1, f2, K: KernelTable) -> GridFn:
    """J2(x) = (E_{x2} f2)(x1) * [E_y f1(x1 + phi1(y), x2) - (E_{x1} f1)(x2)].

    Computed from the kernel column K(., 0) as a Fourier multiplier in x1.
    """
    a, b, p = _physical_2d(f1, f2)
    _check_kernel(K, p, allow_truncated=False)
    mult = K.values[:, 0].copy()
    mult[0] = 0.0
    inner = fft_axis(fft_axis(a, 0, -1) / p * mult[:, None], 0, +1)
    return GridFn(p, b.mean(axis=1)[:, None] * inner)


def j_decompose(f1, f2, K: KernelTable) -> JDecomposition:
    _, _, p = _physical_2d(f1, f2)
    _check_kernel(K, p)
    J1 = rank_one_term(f1, f2)
    J2 = j2_term(f1, f2, K)
    J3 = bilinear_fourier(f1, f2, truncate(K).values)
    return JDecomposition(J1, J2, J3)


def block_kernels(K: KernelTable) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Kernel restricted to the J1, J2 and J3 frequency blocks."""
    k1 = np.zeros_like(K.values)
    k1[0, 0] = K.values[0, 0]
    k2 = np.zeros_like(K.values)
    k2[1:, 0] = K.values[1:, 0]
    k3 = K.values.copy()
    k3[:, 0] = 0.0
    return k1, k2, k3


@dataclass(frozen=True)
class MainResidual:
    p: int
    residual: float
    ratio: float | None
    norm4_product: float

    def as_dict(self) -> dict:
        return {"p": self.p, "residual": self.residual, "ratio": self.ratio}


def main_residual(f1, f2, phi1: FpPoly, phi2: FpPoly) -> MainResidual:
    """||A(f1, f2) - E_{x1} f1 * E_{x2} f2||_2 and its p^(1/8)-scaled ratio.

    The ratio is None when ||f1||_4 ||f2||_4 vanishes.
    """
    a, b, p = _physical_2d(f1, f2)
    diff = average_direct(a, b, phi1, phi2).values - rank_one_term(a, b).values
    residual = norm_r(diff, 2)
    denom = norm_r(a, 4) * norm_r(b, 4)
    ratio = residual * p**0.125 / denom if denom > 0 else None
    return MainResidual(p, residual, ratio, denom)


def j2_ratio(f1, f2, K: KernelTable) -> float | None:
    """p^(1/4) ||J2||_2 / (||f1||_4 ||f2||_4)."""
    a, b, p = _physical_2d(f1, f2)
    denom = norm_r(a, 4) * norm_r(b, 4)
    if denom == 0:
        return None
    return norm_r(j2_term(a, b, K), 2) * p**0.25 / denom
