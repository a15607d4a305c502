"""Fourier analysis on F_p and F_p^2.

Normalization is asymmetric:

    ====================  ==============================================
    forward (``dft``)     fhat(z) = p**-dim * sum_x f(x) e_p(-x.z)
    inverse               f(x)    = sum_z fhat(z) e_p(x.z)   (no factor)
    physical norms        ||f||_r = (E_x |f(x)|**r) ** (1/r)
    frequency norms       ||g||_l2 = (sum_z |g(z)|**2) ** (1/2)
    ====================  ==============================================

so that Parseval reads ``norm_r(f, 2) == ell2_norm(dft(f).values)``.
Negative frequencies -k are stored at index p - k.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .fp import check_prime, primitive_root, unit_roots

PHYSICAL = "physical"
FREQUENCY = "frequency"


class SideMismatch(ValueError):
    pass


@dataclass(frozen=True)
class GridFn:
    """Complex function on F_p (dim 1) or F_p^2 (dim 2), indexed ``[x1, x2]``."""

    p: int
    values: np.ndarray
    side: str = PHYSICAL

    def __post_init__(self):
        p = check_prime(self.p)
        values = np.asarray(self.values, dtype=np.complex128)
        if values.ndim not in (1, 2) or any(n != p for n in values.shape):
            raise ValueError(f"values of shape {values.shape} do not match p={p}")
        if self.side not in (PHYSICAL, FREQUENCY):
            raise ValueError(f"unknown side {self.side!r}")
        values.setflags(write=False)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "values", values)

    @property
    def dim(self) -> int:
        return self.values.ndim

    def __add__(self, other: GridFn) -> GridFn:
        _same_grid(self, other)
        return GridFn(self.p, self.values + other.values, self.side)

    def __sub__(self, other: GridFn) -> GridFn:
        _same_grid(self, other)
        return GridFn(self.p, self.values - other.values, self.side)

    def __mul__(self, c) -> GridFn:
        return GridFn(self.p, self.values * c, self.side)

    __rmul__ = __mul__


def _same_grid(f: GridFn, g: GridFn):
    if f.p != g.p or f.dim != g.dim or f.side != g.side:
        raise SideMismatch("grids differ in p, dimension or side")


def grid(values, p: int | None = None, side: str = PHYSICAL) -> GridFn:
    values = np.asarray(values)
    return GridFn(values.shape[0] if p is None else p, values, side)


def _as_values(f) -> np.ndarray:
    return f.values if isinstance(f, GridFn) else np.asarray(f)


@functools.lru_cache(maxsize=32)
def _dft_matrix(p: int) -> np.ndarray:
    k = np.arange(p, dtype=np.int64)
    mat = unit_roots(p).values[np.outer(k, k) % p]
    mat.setflags(write=False)
    return mat


def _naive_axis(values: np.ndarray, axis: int, sign: int) -> np.ndarray:
    """Unnormalized sum_x v(x) e_p(sign * x z) along one axis, by matrix product."""
    mat = _dft_matrix(values.shape[axis])
    if sign < 0:
        mat = mat.conj()
    moved = np.moveaxis(values, axis, -1)
    return np.moveaxis(moved @ mat, -1, axis)


def _check_side(f: GridFn, want: str, force: bool):
    if not isinstance(f, GridFn):
        raise TypeError("expected a GridFn")
    if f.side != want and not force:
        raise SideMismatch(f"expected a {want}-side function, got {f.side}")


def dft(f: GridFn, force: bool = False) -> GridFn:
    """Reference transform: direct summation, O(p^(dim+1))."""
    _check_side(f, PHYSICAL, force)
    out = f.values
    for axis in range(f.dim):
        out = _naive_axis(out, axis, -1)
    return GridFn(f.p, out / f.p**f.dim, FREQUENCY)


def inverse_dft(g: GridFn, force: bool = False) -> GridFn:
    _check_side(g, FREQUENCY, force)
    out = g.values
    for axis in range(g.dim):
        out = _naive_axis(out, axis, +1)
    return GridFn(g.p, out, PHYSICAL)


# Rader's algorithm.  With g a generator of F_p^*, writing x = g^q and
# z = g^-r turns sum_{x != 0} v(x) e_p(s x z) into a length p-1 cyclic
# convolution of a[q] = v(g^q) with b[q] = e_p(s g^-q), done here by
# zero padding to a power of two >= 2(p-1) - 1.


@functools.lru_cache(maxsize=32)
def _rader_plan(p: int, sign: int):
    g = primitive_root(p)
    n = p - 1
    gpow = np.empty(n, dtype=np.int64)
    acc = 1
    for q in range(n):
        gpow[q] = acc
        acc = acc * g % p
    ginv = np.empty(n, dtype=np.int64)
    ginv[0] = 1
    ginv[1:] = gpow[:0:-1]  # g^-q = g^(n-q)
    b = unit_roots(p).values[(sign * ginv) % p]
    m = 1
    while m < 2 * n - 1:
        m *= 2
    b_pad = np.zeros(m, dtype=np.complex128)
    b_pad[:n] = b
    b_pad[m - n + 1 :] = b[1:]
    return gpow, ginv, np.fft.fft(b_pad), m


def _rader_last_axis(values: np.ndarray, sign: int) -> np.ndarray:
    p = values.shape[-1]
    gpow, ginv, b_hat, m = _rader_plan(p, sign)
    n = p - 1
    a = values[..., gpow]
    conv = np.fft.ifft(np.fft.fft(a, m, axis=-1) * b_hat, axis=-1)[..., :n]
    out = np.empty(values.shape, dtype=np.complex128)
    out[..., 0] = values.sum(axis=-1)
    out[..., ginv] = values[..., :1] + conv
    return out


def fft_axis(values, axis: int = -1, sign: int = -1) -> np.ndarray:
    """Unnormalized prime-length transform along ``axis``: sum_x v(x) e_p(sign x z)."""
    values = np.asarray(values, dtype=np.complex128)
    moved = np.moveaxis(values, axis, -1)
    return np.moveaxis(_rader_last_axis(moved, 1 if sign > 0 else -1), -1, axis)


def dft_fast(f: GridFn, force: bool = False) -> GridFn:
    """Same as :func:`dft`, O(p^dim log p)."""
    _check_side(f, PHYSICAL, force)
    out = f.values
    for axis in range(f.dim):
        out = fft_axis(out, axis, -1)
    return GridFn(f.p, out / f.p**f.dim, FREQUENCY)


def inverse_dft_fast(g: GridFn, force: bool = False) -> GridFn:
    _check_side(g, FREQUENCY, force)
    out = g.values
    for axis in range(g.dim):
        out = fft_axis(out, axis, +1)
    return GridFn(g.p, out, PHYSICAL)


def norm_r(f, r: float) -> float:
    """Expectation-normalized r-norm on the physical side."""
    if r < 1:
        raise ValueError("r must be >= 1")
    if isinstance(f, GridFn) and f.side != PHYSICAL:
        raise SideMismatch("norm_r is taken on the physical side")
    v = np.abs(_as_values(f))
    return float(np.mean(v**r) ** (1.0 / r))


def ell2_norm(g) -> float:
    """Unnormalized Euclidean norm (frequency side, any index set)."""
    v = np.abs(_as_values(g))
    return float(np.sqrt(np.sum(v * v)))


def quartic_fourier_sum(phi_hat) -> complex:
    """sum over n1 - n2 - n3 + n4 = 0 of phi_hat(n1) conj(phi_hat(n2)) conj(phi_hat(n3)) phi_hat(n4).

    Grouped by s = n1 + n4 = n2 + n3 this is sum_s |sum_{a+b=s} phi_hat(a) phi_hat(b)|^2.
    """
    v = _as_values(phi_hat)
    if v.ndim != 1:
        raise ValueError("expected a 1-D frequency array")
    p = v.shape[0]
    idx = np.arange(p)
    pair = np.zeros(p, dtype=np.complex128)
    for a in range(p):
        pair[(a + idx) % p] += v[a] * v
    return complex(np.sum(pair * pair.conj()))
