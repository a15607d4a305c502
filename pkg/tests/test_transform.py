import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from polycorners.transform import (
    FREQUENCY,
    GridFn,
    SideMismatch,
    dft,
    dft_fast,
    ell2_norm,
    fft_axis,
    inverse_dft,
    inverse_dft_fast,
    norm_r,
    quartic_fourier_sum,
)

PRIMES = [3, 5, 7, 11, 13, 17, 31, 101]


def brute_dft_1d(v):
    p = len(v)
    return [sum(v[x] * cmath.exp(-2j * math.pi * x * z / p) for x in range(p)) / p for z in range(p)]


def rand_grid(rng, p, dim=2):
    shape = (p,) * dim
    return GridFn(p, rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def test_dft_against_scalar_loops():
    rng = np.random.default_rng(4)
    v = rng.standard_normal(7)
    assert np.allclose(dft(GridFn(7, v)).values, brute_dft_1d(list(v)), atol=1e-13)


@pytest.mark.parametrize("p", PRIMES)
def test_fast_matches_naive(p):
    rng = np.random.default_rng(p)
    for dim in (1, 2):
        f = rand_grid(rng, p, dim)
        assert np.max(np.abs(dft_fast(f).values - dft(f).values)) < 1e-12
        g = GridFn(p, f.values, FREQUENCY)
        assert np.max(np.abs(inverse_dft_fast(g).values - inverse_dft(g).values)) < 1e-9


@pytest.mark.parametrize("p", [257, 499])
def test_fast_matches_naive_larger(p):
    f = rand_grid(np.random.default_rng(1), p, 1)
    assert np.max(np.abs(dft_fast(f).values - dft(f).values)) < 1e-12


def test_fft_axis_delta():
    # transform of a point mass at x0 is e_p(-x0 z)
    p, x0 = 13, 5
    v = np.zeros(p)
    v[x0] = 1
    z = np.arange(p)
    assert np.allclose(fft_axis(v, sign=-1), np.exp(-2j * np.pi * x0 * z / p))


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([5, 7, 11, 31]), st.integers(0, 2**32 - 1))
def test_parseval_and_inversion(p, seed):
    f = rand_grid(np.random.default_rng(seed), p)
    F = dft_fast(f)
    assert math.isclose(norm_r(f, 2), ell2_norm(F), rel_tol=1e-9)
    assert np.allclose(inverse_dft_fast(F).values, f.values, atol=1e-10)


@settings(max_examples=30, deadline=None)
@given(arrays(np.float64, 7, elements=st.floats(-3, 3)))
def test_quartic_identity(v):
    p = 7
    F = dft(GridFn(p, v)).values
    lhs = norm_r(v, 4) ** 4
    assert abs(quartic_fourier_sum(F) - lhs) <= 1e-9 * max(1.0, lhs)


def test_quartic_sum_brute():
    p = 5
    F = np.random.default_rng(0).standard_normal(p) + 1j
    brute = 0
    for n1 in range(p):
        for n2 in range(p):
            for n3 in range(p):
                n4 = (n2 + n3 - n1) % p
                brute += F[n1] * F[n2].conjugate() * F[n3].conjugate() * F[n4]
    assert abs(quartic_fourier_sum(F) - brute) < 1e-12


def test_side_tags():
    f = GridFn(5, np.ones((5, 5)))
    F = dft(f)
    assert F.side == FREQUENCY
    with pytest.raises(SideMismatch):
        dft(F)
    with pytest.raises(SideMismatch):
        inverse_dft_fast(f)
    with pytest.raises(SideMismatch):
        norm_r(F, 2)
    with pytest.raises(SideMismatch):
        f + F
    assert dft(F, force=True).side == FREQUENCY


def test_gridfn_shape_checks():
    with pytest.raises(ValueError):
        GridFn(5, np.ones((5, 4)))
    with pytest.raises(ValueError):
        GridFn(6, np.ones(6))
    f = GridFn(3, np.arange(9.0).reshape(3, 3))
    assert (2 * f - f).values.tolist() == f.values.tolist()


def test_norms_of_constant():
    f = GridFn(5, np.full((5, 5), 2.0))
    assert norm_r(f, 1) == pytest.approx(2)
    assert norm_r(f, 4) == pytest.approx(2)
    assert ell2_norm(dft(f)) == pytest.approx(2)
