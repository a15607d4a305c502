import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polycorners.averaging import (
    DimensionMismatch,
    average_direct,
    average_fourier,
    bilinear_fourier,
    block_kernels,
    j2_ratio,
    j_decompose,
    main_residual,
    polynomial_average,
    rank_one_term,
)
from polycorners.fp import parse_poly
from polycorners.kernel import KernelMismatch, kernel_fast, truncate
from polycorners.transform import FREQUENCY, GridFn, SideMismatch


def pair(p, a="0,0,1", b="0,0,0,1"):
    return parse_poly(a, p), parse_poly(b, p)


def loop_average(f1, f2, phi1, phi2):
    p = f1.shape[0]
    out = np.zeros((p, p), dtype=complex)
    for x1 in range(p):
        for x2 in range(p):
            out[x1, x2] = sum(f1[(x1 + phi1(y)) % p, x2] * f2[x1, (x2 + phi2(y)) % p]
                              for y in range(p)) / p
    return out


def rand(rng, p, complex_=True):
    v = rng.standard_normal((p, p))
    return v + 1j * rng.standard_normal((p, p)) if complex_ else v


def test_direct_matches_loops():
    rng = np.random.default_rng(0)
    p = 7
    phi1, phi2 = pair(p, "0,1,3", "0,0,0,1")
    f1, f2 = rand(rng, p), rand(rng, p)
    assert np.allclose(average_direct(f1, f2, phi1, phi2).values, loop_average(f1, f2, phi1, phi2))


@pytest.mark.parametrize("p", [5, 7, 31])
def test_fourier_matches_direct(p):
    rng = np.random.default_rng(p)
    phi1, phi2 = pair(p)
    K = kernel_fast(p, phi1, phi2)
    f1, f2 = rand(rng, p), rand(rng, p)
    direct = average_direct(f1, f2, phi1, phi2).values
    assert np.max(np.abs(average_fourier(f1, f2, K).values - direct)) < 1e-10
    J = j_decompose(f1, f2, K)
    assert np.max(np.abs(J.total.values - direct)) < 1e-10


@settings(max_examples=15, deadline=None)
@given(st.sampled_from([5, 7, 11]), st.integers(0, 2**32 - 1))
def test_blocks_agree_with_closed_forms(p, seed):
    rng = np.random.default_rng(seed)
    phi1, phi2 = pair(p, "0,1,1", "0,0,0,1")
    K = kernel_fast(p, phi1, phi2)
    f1, f2 = rand(rng, p, False), rand(rng, p, False)
    k1, k2, k3 = block_kernels(K)
    J = j_decompose(f1, f2, K)
    assert np.allclose(bilinear_fourier(f1, f2, k1).values, J.J1.values)
    assert np.allclose(bilinear_fourier(f1, f2, k2).values, J.J2.values)
    assert np.allclose(bilinear_fourier(f1, f2, k3).values, J.J3.values)
    assert np.allclose(bilinear_fourier(f1, f2, truncate(K).values).values, J.J3.values)


def test_j2_formula_by_hand():
    p = 7
    rng = np.random.default_rng(3)
    phi1, phi2 = pair(p)
    f1, f2 = rand(rng, p, False), rand(rng, p, False)
    inner = polynomial_average(f1, phi1, axis=0).values - f1.mean(axis=0)[None, :]
    want = f2.mean(axis=1)[:, None] * inner
    assert np.allclose(j_decompose(f1, f2, kernel_fast(p, phi1, phi2)).J2.values, want)


def test_polynomial_average_loop():
    p = 5
    phi = parse_poly("0,0,1", p)
    f = np.arange(p * p, dtype=float).reshape(p, p)
    want = np.array([[np.mean([f[x1, (x2 + y * y) % p] for y in range(p)]) for x2 in range(p)]
                     for x1 in range(p)])
    assert np.allclose(polynomial_average(f, phi, axis=1).values, want)


def test_constant_functions():
    p = 11
    one = np.ones((p, p))
    phi1, phi2 = pair(p)
    assert np.allclose(average_direct(one, 2 * one, phi1, phi2).values, 2)
    res = main_residual(one, one, phi1, phi2)
    assert res.residual == pytest.approx(0, abs=1e-14)
    assert res.ratio == pytest.approx(0, abs=1e-14)
    assert main_residual(0 * one, one, phi1, phi2).ratio is None
    assert j2_ratio(0 * one, one, kernel_fast(p, phi1, phi2)) is None


def test_rank_one_term_orientation():
    p = 5
    f1 = np.add.outer(np.zeros(p), np.arange(p, dtype=float))  # depends on x2 only
    f2 = np.add.outer(np.arange(p, dtype=float), np.zeros(p))  # depends on x1 only
    assert np.allclose(rank_one_term(f1, f2).values, np.outer(np.arange(p), np.arange(p)))


def test_bilinearity():
    p = 7
    rng = np.random.default_rng(9)
    phi1, phi2 = pair(p)
    f, g, h = rand(rng, p), rand(rng, p), rand(rng, p)
    lhs = average_direct(f + 2 * g, h, phi1, phi2).values
    rhs = average_direct(f, h, phi1, phi2).values + 2 * average_direct(g, h, phi1, phi2).values
    assert np.allclose(lhs, rhs)


def test_rejects_bad_inputs():
    p = 5
    phi1, phi2 = pair(p)
    with pytest.raises(DimensionMismatch):
        average_direct(np.ones((5, 5)), np.ones((7, 7)), phi1, phi2)
    with pytest.raises(SideMismatch):
        average_direct(GridFn(5, np.ones((5, 5)), FREQUENCY), np.ones((5, 5)), phi1, phi2)
    with pytest.raises(KernelMismatch):
        average_fourier(np.ones((5, 5)), np.ones((5, 5)), truncate(kernel_fast(5, phi1, phi2)))
