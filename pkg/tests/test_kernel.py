import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polycorners.fp import FpPoly, parse_poly
from polycorners.kernel import (
    AlreadyTruncated,
    KernelMismatch,
    NotQuadratic,
    delta_shift,
    gauss_kernel_quadratic,
    kernel,
    kernel_fast,
    kernel_naive,
    pushforward_counts,
    truncate,
)

Y2Y3 = ("0,0,1", "0,0,0,1")

# direct cmath summation over y, p = 7, phi = (y^2, y^3)
FROZEN_P7 = {
    (1, 0): 3.172065784643304e-17 + 0.37796447300922725j,
    (0, 1): 0.6772769730217716 - 6.344131569286608e-17j,
    (1, 1): 0.05378717116303809 + 0.23565699438616375j,
    (2, 3): 0.271566981128917 - 0.3405342233544579j,
    (6, 5): 0.1746458477080449 + 0.08410500753631946j,
}


def pair(p, a="0,0,1", b="0,0,0,1"):
    return parse_poly(a, p), parse_poly(b, p)


@pytest.mark.parametrize("builder", [kernel_naive, kernel_fast])
def test_frozen_values(builder):
    K = builder(7, *pair(7))
    for (n1, m2), want in FROZEN_P7.items():
        assert abs(K.values[n1, m2] - want) < 1e-12


@pytest.mark.parametrize("p", [5, 7, 31, 101])
@pytest.mark.parametrize("polys", [Y2Y3, ("0,1,1", "0,0,0,0,1"), ("0,3,0,1", "0,0,2")])
def test_fast_equals_naive(p, polys):
    phi1, phi2 = pair(p, *polys)
    assert np.max(np.abs(kernel_fast(p, phi1, phi2).values - kernel_naive(p, phi1, phi2).values)) < 1e-12


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([5, 13, 101]), st.integers(1, 10**6), st.integers(0, 10**6),
       st.integers(1, 10**6), st.integers(0, 10**6))
def test_gauss_closed_form(p, a1, b1, a2, b2):
    if a1 % p == 0 or a2 % p == 0:
        return
    phi1, phi2 = FpPoly(p, (0, b1, a1)), FpPoly(p, (0, b2, a2))
    ref = kernel_naive(p, phi1, phi2).values
    assert np.max(np.abs(gauss_kernel_quadratic(p, phi1, phi2).values - ref)) < 1e-12


def test_gauss_rejects_cubic():
    with pytest.raises(NotQuadratic):
        gauss_kernel_quadratic(7, *pair(7))


@pytest.mark.parametrize("p", [31, 61])
def test_structure(p):
    phi1, phi2 = pair(p)
    K = kernel_fast(p, phi1, phi2).values
    assert K[0, 0] == 1
    neg = (-np.arange(p)) % p
    assert np.allclose(K[neg][:, neg], K.conj())  # K(-n) = conj K(n)
    assert np.max(np.abs(K[1:, :])) * np.sqrt(p) <= 2 + 1e-9
    assert pushforward_counts(p, phi1, phi2).sum() == p


def test_truncate_and_delta_shift():
    K = kernel_fast(13, *pair(13))
    Kt = truncate(K)
    assert Kt.truncated and not np.any(Kt.values[:, 0])
    assert np.array_equal(Kt.values[:, 1:], K.values[:, 1:])
    with pytest.raises(AlreadyTruncated):
        truncate(Kt)
    g = K.values
    D = delta_shift(g, (2, 5))
    assert D[3, 4] == pytest.approx(g[3, 4] * np.conj(g[5, 9]))
    assert D[12, 10] == pytest.approx(g[12, 10] * np.conj(g[1, 2]))  # wraps
    assert np.allclose(delta_shift(g, (0, 0)), np.abs(g) ** 2)


def test_weil_constant_and_checksum():
    K = kernel(31, *pair(31))
    assert K.weil_constant == 2
    assert K.checksum() == kernel_fast(31, *pair(31)).checksum()


def test_mismatch():
    with pytest.raises(KernelMismatch):
        kernel_fast(7, *pair(5))
