"""Numerical verifiers for the exponential-sum estimates behind the corner theorem.

Each verifier returns a :class:`BoundReport`.  ``measured`` is the raw
quantity, ``scale`` the power of p it is compared against, and
``ratio = measured / scale``.  When a verifier asserts something, ``bound``
is the limit on ``ratio`` (an upper limit unless ``lower`` is set) and
``passed`` records the outcome; report-only scans leave ``passed`` as None.

Shift conventions: the difference operator is applied with the shift vector
exactly as given.  ``shift_vector(h, "plain")`` is (h1, h2);
``shift_vector(h, "reflected")`` is (-h1, h2), the convention under which
:func:`k4_matrix` equals :func:`katz_variety_sum`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .fp import (
    FpPoly,
    inverse_array,
    mod_inverse,
    poly_degree,
    poly_derivative,
    poly_gcd,
    poly_reduce,
    poly_values,
    unit_roots,
)
from .kernel import KernelMismatch, KernelTable, delta_shift, kernel_naive, truncate
from .kernel import gauss_kernel_quadratic
from .transform import dft_fast, fft_axis, grid, norm_r

FLOAT_SLACK = 1e-9


class ZeroShift(ValueError):
    pass


class InadmissibleIndices(ValueError):
    pass


class DegreeOrder(ValueError):
    pass


class PointNotOnVariety(ValueError):
    pass


class DegenerateRational(ValueError):
    pass


class NotCoprime(ValueError):
    pass


@dataclass
class BoundReport:
    name: str
    p: int
    measured: float
    scale: float
    ratio: float
    bound: float | None = None
    lower: bool = False
    passed: bool | None = None
    witness: tuple = ()
    params: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        out = asdict(self)
        out["witness"] = [int(w) if isinstance(w, (int, np.integer)) else w for w in self.witness]
        return out


def _judge(ratio: float, bound: float, lower: bool = False, slack: float = FLOAT_SLACK) -> bool:
    return ratio >= bound - slack if lower else ratio <= bound + slack


def _poly_params(phi1: FpPoly, phi2: FpPoly) -> dict:
    return {"phi1": phi1.to_list(), "phi2": phi2.to_list()}


def shift_vector(h, convention: str = "plain") -> tuple[int, int]:
    h1, h2 = (int(c) for c in h)
    if convention == "plain":
        return h1, h2
    if convention == "reflected":
        return -h1, h2
    raise ValueError(f"unknown shift convention {convention!r}")


def _nonzero_shift(h, p: int) -> tuple[int, int]:
    h1, h2 = int(h[0]) % p, int(h[1]) % p
    if h1 == 0 and h2 == 0:
        raise ZeroShift("shift h must be nonzero")
    return h1, h2


# -- Weil ------------------------------------------------------------------


def verify_weil(K: KernelTable) -> BoundReport:
    """max |K| off the origin against p^-1/2, with explicit constant max(d1, d2) - 1."""
    if K.truncated:
        raise KernelMismatch("verify_weil needs the untruncated kernel")
    p = K.p
    mag = np.abs(K.values).copy()
    mag[0, 0] = -1.0
    witness = np.unravel_index(np.argmax(mag), mag.shape)
    measured = float(mag[witness])
    scale = p**-0.5
    ratio = measured / scale
    bound = float(K.weil_constant)
    return BoundReport(
        "weil", p, measured, scale, ratio, bound, passed=_judge(ratio, bound),
        witness=tuple(int(w) for w in witness), params=_poly_params(K.phi1, K.phi2),
    )


def verify_gauss(p: int, phi1: FpPoly, phi2: FpPoly, K: KernelTable | None = None) -> BoundReport:
    """Quadratic case: |K| = p^-1/2 wherever a1 n1 + a2 m2 != 0, and the closed
    form agrees with direct summation."""
    K = kernel_naive(p, phi1, phi2) if K is None else K
    closed = gauss_kernel_quadratic(p, phi1, phi2)
    a1, a2 = phi1.coeffs[2], phi2.coeffs[2]
    n = np.arange(p)
    alpha = (a1 * n[:, None] + a2 * n[None, :]) % p
    dev = np.where(alpha != 0, np.abs(np.abs(K.values) - p**-0.5), 0.0)
    witness = np.unravel_index(np.argmax(dev), dev.shape)
    mismatch = float(np.max(np.abs(closed.values - K.values)))
    measured = float(dev[witness])
    return BoundReport(
        "gauss", p, measured, 1.0, measured, 1e-10,
        passed=measured <= 1e-10 and mismatch <= 1e-9,
        witness=tuple(int(w) for w in witness),
        params={**_poly_params(phi1, phi2), "closed_form_mismatch": mismatch},
    )


# -- I(h) split of ||J3||^2 --------------------------------------------------


def i_split(f1, f2, Kt: KernelTable) -> tuple[float, float]:
    """(I(0), sum_{h != 0} I(h)) for the expansion of ||J3||_2^2.

    I(h) = sum_{n1, m2} A_h(n1) B_h(m2) (Delta_{(-h1, h2)} Kt)(n1, m2) with
    A_h(n1) = sum_{n2} f1hat(n) conj f1hat(n - h) and
    B_h(m2) = sum_{m1} f2hat(m) conj f2hat(m + h).
    """
    if not Kt.truncated:
        raise KernelMismatch("i_split needs the truncated kernel")
    g1, g2 = (grid(np.asarray(getattr(f, "values", f))) for f in (f1, f2))
    p = g1.p
    if g2.p != p or Kt.p != p:
        raise KernelMismatch("grid and kernel sizes differ")
    F1 = dft_fast(g1).values
    F2 = dft_fast(g2).values
    k = Kt.values
    i_zero = _i_zero(F1, F2, k)
    rest = 0.0 + 0.0j
    for h1 in range(p):
        for h2 in range(p):
            if h1 == 0 and h2 == 0:
                continue
            A = delta_shift(F1, (-h1, -h2)).sum(axis=1)
            B = delta_shift(F2, (h1, h2)).sum(axis=0)
            D = delta_shift(k, (-h1, h2))
            rest += A @ D @ B
    return i_zero, float(rest.real)


def _i_zero(F1: np.ndarray, F2: np.ndarray, k: np.ndarray) -> float:
    """sum_{n, m} |F1(n)|^2 |F2(m)|^2 |k(n1, m2)|^2."""
    w1 = (np.abs(F1) ** 2).sum(axis=1)
    w2 = (np.abs(F2) ** 2).sum(axis=0)
    return float(w1 @ (np.abs(k) ** 2) @ w2)


def verify_i_zero(f1, f2, Kt: KernelTable) -> BoundReport:
    """I(0) <= (max(d1, d2) - 1)^2 p^-1 ||f1||_2^2 ||f2||_2^2."""
    if not Kt.truncated:
        raise KernelMismatch("verify_i_zero needs the truncated kernel")
    g1, g2 = (grid(np.asarray(getattr(f, "values", f))) for f in (f1, f2))
    p = Kt.p
    i_zero = _i_zero(dft_fast(g1).values, dft_fast(g2).values, Kt.values)
    scale = norm_r(g1, 2) ** 2 * norm_r(g2, 2) ** 2 / p
    ratio = i_zero / scale if scale > 0 else 0.0
    bound = float(Kt.weil_constant**2)
    return BoundReport("i_zero", p, i_zero, scale, ratio, bound, passed=_judge(ratio, bound),
                       params=_poly_params(Kt.phi1, Kt.phi2))


# -- bilinear form and the K4 sum ---------------------------------------------


def bilinear_B(F1, F2, h, Kt: KernelTable) -> BoundReport:
    """|sum F1(n1) F2(m2) (Delta_h Kt)(n1, m2)| / (||F1|| ||F2||) against p^-1/4."""
    p = Kt.p
    h = _nonzero_shift(h, p)
    F1 = np.asarray(F1, dtype=np.complex128)
    F2 = np.asarray(F2, dtype=np.complex128)
    raw = complex(F1 @ delta_shift(Kt.values, h) @ F2)
    norms = float(np.linalg.norm(F1) * np.linalg.norm(F2))
    measured = abs(raw) / norms if norms > 0 else 0.0
    scale = p**-0.25
    return BoundReport("bilinear_B", p, measured, scale, measured / scale, witness=h,
                       params={**_poly_params(Kt.phi1, Kt.phi2), "raw": abs(raw)})


def bilinear_norm(Kt: KernelTable, h) -> BoundReport:
    """Operator norm of Delta_h Kt: the sup of :func:`bilinear_B` over F1, F2."""
    p = Kt.p
    h = _nonzero_shift(h, p)
    measured = float(np.linalg.norm(delta_shift(Kt.values, h), 2))
    scale = p**-0.25
    return BoundReport("bilinear_norm", p, measured, scale, measured / scale, witness=h,
                       params=_poly_params(Kt.phi1, Kt.phi2))


def admissible_mask(p: int, h2: int) -> np.ndarray:
    """(m2, m2') with m2, m2', m2 + h2, m2' + h2 all nonzero."""
    m = np.arange(p)
    ok = (m != 0) & ((m + h2) % p != 0)
    return ok[:, None] & ok[None, :]


def k4_matrix(Kt: KernelTable, u) -> np.ndarray:
    """S(m2, m2') = sum_{n1} (Delta_u Kt)(n1, m2) conj((Delta_u Kt)(n1, m2'))."""
    D = delta_shift(Kt.values, u)
    return D.T @ D.conj()


@dataclass
class GeneralizedDiagonalCertificate:
    exceed_set: list[tuple[int, int]]
    row_max: int
    col_max: int
    threshold: float
    threshold_c: float
    cap: int

    @property
    def shape_ok(self) -> bool:
        return self.row_max <= self.cap and self.col_max <= self.cap

    def recheck(self, S: np.ndarray) -> bool:
        return all(abs(S[a, b]) > self.threshold for a, b in self.exceed_set)


def equal_degree_unresolved(phi1: FpPoly, phi2: FpPoly, h) -> bool:
    """d1 = d2 > 2 with a h1 = b h2: no fourth-moment bound is available here."""
    if phi1.degree != phi2.degree or phi1.degree <= 2:
        return False
    p = phi1.p
    return not generic_shift(p, phi1.leading, phi2.leading, h)


def k4_scan(p: int, phi1: FpPoly, phi2: FpPoly, h, threshold_c: float = 20.0,
            convention: str = "plain", Kt: KernelTable | None = None,
            weil_c: float | None = None, cap: int | None = None):
    """Scan S(m2, m2') over admissible pairs and detect the generalized diagonal.

    exceed_set holds the admissible pairs with |S| > threshold_c p^-3/2.  The
    report asserts the Weil fallback |S| <= weil_c / p for every admissible
    pair, with weil_c = (max(d1, d2) - 1)^4 by default.
    """
    h = _nonzero_shift(h, p)
    if Kt is None:
        from .kernel import kernel_fast

        Kt = truncate(kernel_fast(p, phi1, phi2))
    if not Kt.truncated or not Kt.matches(p, phi1, phi2):
        raise KernelMismatch("k4_scan needs the truncated kernel of (p, phi1, phi2)")
    dmax = max(phi1.degree, phi2.degree)
    weil_c = float((dmax - 1) ** 4) if weil_c is None else float(weil_c)
    cap = (phi1.degree + phi2.degree) ** 2 if cap is None else int(cap)
    u = shift_vector(h, convention)
    S = np.abs(k4_matrix(Kt, u))
    adm = admissible_mask(p, h[1])
    threshold = threshold_c * p**-1.5
    exceed = adm & (S > threshold)
    pairs = [(int(a), int(b)) for a, b in zip(*np.nonzero(exceed))]
    row_max = int(exceed.sum(axis=1).max()) if pairs else 0
    col_max = int(exceed.sum(axis=0).max()) if pairs else 0
    cert = GeneralizedDiagonalCertificate(pairs, row_max, col_max, threshold, threshold_c, cap)
    masked = np.where(adm, S, -1.0)
    witness = np.unravel_index(np.argmax(masked), S.shape)
    measured = float(max(masked[witness], 0.0))
    off = np.where(adm & ~exceed, S, 0.0)
    unresolved = equal_degree_unresolved(phi1, phi2, h)
    passed = None if unresolved else (_judge(measured * p, weil_c) and cert.shape_ok)
    report = BoundReport(
        "k4", p, measured, 1.0 / p, measured * p, weil_c, passed=passed,
        witness=tuple(int(w) for w in witness),
        params={
            **_poly_params(phi1, phi2), "h": list(h), "convention": convention,
            "threshold_c": threshold_c, "exceed_count": len(pairs),
            "row_max": row_max, "col_max": col_max, "cap": cap,
            "off_diagonal_ratio": float(off.max() * p**1.5), "unresolved": unresolved,
        },
    )
    return report, cert


# -- the variety sum over {G = 0} -------------------------------------------


def _preimage_table(phi: FpPoly) -> np.ndarray:
    """pre[t, k] = k-th y with phi(y) = t, padded with -1."""
    p = phi.p
    v = phi.values()
    counts = np.bincount(v, minlength=p)
    width = int(counts.max())
    pre = np.full((p, width), -1, dtype=np.int64)
    order = np.argsort(v, kind="stable")
    starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
    slot = np.arange(p) - starts[v[order]]
    pre[v[order], slot] = order
    return pre


def check_admissible(p: int, h2: int, m2: int, m2p: int):
    for val in (m2, m2p, m2 + h2, m2p + h2):
        if val % p == 0:
            raise InadmissibleIndices("need m2, m2', m2 + h2, m2' + h2 all nonzero")


def variety_histogram(p: int, phi1: FpPoly, phi2: FpPoly, h, m2: int, m2p: int) -> np.ndarray:
    """hist[r] = #{y in F_p^4 : G(y) = 0, H(y) = r}.

    For each (y1, y2, y3) the fourth coordinate runs over the preimages of
    phi1(y2) + phi1(y3) - phi1(y1), so the work is O(d1 p^3).
    """
    h1, h2 = int(h[0]) % p, int(h[1]) % p
    v1, v2 = phi1.values(), phi2.values()
    pre = _preimage_table(phi1)
    hist = np.zeros(p, dtype=np.int64)
    y = np.arange(p)
    for y1 in range(p):
        t = (v1[y][:, None] + v1[y][None, :] - v1[y1]) % p  # [y2, y3]
        base = (m2 * (v2[y1] - v2[y][:, None]) % p - m2p * v2[y][None, :] % p
                + h1 * v1[y][:, None] % p - h2 * v2[y][:, None] % p)
        for k in range(pre.shape[1]):
            y4 = pre[t, k]
            ok = y4 >= 0
            y4 = y4[ok]
            H = (base[ok] - h1 * v1[y4] % p + (m2p + h2) % p * v2[y4] % p) % p
            hist += np.bincount(H, minlength=p)
    return hist


def katz_variety_sum(p: int, phi1: FpPoly, phi2: FpPoly, h, m2: int, m2p: int,
                     check: bool = True) -> complex:
    """p^-3 sum over {G = 0} of e_p(H); equals k4_matrix under the reflected shift."""
    if check:
        check_admissible(p, int(h[1]), m2, m2p)
    hist = variety_histogram(p, phi1, phi2, h, m2, m2p)
    return complex(hist @ unit_roots(p).values) / p**3


# -- leading-term algebra ----------------------------------------------------


def _roots_of_power(p: int, k: int, target: int, powers: np.ndarray) -> list[int]:
    return [int(s) for s in np.flatnonzero(powers == target % p)]


def diagonal_equation_check(p: int, d1: int, d2: int, h2: int, m2: int, m2p: int,
                            variants: bool = False) -> bool:
    """Does (1/m2)^e - (1/(m2+h2))^e - (1/m2')^e + (1/(m2'+h2))^e = 0 for some branch?

    e = d1 / (d2 - d1); t^e means any s with s^(d2-d1) = t^d1.  With
    ``variants`` the equations with one or two terms deleted are tried too.
    """
    if d1 >= d2:
        raise DegreeOrder("needs d1 < d2")
    check_admissible(p, h2, m2, m2p)
    k = d2 - d1
    powers = np.array([pow(s, k, p) for s in range(p)], dtype=np.int64)
    ts = [mod_inverse(v, p) for v in (m2, m2 + h2, m2p, m2p + h2)]
    branches = [_roots_of_power(p, k, pow(t, d1, p), powers) for t in ts]
    signs = (1, -1, -1, 1)
    keep_sets = [(0, 1, 2, 3)]
    if variants:
        keep_sets += [c for r in (3, 2) for c in itertools.combinations(range(4), r)]
    for keep in keep_sets:
        choices = [branches[i] for i in keep]
        for combo in itertools.product(*choices):
            if sum(signs[i] * s for i, s in zip(keep, combo)) % p == 0:
                return True
    return False


def diagonal_solution_set(p: int, d1: int, d2: int, h2: int, variants: bool = False) -> np.ndarray:
    """Boolean p x p table of admissible (m2, m2') solving the diagonal equation."""
    out = np.zeros((p, p), dtype=bool)
    adm = admissible_mask(p, h2)
    for a, b in zip(*np.nonzero(adm)):
        out[a, b] = diagonal_equation_check(p, d1, d2, h2, int(a), int(b), variants)
    return out


def generic_shift(p: int, a: int, b: int, h) -> bool:
    """The extra assumption a h1 != b h2 (mod p)."""
    return (a * int(h[0]) - b * int(h[1])) % p != 0


def rank_one_condition(p: int, a: int, b: int, h, m2: int, m2p: int,
                       nonzero=(True, True, True, True)) -> bool:
    """b m2 = b(m2 + h2) - a h1 = b m2' = b(m2' + h2) - a h1, over the coordinates
    that are nonzero (zero coordinates drop their term)."""
    h1, h2 = int(h[0]), int(h[1])
    c = [b * m2, b * (m2 + h2) - a * h1, b * m2p, b * (m2p + h2) - a * h1]
    kept = {ci % p for ci, nz in zip(c, nonzero) if nz}
    return len(kept) <= 1


def _rank_2x4(rows, p: int) -> int:
    r0, r1 = ([x % p for x in r] for r in rows)
    if not any(r0) and not any(r1):
        return 0
    for i in range(4):
        for j in range(i + 1, 4):
            if (r0[i] * r1[j] - r0[j] * r1[i]) % p:
                return 2
    return 1


def leading_forms(p: int, phi1: FpPoly, phi2: FpPoly, h, m2: int, m2p: int):
    """Coefficients (gc, hc, d_G, d_H) of the leading forms
    G_lead = sum gc_i y_i^d_G and H_lead = sum hc_i y_i^d_H."""
    d1, d2 = phi1.degree, phi2.degree
    a, b = phi1.leading, phi2.leading
    h1, h2 = int(h[0]), int(h[1])
    gc = [a, -a, -a, a]
    if d1 < d2:
        hc = [b * m2, -b * (m2 + h2), -b * m2p, b * (m2p + h2)]
    elif d1 == d2:
        hc = [b * m2, -(b * (m2 + h2) - a * h1), -b * m2p, b * (m2p + h2) - a * h1]
    else:
        raise DegreeOrder("needs d1 <= d2")
    return [c % p for c in gc], [c % p for c in hc], d1, d2


def jacobian_rank(p: int, phi1: FpPoly, phi2: FpPoly, h, m2: int, m2p: int, point) -> int:
    """Rank over F_p of the gradients of the leading forms at a point of
    {G_lead = H_lead = 0} minus the origin."""
    gc, hc, dg, dh = leading_forms(p, phi1, phi2, h, m2, m2p)
    y = [int(c) % p for c in point]
    if not any(y):
        raise PointNotOnVariety("the origin is excluded")
    G = sum(c * pow(v, dg, p) for c, v in zip(gc, y)) % p
    H = sum(c * pow(v, dh, p) for c, v in zip(hc, y)) % p
    if G or H:
        raise PointNotOnVariety(f"{tuple(y)} is not on the leading-term variety")
    rows = (
        [dg * c * pow(v, dg - 1, p) for c, v in zip(gc, y)],
        [dh * c * pow(v, dh - 1, p) for c, v in zip(hc, y)],
    )
    return _rank_2x4(rows, p)


# -- Bombieri's bound for rational functions ---------------------------------


@dataclass(frozen=True)
class PoleData:
    n_poles: int
    pole_degree: int

    def bound(self, p: int) -> float:
        return (self.n_poles - 2 + self.pole_degree) * math.sqrt(p) + 1.0


def pole_data(p: int, num, den) -> PoleData:
    """Distinct poles (including infinity) and degree of the polar divisor of num/den."""
    num, den = poly_reduce(num, p), poly_reduce(den, p)
    dn, dd = poly_degree(num), poly_degree(den)
    finite = dd - poly_degree(poly_gcd(den, poly_derivative(den, p), p)) if dd > 0 else 0
    at_infinity = max(dn - dd, 0)
    return PoleData(finite + (1 if at_infinity else 0), max(dd, 0) + at_infinity)


def rational_sum(p: int, num, den) -> complex:
    """sum over x with den(x) != 0 of e_p(num(x) / den(x))."""
    dv = poly_values(den, p)
    ok = dv != 0
    vals = poly_values(num, p)[ok] * inverse_array(dv[ok], p) % p
    hist = np.bincount(vals, minlength=p)
    return complex(hist @ unit_roots(p).values)


def bombieri_sum(p: int, f1, f2) -> BoundReport:
    """|S(f1/f2)| against (n - 2 + deg(f)_inf) sqrt(p) + 1, zero slack beyond rounding.

    A constant denominator routes to the polynomial (Weil) bound (deg - 1) sqrt(p).
    """
    num, den = poly_reduce(f1, p), poly_reduce(f2, p)
    if not den:
        raise DegenerateRational("denominator vanishes mod p")
    if poly_degree(poly_gcd(num, den, p)) > 0:
        raise NotCoprime("numerator and denominator share a factor mod p")
    params = {"f1": list(f1), "f2": list(f2)}
    if poly_degree(den) == 0:
        inv = mod_inverse(den[0], p)
        poly = poly_reduce([c * inv for c in num], p)
        deg = poly_degree(poly)
        if deg < 1:
            raise DegenerateRational("f1/f2 is constant mod p")
        S = rational_sum(p, poly, [1])
        bound = (deg - 1) * math.sqrt(p)
        params.update(route="polynomial", degree=deg)
    else:
        S = rational_sum(p, num, den)
        poles = pole_data(p, num, den)
        bound = poles.bound(p)
        params.update(route="rational", n_poles=poles.n_poles, pole_degree=poles.pole_degree)
    measured = abs(S)
    params["sqrt_p_ratio"] = measured / math.sqrt(p)
    return BoundReport("bombieri", p, measured, 1.0, measured, bound,
                       passed=_judge(measured, bound), params=params)


def reciprocal_family_sums(p: int, a1: int, a2: int, m2: int, m2p: int) -> np.ndarray:
    """S(c) = sum_x e_p(c / ((a1 x + a2 m2)(a1 x + a2 m2'))) for every c in F_p.

    One histogram of the reciprocal values, then one transform over c.
    """
    x = np.arange(p, dtype=np.int64)
    den = (a1 * x + a2 * m2) % p * ((a1 * x + a2 * m2p) % p) % p
    ok = den != 0
    hist = np.bincount(inverse_array(den[ok], p), minlength=p).astype(np.complex128)
    return fft_axis(hist, -1, +1)


def verify_bombieri_family(p: int, a1: int = 1, a2: int = 1) -> BoundReport:
    """All m2 != m2' and c != 0: |S| <= 2 sqrt(p) + 1, hence p^-2 |S| <= 3 p^-3/2."""
    if a1 % p == 0 or a2 % p == 0:
        raise DegenerateRational("a1, a2 must be nonzero mod p")
    bound = 2 * math.sqrt(p) + 1
    worst, witness = -1.0, ()
    for m2 in range(p):
        for m2p in range(p):
            if m2 == m2p:
                continue
            mags = np.abs(reciprocal_family_sums(p, a1, a2, m2, m2p)[1:])
            k = int(np.argmax(mags))
            if mags[k] > worst:
                worst, witness = float(mags[k]), (m2, m2p, k + 1)
    normalized = worst / p**2
    return BoundReport(
        "bombieri_family", p, worst, 1.0, worst, bound, passed=_judge(worst, bound),
        witness=witness,
        params={"a1": a1, "a2": a2, "normalized_ratio": normalized * p**1.5,
                "normalized_bound": 3.0},
    )
