"""The corner average of two random sign patterns and its three frequency blocks.

A(f1, f2) minus its rank-one part should be small in L2; the ratio
p^(1/8) * residual / (||f1||_4 ||f2||_4) is printed for a few primes.
"""
import numpy as np

from polycorners.averaging import average_direct, j_decompose, main_residual
from polycorners.fp import parse_poly
from polycorners.kernel import kernel_fast
from polycorners.transform import norm_r

rng = np.random.default_rng(7)

for p in (31, 61, 101, 151):
    phi1, phi2 = parse_poly("0,0,1", p), parse_poly("0,0,0,1", p)
    f1 = rng.choice([-1.0, 1.0], size=(p, p))
    f2 = rng.choice([-1.0, 1.0], size=(p, p))
    res = main_residual(f1, f2, phi1, phi2)
    J = j_decompose(f1, f2, kernel_fast(p, phi1, phi2))
    gap = np.max(np.abs(J.total.values - average_direct(f1, f2, phi1, phi2).values))
    n1, n2, n3 = J.norms()
    print(f"p={p:4d}  residual {res.residual:.4f}  ratio {res.ratio:.4f}  "
          f"|J1| {n1:.4f} |J2| {n2:.4f} |J3| {n3:.4f}  (J-sum error {gap:.1e})")

# a function that ignores x1 passes straight through the J1 block
p = 31
phi1, phi2 = parse_poly("0,0,1", p), parse_poly("0,0,0,1", p)
g = np.tile(rng.random(p), (p, 1))
J = j_decompose(g, g, kernel_fast(p, phi1, phi2))
print("\nx1-independent input: |J2| =", norm_r(J.J2, 2))
