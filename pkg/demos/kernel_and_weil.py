"""How big is the exponential-sum kernel?

Build K(n1, m2) = E_y e_p(n1 y^2 + m2 y^3) two ways, then look at how
sqrt(p) * max |K| behaves as p grows.  The Weil bound caps it at 2.
"""
import numpy as np

from polycorners.bounds import verify_weil
from polycorners.fp import parse_poly, primes_between
from polycorners.kernel import kernel_fast, kernel_naive

p = 31
phi1, phi2 = parse_poly("0,0,1", p), parse_poly("0,0,0,1", p)
K = kernel_fast(p, phi1, phi2)
print("fast vs naive:", np.max(np.abs(K.values - kernel_naive(p, phi1, phi2).values)))
print("K(0, 0) =", K.values[0, 0])

# the column m2 = 0 is a pure quadratic Gauss sum: every entry has modulus p^-1/2
print("sqrt(p)|K(n1, 0)| for n1 = 1..5:", np.round(np.sqrt(p) * np.abs(K.values[1:6, 0]), 12))

print("\n  p   sqrt(p) max|K|")
for q in primes_between(101, 199)[::4]:
    rep = verify_weil(kernel_fast(q, parse_poly("0,0,1", q), parse_poly("0,0,0,1", q)))
    print(f"{q:4d}   {rep.ratio:.4f}   (at n = {rep.witness})")
