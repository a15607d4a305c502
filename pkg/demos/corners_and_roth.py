"""Counting polynomial corners in random sets.

A random set of density delta has about delta^3 p^3 corners with y != 0,
plus the |A| trivial ones at y = 0.  The lower-bound chain is printed with
the residual constant measured on the same set.
"""
from polycorners.corners import count_corners, generate_set, roth_chain
from polycorners.fp import parse_poly

p = 101
phi1, phi2 = parse_poly("0,0,1", p), parse_poly("0,0,0,1", p)

for delta in (0.1, 0.3, 0.6):
    A = generate_set("random", p, delta=delta, seed=11)
    c = count_corners(A, phi1, phi2)
    d = A.density
    print(f"delta {d:.3f}: corners/p^3 {c.density:.5f}, nontrivial {c.nondegenerate_density:.5f}, "
          f"delta^3 {d**3:.5f}")

A = generate_set("random", p, delta=0.3, seed=11)
chain = roth_chain(A, phi1, phi2)
print(f"\ncorner density {chain.corner_density:.5f} >= lower bound {chain.lower_bound:.5f}: {chain.holds}")
print(f"measured residual constant {chain.residual_constant:.4f}; bound positive: {chain.in_regime}")

# three parallel lines x1 + x2 = r: corners need phi1(y), phi2(y) in {0, +-1, +-2}
L = generate_set("residue", p, residues=[0, 1, 2], coeffs=(1, 1))
print("lines:", count_corners(L, phi1, phi2))
