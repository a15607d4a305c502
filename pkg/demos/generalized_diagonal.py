"""Where are the large fourth-moment sums?

For a fixed shift h, S(m2, m2') sums a product of differenced kernel
entries over n1.  Most entries sit near p^-3/2; the few that don't should
lie on a thin set meeting each row and column a bounded number of times.
"""
from polycorners.bounds import diagonal_solution_set, k4_scan
from polycorners.fp import parse_poly

p = 61
phi1, phi2 = parse_poly("0,0,1", p), parse_poly("0,0,0,1", p)

for h in [(1, 1), (2, 5), (0, 3)]:
    rep, cert = k4_scan(p, phi1, phi2, h, threshold_c=8.0)
    sol = diagonal_solution_set(p, 2, 3, h[1], variants=True)
    on = sum(bool(sol[a, b]) for a, b in cert.exceed_set)
    print(f"h={h}: p max|S| = {rep.ratio:.3f}, entries above 8 p^-3/2: {len(cert.exceed_set)} "
          f"(row max {cert.row_max}, col max {cert.col_max}), on the diagonal-equation set: {on}")

rep, cert = k4_scan(p, phi1, phi2, (1, 1), threshold_c=8.0)
print("largest entry at", rep.witness, "off-diagonal max / p^-3/2 =",
      round(rep.params["off_diagonal_ratio"], 3))
