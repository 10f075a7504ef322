"""Point counts of elliptic curves over small fields and their lifts.

Run with ``python demos/02_point_counts.py``.
"""
import numpy as np

from collections import Counter

from k3frob import ellcurve as ec
from k3frob.gf import build_field, frobenius_orbits

F = build_field(5, 2)  # F_25, elements encoded as c0 + 5 c1
F.modulus  # defining polynomial, constant term first
g = F.generator
F.pow(g, 24), F.pow(g, 12)  # 1 and -1

# quadratic characters of every element at once
chi = F.vchi(F.elements())
print("squares in F_25*:", int((chi == 1).sum()))

# y^2 = x^3 + x over F_5 has 4 points: trace 2
F5 = build_field(5, 1)
n = ec.count_points_brute(F5, 1, 0)
a = 5 + 1 - n
print("#E(F_5) =", n, " #E(F_25) via lift =", ec.lift_count(5, a, 2),
      " brute =", ec.count_points_brute(F, 1, 0))

# singular cubics: split node q, non-split node q + 2, cusp q + 1
# (x - x0)^2 (x + 2 x0) = x^3 - 3 x0^2 x + 2 x0^3
for x0 in range(5):
    a4, a6 = -3 * x0**2 % 5, 2 * x0**3 % 5
    fib = ec.classify_fiber(F5, a4, a6)
    print(fib.fiber_class.value, ec.count_points(F5, a4, a6))

# a larger field: Hasse-interval counting matches brute force
F = build_field(1009, 1)
lo, hi = ec.hasse_interval(F.q)
rng = np.random.default_rng(1)
for a4, a6 in rng.integers(1, F.q, size=(5, 2)).tolist():
    print(a4, a6, ec.count_points_hasse(F, a4, a6), ec.count_points_brute(F, a4, a6), (lo, hi))

# Frobenius orbits on P^1(F_{5^4}): degrees 1, 2 and 4
print(Counter(d for _, d in frobenius_orbits(build_field(5, 4))))
