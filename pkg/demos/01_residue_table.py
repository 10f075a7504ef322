"""Heights and Artin invariants by residue class.

Run with ``python demos/01_residue_table.py``.
"""
from math import gcd

from k3frob import numtheory as nt
from k3frob.predictor import PredictionQuery, congruence_table, group_table, predict

N = 66
nt.euler_phi(N)  # 20 > 10, so Artin invariants are certified

table = congruence_table(N)
for inv, residues in group_table(table):
    print(inv.describe(), residues)

# a single prime
inv = predict(PredictionQuery(N, 131))
print(131 % N, inv.describe(), inv.to_dict())

# p = 17: 17^5 = -1 mod 66, so supersingular with sigma = 5
print(nt.minus_one_exponent(17, N), (17**5 + 1) % N)

# p = 31 has order 5 and -1 is never reached
print(nt.mult_order(31, N), nt.minus_one_exponent(31, N))

# how the classes split the primes below 2000
counts = {}
for p in range(5, 2000):
    if nt.is_prime(p) and gcd(p, N) == 1:
        key = predict(PredictionQuery(N, p)).describe()
        counts[key] = counts.get(key, 0) + 1
for key, c in sorted(counts.items()):
    print(f"{c:4d}  {key}")

# small phi: the prediction is conditional on the Picard rank
print(predict(PredictionQuery(12, 5)).describe())
print(predict(PredictionQuery(12, 5, picard_lower_bound=18)).describe())
