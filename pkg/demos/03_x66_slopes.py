"""Valuations of b_r for the order-66 surface against the predicted heights.

Run with ``python demos/03_x66_slopes.py``; takes under a minute.
The same data comes from the command line, e.g.

    k3frob verify --surface demos/x66.json --prime 23 --max-degree 2
"""
from k3frob import surface as sf

spec = sf.load_surface("demos/x66.json")  # or sf.x66()
print(spec)

for p, max_r in [(67, 1), (23, 2), (43, 2), (131, 2), (17, 3), (13, 2)]:
    res = sf.verify(spec, p, max_r)
    print(f"p = {p}: predicted {res.verdict.predicted.describe()}")
    for rec, row in zip(res.records, res.verdict.rows):
        print(f"   r = {rec.r}  b = {rec.b}  v = {rec.v}  bound = {row.bound}  {row.status}")
    print("  ", res.verdict.summary)

# one orbit-method count with singular fiber census
rec = sf.count_surface(spec, 131, 3, method="orbit")
print(rec.W, rec.v, rec.singular_fibers)

# p = 31, r = 5 certifies height 5 (v = 4); a few minutes:
# sf.count_surface(spec, 31, 5, method="orbit")
