import json
import math
import random
from collections import defaultdict

import pytest

from k3frob import ellcurve as ec
from k3frob import surface as sf
from k3frob.errors import BadReduction, BudgetExceeded, InvalidQuery, MixedPrimes
from k3frob.gf import build_field
from k3frob.predictor import FrobeniusInvariant, Kind, PredictionQuery, predict


def random_spec(seed):
    rng = random.Random(seed)
    a4 = [rng.randint(-9, 9) for _ in range(rng.randint(0, 9))]
    a6 = [rng.randint(-9, 9) for _ in range(rng.randint(1, 13))]
    if not any(a6):
        a6[-1] = 1
    return sf.SurfaceSpec(f"rand{seed}", None, tuple(a4), tuple(a6))


RANDOM_SPECS = [random_spec(s) for s in range(6)]


def naive_surface_count(spec, p, r):
    """Sum over every t of P^1 of a fiber count that tries all (x, y) pairs."""
    F = build_field(p, r)
    sq = defaultdict(int)
    for y in range(F.q):
        sq[F.mul(y, y)] += 1

    def ev(coeffs, t):
        acc = 0
        for c in reversed(coeffs):
            acc = F.add(F.mul(acc, t), F.from_int(c))
        return acc

    def fiber(a4, a6):
        n = 1
        for x in range(F.q):
            n += sq[F.add(F.mul(x, F.add(F.mul(x, x), a4)), a6)]
        return n

    i4, i6 = spec.infinity_fiber()
    total = fiber(F.from_int(i4), F.from_int(i6))
    for t in range(F.q):
        total += fiber(ev(spec.a4, t), ev(spec.a6, t))
    return total


def test_x66_loads():
    spec = sf.x66()
    assert spec.N == 66 and spec.a4 == () and spec.bad_primes == (2, 3, 11)
    # y^2 = x^3 + t^12 - t: the fiber at infinity is y^2 = x^3 + 1
    assert spec.infinity_fiber() == (0, 1)
    assert sf.SurfaceSpec.from_dict(spec.to_dict()) == spec


def test_spec_validation():
    with pytest.raises(InvalidQuery):
        sf.SurfaceSpec("zero", None, (), ())
    with pytest.raises(InvalidQuery):
        sf.SurfaceSpec("deg", None, (0,) * 9 + (1,), (1,))
    with pytest.raises(FileNotFoundError):
        sf.load_surface("no_such_surface")


def test_load_from_path(tmp_path):
    path = tmp_path / "s.json"
    path.write_text(json.dumps({"label": "s", "N": 4, "a4": [1, 0, 1], "a6": [0, 1], "bad_primes": [2]}))
    spec = sf.load_surface(path)
    assert spec.a4 == (1, 0, 1) and spec.N == 4


@pytest.mark.parametrize("p, r", [(5, 1), (7, 1), (13, 1), (5, 2), (7, 2)])
@pytest.mark.parametrize("spec", [sf.x66()] + RANDOM_SPECS[:2], ids=lambda s: s.label)
def test_counts_match_naive_oracle(spec, p, r):
    W = naive_surface_count(spec, p, r)
    assert sf.count_surface(spec, p, r, method="brute").W == W
    assert sf.count_surface(spec, p, r, method="orbit").W == W


@pytest.mark.parametrize("p, r", [(5, 3), (7, 2), (13, 2), (17, 2), (23, 2)])
@pytest.mark.parametrize("spec", [sf.x66()] + RANDOM_SPECS, ids=lambda s: s.label)
def test_brute_equals_orbit(spec, p, r):
    a = sf.count_surface(spec, p, r, method="brute")
    b = sf.count_surface(spec, p, r, method="orbit")
    assert a.W == b.W and a.b == b.b and a.v == b.v
    assert a.checksum == b.checksum


def test_orbit_with_hasse_fibers_matches_brute():
    # force Hasse-interval counts on every fiber over F_{23^2}
    spec = sf.x66()
    a = sf.count_surface(spec, 23, 2, method="brute")
    b = sf.count_surface(spec, 23, 2, method="orbit", fiber_brute_limit=500)
    assert a.W == b.W


def test_threads_do_not_change_counts():
    spec = RANDOM_SPECS[3]
    one = sf.count_surface(spec, 7, 3, method="orbit")
    many = sf.count_surface(spec, 7, 3, method="orbit", workers=4)
    assert one.W == many.W and one.singular_fibers == many.singular_fibers
    assert sf.count_surface(spec, 7, 3, method="brute", workers=3).W == one.W


@pytest.mark.parametrize("p", [5, 7, 11, 13, 17, 19])
def test_constant_spec(p):
    spec = sf.SurfaceSpec("const", None, (), (1,))
    E = ec.count_points_brute(build_field(p, 1), 0, 1)
    W = sf.count_surface(spec, p, 1).W
    # every affine fiber is y^2 = x^3 + 1; the weight-12 fiber at infinity is the cusp
    assert W == p * E + (p + 1)
    if p % 3 == 2:
        assert E == p + 1 and W == (p + 1) * E


def test_x66_known_values():
    spec = sf.x66()
    rec = sf.count_surface(spec, 67, 1)
    assert rec.v == 0 and rec.b == rec.W - 1 - 67**2
    assert sf.count_surface(spec, 23, 2).v == 1


@pytest.mark.parametrize("p, r", [(5, 1), (7, 2), (13, 3), (17, 2), (23, 2), (67, 1), (131, 1)])
def test_weil_sanity(p, r):
    rec = sf.count_surface(sf.x66(), p, r)
    assert abs(rec.b) <= 46 * p**r
    assert rec.W >= 0 and rec.v >= 0
    assert sum(rec.singular_fibers.values()) <= sf.MAX_SINGULAR_FIBERS


def test_x66_singular_fiber_census():
    # t^12 - t has 12 simple roots over the algebraic closure when p does not divide 66
    for p, r in [(5, 1), (23, 2), (67, 1)]:
        rec = sf.count_surface(sf.x66(), p, r)
        roots = sum(1 for t in range(p**r)
                    if build_field(p, r).pow(t, 12) == t)
        assert rec.singular_fibers == {"Additive": roots}


def test_bad_reduction_and_budget():
    spec = sf.x66()
    for p in (11, 3, 2):
        with pytest.raises(BadReduction):
            sf.count_surface(spec, p, 1)
    with pytest.raises(BudgetExceeded):
        sf.count_surface(spec, 131, 3, method="brute")
    with pytest.raises(InvalidQuery):
        sf.count_surface(spec, 5, 1, method="magic")


def test_valuation_examples():
    assert sf.valuation(132, 131) == 0
    assert sf.valuation(17161, 131) == 2
    assert sf.valuation(0, 5) == math.inf


def _rec(p, r, v):
    return sf.CountRecord("x", p, r, 0, 0, v, "brute", (0, 1))


def test_slope_verdict_examples():
    h1 = FrobeniusInvariant(Kind.FINITE_HEIGHT, height=1)
    verdict = sf.slope_verdict([_rec(67, 1, 0)], h1)
    assert verdict.certifying and verdict.rows[0].status == sf.CERTIFYING
    assert verdict.summary == "certifying height 1"

    h2 = FrobeniusInvariant(Kind.FINITE_HEIGHT, height=2)
    verdict = sf.slope_verdict([_rec(23, 1, 1), _rec(23, 2, 1)], h2)
    assert [row.status for row in verdict.rows] == [sf.CONSISTENT, sf.CERTIFYING]

    ss = predict(PredictionQuery(66, 17))
    verdict = sf.slope_verdict([_rec(17, r, r) for r in (1, 2, 3)], ss)
    assert not verdict.certifying and not verdict.violating
    assert all(row.status == sf.CONSISTENT for row in verdict.rows)


def test_slope_verdict_violations():
    h2 = FrobeniusInvariant(Kind.FINITE_HEIGHT, height=2)
    assert sf.slope_verdict([_rec(23, 1, 0)], h2).violating
    ss = predict(PredictionQuery(66, 131))
    assert sf.slope_verdict([_rec(131, 2, 1)], ss).violating
    # meeting the bound below r = h is only consistent
    h5 = FrobeniusInvariant(Kind.FINITE_HEIGHT, height=5)
    verdict = sf.slope_verdict([_rec(31, r, r) for r in range(1, 5)], h5)
    assert not verdict.certifying and not verdict.violating
    assert "out of reach" in verdict.summary
    assert sf.slope_verdict([_rec(31, 1, 0)], h5).violating
    # at r = h a valuation strictly above the exact value stays consistent
    assert not sf.slope_verdict([_rec(31, 5, 5)], h5).certifying
    assert sf.slope_verdict([_rec(31, 5, 4)], h5).certifying


def test_slope_bounds():
    h10 = FrobeniusInvariant(Kind.FINITE_HEIGHT, height=10)
    for r in range(1, 25):
        bound, exact = sf.slope_bound(h10, r)
        assert bound == math.ceil(r * 0.9 - 1e-12)
        assert exact == (r * 9 // 10 if r % 10 == 0 else None)


def test_mixed_primes():
    h1 = FrobeniusInvariant(Kind.FINITE_HEIGHT, height=1)
    with pytest.raises(MixedPrimes):
        sf.slope_verdict([_rec(5, 1, 0), _rec(7, 1, 0)], h1)


def test_record_json_round_trip():
    rec = sf.count_surface(sf.x66(), 5, 2)
    assert sf.CountRecord.from_json(rec.to_json()) == rec
    inf = sf.CountRecord("x", 5, 1, 26, 0, math.inf, "brute", (0, 1))
    assert sf.CountRecord.from_json(inf.to_json()).v == math.inf


def test_verify_with_cache(tmp_path):
    spec = sf.x66()
    first = sf.verify(spec, 23, 2, cache_dir=tmp_path)
    assert first.cache_hits == []
    assert first.verdict.summary == "certifying height 2"
    second = sf.verify(spec, 23, 2, cache_dir=tmp_path)
    assert second.cache_hits == [1, 2]
    assert [r.to_json() for r in first.records] == [r.to_json() for r in second.records]
    lines = (tmp_path / "x66_p23.jsonl").read_text().splitlines()
    assert len(lines) == 2


def test_cache_skips_corrupt_lines(tmp_path):
    cache = sf.CountCache(tmp_path)
    rec = sf.count_surface(sf.x66(), 7, 1)
    cache.append(rec)
    with open(cache.path("x66", 7), "a") as fh:
        fh.write("{not json\n")
    assert cache.get("x66", 7, 1, rec.modulus) == rec
    assert cache.get("x66", 7, 2, rec.modulus) is None


def test_verify_requires_order():
    with pytest.raises(InvalidQuery):
        sf.verify(RANDOM_SPECS[0], 7, 1)


@pytest.mark.slow
def test_verify_p13_reports_out_of_reach():
    res = sf.verify(sf.x66(), 13, 3)
    assert res.verdict.summary == "consistent with height 10; certification out of reach at desk scale"
    assert [rec.v for rec in res.records] == [1, 2, 3]
