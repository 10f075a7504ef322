import random
from collections import Counter

import numpy as np
import pytest

from k3frob import numtheory as nt
from k3frob.errors import DegreeTooLarge, NotPrime
from k3frob.gf import FieldCtx, build_field, frobenius_orbits, orbit_representatives

SMALL_FIELDS = [(3, 1), (5, 1), (7, 1), (5, 2), (7, 2), (23, 2), (3, 5), (5, 3), (7, 3), (13, 2), (5, 4)]
# every extension field with q <= 2^14 among these primes, plus prime fields
CROSS_FIELDS = [(p, r) for p in (3, 5, 7, 11, 13, 17, 23, 31, 67, 127)
                for r in range(1, 10) if p**r <= 2**14]


def test_build_field_examples():
    F = build_field(5, 1)
    assert F.q == 5 and F.modulus == (0, 1)
    F = build_field(23, 2)
    assert F.q == 529
    c0, c1, _ = F.modulus
    assert all((x * x + c1 * x + c0) % 23 for x in range(23))
    F = build_field(131, 3)
    assert F.q == 2248091 and F.backend == "poly"
    assert nt.is_irreducible_mod(list(F.modulus), 131)


def test_modulus_is_deterministic():
    assert FieldCtx(7, 3).modulus == FieldCtx(7, 3).modulus == build_field(7, 3).modulus


def test_errors():
    with pytest.raises(NotPrime):
        build_field(9, 1)
    with pytest.raises(NotPrime):
        build_field(2, 3)
    with pytest.raises(DegreeTooLarge):
        build_field(131, 5)
    with pytest.raises(DegreeTooLarge):
        FieldCtx(131, 3, backend="table")
    with pytest.raises(ZeroDivisionError):
        build_field(5, 2).inv(0)


@pytest.mark.parametrize("p, r", SMALL_FIELDS + [(131, 3), (31, 5)])
def test_field_axioms(p, r):
    F = build_field(p, r)
    rng = random.Random(p * 100 + r)
    for _ in range(300):
        a, b, c = (rng.randrange(F.q) for _ in range(3))
        assert F.add(a, b) == F.add(b, a)
        assert F.mul(a, b) == F.mul(b, a)
        assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
        assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
        assert F.sub(F.add(a, b), b) == a
        if a:
            assert F.mul(a, F.inv(a)) == 1
            assert F.pow(a, F.q - 1) == 1
        fa, fb = F.frobenius(a), F.frobenius(b)
        assert F.frobenius(F.add(a, b)) == F.add(fa, fb)
        assert F.frobenius(F.mul(a, b)) == F.mul(fa, fb)


def test_inverse_of_many_random_elements():
    F = build_field(23, 2)
    rng = random.Random(7)
    for _ in range(1000):
        a = rng.randrange(1, F.q)
        assert F.mul(a, F.inv(a)) == 1


def test_quadratic_character_f5():
    F = build_field(5, 1)
    assert F.quadratic_character(4) == 1
    assert F.quadratic_character(2) == -1
    assert F.quadratic_character(0) == 0


@pytest.mark.parametrize("p, r", [(5, 1), (7, 2), (23, 2), (3, 5)])
def test_enumeration_sum_and_wilson(p, r):
    F = build_field(p, r)
    elems = list(F.enumerate())
    assert len(elems) == len(set(elems)) == F.q
    total, prod = 0, 1
    for a in elems:
        total = F.add(total, a)
        if a:
            prod = F.mul(prod, a)
    assert total == 0
    assert prod == F.neg(1)


def test_f529_has_529_elements():
    assert len(list(build_field(23, 2).enumerate())) == 529


@pytest.mark.parametrize("p, r", CROSS_FIELDS)
def test_backends_agree(p, r):
    tab = FieldCtx(p, r, backend="table")
    poly = FieldCtx(p, r, backend="poly")
    a = tab.elements()
    rng = np.random.default_rng(p * 31 + r)
    for b in list(rng.integers(0, tab.q, size=4)) + [0, 1]:
        b = np.full_like(a, b)
        assert np.array_equal(tab.vmul(a, b), poly.vmul(a, b))
        assert np.array_equal(tab.vadd(a, b), poly.vadd(a, b))
    assert np.array_equal(tab.vinv(a), poly.vinv(a))
    assert np.array_equal(tab.vchi(a), poly.vchi(a))
    assert np.array_equal(tab.vpow(a, 5), poly.vpow(a, 5))
    assert np.array_equal(tab.vfrobenius(a), poly.vpow(a, p))
    for x in rng.integers(1, tab.q, size=50).tolist():
        assert tab.inv(x) == poly.inv(x)
        assert tab.quadratic_character(x) == poly.quadratic_character(x)
        s = poly.sqrt(x)
        assert (s is None) == (tab.sqrt(x) is None)
        if s is not None:
            assert poly.mul(s, s) == x


@pytest.mark.parametrize("p, r", SMALL_FIELDS)
def test_vector_ops_match_scalar(p, r):
    F = build_field(p, r)
    rng = random.Random(r)
    a = [rng.randrange(F.q) for _ in range(200)]
    b = [rng.randrange(F.q) for _ in range(200)]
    assert F.vmul(a, b).tolist() == [F.mul(x, y) for x, y in zip(a, b)]
    assert F.vadd(a, b).tolist() == [F.add(x, y) for x, y in zip(a, b)]
    assert F.vsub(a, b).tolist() == [F.sub(x, y) for x, y in zip(a, b)]
    assert F.vchi(a).tolist() == [F.quadratic_character(x) for x in a]
    assert F.vpow(a, 7).tolist() == [F.pow(x, 7) for x in a]


def test_character_multiplicative():
    rng = random.Random(3)
    for p, r in [(5, 2), (23, 2), (131, 3)]:
        F = build_field(p, r)
        for _ in range(300):
            a, b = rng.randrange(1, F.q), rng.randrange(1, F.q)
            assert F.quadratic_character(F.mul(a, b)) == F.quadratic_character(a) * F.quadratic_character(b)


@pytest.mark.parametrize("p, r", [(5, 1), (7, 2), (23, 2), (3, 7), (5, 5), (97, 2)])
def test_square_root_counts(p, r):
    F = build_field(p, r)
    assert F.q <= 10**4
    squares = Counter(F.vmul(F.elements(), F.elements()).tolist())
    chi = F.vchi(F.elements())
    for c in range(F.q):
        assert squares.get(c, 0) == 1 + chi[c]


@pytest.mark.parametrize("p, r, d", [(5, 4, 2), (7, 2, 1), (3, 6, 3), (3, 6, 2), (5, 2, 2)])
def test_subfield(p, r, d):
    F = build_field(p, r)
    S = F.subfield(d)
    elems = S.elements()
    brute = [a for a in range(F.q) if F.pow(a, p**d) == a]
    assert sorted(elems.tolist()) == brute
    chi = S.vchi(elems)
    for a, c in zip(elems.tolist(), chi.tolist()):
        expected = 0 if a == 0 else (1 if F.pow(a, (p**d - 1) // 2) == 1 else -1)
        assert c == expected == S.quadratic_character(a)


def test_frobenius_orbits_examples():
    orbs = list(frobenius_orbits(build_field(5, 1)))
    assert len(orbs) == 6 and all(d == 1 for _, d in orbs)
    orbs = list(frobenius_orbits(build_field(5, 2)))
    degs = Counter(d for _, d in orbs)
    assert degs == {1: 6, 2: 10}


@pytest.mark.parametrize("p, r", [(5, 2), (3, 4), (7, 3), (3, 6), (5, 4)])
def test_frobenius_orbits_partition(p, r):
    F = build_field(p, r)
    covered = []
    total = 0
    for rep, d in frobenius_orbits(F):
        assert r % d == 0
        total += d
        if rep is None:
            continue
        orbit = {rep}
        x = rep
        for _ in range(d - 1):
            x = F.frobenius(x)
            orbit.add(x)
        assert len(orbit) == d and F.pow(rep, p**d) == rep
        covered += orbit
    assert total == F.q + 1
    assert sorted(covered) == list(range(F.q))


def test_orbit_representatives_poly_backend():
    poly = FieldCtx(7, 3, backend="poly")
    tab = FieldCtx(7, 3, backend="table")
    a = [(x.tolist(), y.tolist()) for x, y in orbit_representatives(poly)]
    b = [(x.tolist(), y.tolist()) for x, y in orbit_representatives(tab)]
    assert a == b
