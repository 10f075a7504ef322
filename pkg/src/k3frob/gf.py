"""Explicit finite fields F_{p^r} for odd p.

Elements are integers in [0, q): the element sum(c_i x^i) of F_p[x]/(f)
is encoded as sum(c_i p^i). Two interchangeable backends implement the
arithmetic:

* ``"table"``: exponential / logarithm tables with respect to a fixed
  primitive element, used when q <= TABLE_LIMIT.
* ``"poly"``: polynomial multiplication followed by reduction modulo f,
  vectorised with numpy over coefficient arrays.

Every scalar operation has a vectorised twin prefixed with ``v`` that
works on int64 arrays of encoded elements.
"""
from __future__ import annotations

import random
from functools import cached_property
from math import isqrt
from typing import Iterator, Optional

import numpy as np

from . import numtheory as nt
from .errors import DegreeTooLarge, NotPrime

TABLE_LIMIT = 2**20
MAX_FIELD_SIZE = 2**31
CHUNK = 2**18


def _first_irreducible(p: int, r: int) -> tuple[int, ...]:
    """Smallest monic irreducible of degree r, scanning constant term first."""
    if r == 1:
        return (0, 1)
    for code in range(p**r):
        low = [(code // p**i) % p for i in range(r)]
        if low[0] == 0:
            continue
        f = low + [1]
        if nt.is_irreducible_mod(f, p):
            return tuple(f)
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


class FieldCtx:
    """The finite field F_{p^r} with a deterministic defining polynomial."""

    def __init__(self, p: int, r: int, backend: Optional[str] = None):
        if p < 3 or not nt.is_prime(p):
            raise NotPrime(f"{p} is not an odd prime")
        if r < 1:
            raise DegreeTooLarge("degree must be positive")
        q = p**r
        if q > MAX_FIELD_SIZE:
            raise DegreeTooLarge(f"F_{p}^{r} has {q} elements, above the budget {MAX_FIELD_SIZE}")
        self.p, self.r, self.q = p, r, q
        self.modulus = _first_irreducible(p, r)
        if backend is None:
            backend = "table" if q <= TABLE_LIMIT else "poly"
        if backend not in ("table", "poly"):
            raise ValueError(f"unknown backend {backend!r}")
        if backend == "table" and q > TABLE_LIMIT:
            raise DegreeTooLarge(f"q = {q} exceeds the table limit {TABLE_LIMIT}")
        self.backend = backend
        self.powers = np.array([p**i for i in range(r)], dtype=np.int64)
        # x^k mod f for k = r .. 2r-2, as digit rows
        red = []
        cur = [(-c) % p for c in self.modulus[:r]]  # x^r
        for _ in range(max(r - 1, 0)):
            red.append(cur)
            top = cur[-1]
            cur = [0] + cur[:-1]
            cur = [(c - top * m) % p for c, m in zip(cur, self.modulus[:r])]
        self._reduction = np.array(red, dtype=np.int64).reshape(-1, r)
        self._order_factors = None
        self._digit_table = None
        if backend == "table":
            self._build_tables()

    def __repr__(self):
        return f"FieldCtx(p={self.p}, r={self.r}, backend={self.backend!r})"

    # ------------------------------------------------------------------
    # encoding
    # ------------------------------------------------------------------
    def digits(self, a: int) -> list[int]:
        p = self.p
        return [(a // p**i) % p for i in range(self.r)]

    def from_digits(self, d) -> int:
        p = self.p
        return sum((int(c) % p) * p**i for i, c in enumerate(d))

    def from_int(self, n: int) -> int:
        return n % self.p

    def vdigits(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        return (a[..., None] // self.powers) % self.p

    def vindex(self, d) -> np.ndarray:
        return d @ self.powers

    @property
    def zero(self) -> int:
        return 0

    @property
    def one(self) -> int:
        return 1

    # ------------------------------------------------------------------
    # polynomial backend kernels
    # ------------------------------------------------------------------
    def _poly_mul_digits(self, A, B):
        p, r = self.p, self.r
        shape = np.broadcast_shapes(A.shape, B.shape)[:-1]
        prod = np.zeros(shape + (2 * r - 1,), dtype=np.int64)
        for i in range(r):
            ai = A[..., i : i + 1]
            prod[..., i : i + r] += ai * B
        prod %= p
        low = prod[..., :r]
        for k in range(r - 1):
            low += prod[..., r + k : r + k + 1] * self._reduction[k]
        return low % p

    def _scalar_poly_mul(self, a: int, b: int) -> int:
        p, r = self.p, self.r
        if r == 1:
            return a * b % p
        da, db = self.digits(a), self.digits(b)
        prod = [0] * (2 * r - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    prod[i + j] += x * y
        low = prod[:r]
        red = self._reduction
        for k in range(r - 1):
            c = prod[r + k] % p
            if c:
                row = red[k]
                for i in range(r):
                    low[i] += c * int(row[i])
        return self.from_digits(low)

    def _scalar_poly_pow(self, a: int, e: int) -> int:
        result, base = 1, a
        while e:
            if e & 1:
                result = self._scalar_poly_mul(result, base)
            base = self._scalar_poly_mul(base, base)
            e >>= 1
        return result

    def _vpoly_pow(self, a, e: int) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if self.r == 1:
            return _vpow_mod(a, e, self.p)
        base = self.vdigits(a)
        result = np.zeros_like(base)
        result[..., 0] = 1
        while e:
            if e & 1:
                result = self._poly_mul_digits(result, base)
            e >>= 1
            if e:
                base = self._poly_mul_digits(base, base)
        return self.vindex(result)

    # ------------------------------------------------------------------
    # tables
    # ------------------------------------------------------------------
    @property
    def order_factors(self) -> list[int]:
        if self._order_factors is None:
            self._order_factors = sorted(nt.factorize(self.q - 1))
        return self._order_factors

    def _is_primitive(self, g: int) -> bool:
        n = self.q - 1
        return all(self._scalar_poly_pow(g, n // ell) != 1 for ell in self.order_factors)

    @cached_property
    def generator(self) -> int:
        """Smallest encoded element generating the multiplicative group."""
        if self.q == 3:
            return 2
        start = 2 if self.r == 1 else self.p
        for g in range(start, self.q):
            if self._is_primitive(g):
                return g
        raise AssertionError("no primitive element")  # pragma: no cover

    def _build_tables(self):
        q, n = self.q, self.q - 1
        g = self.generator
        block = isqrt(n) + 1
        small = [1]
        for _ in range(block - 1):
            small.append(self._scalar_poly_mul(small[-1], g))
        small_arr = np.array(small, dtype=np.int64)
        big = self._scalar_poly_mul(small[-1], g)  # g^block
        exp = np.empty(block * block, dtype=np.int64)
        if self.r == 1:
            cur = 1
            for j in range(block):
                exp[j * block : (j + 1) * block] = small_arr * cur % self.p
                cur = cur * big % self.p
        else:
            small_d = self.vdigits(small_arr)
            cur = 1
            for j in range(block):
                row = self._poly_mul_digits(small_d, np.array(self.digits(cur), dtype=np.int64))
                exp[j * block : (j + 1) * block] = self.vindex(row)
                cur = self._scalar_poly_mul(cur, big)
        exp = exp[:n]
        log = np.full(q, -1, dtype=np.int64)
        log[exp] = np.arange(n, dtype=np.int64)
        if (log[1:] < 0).any():  # pragma: no cover - generator check guarantees this
            raise AssertionError("generator is not primitive")
        self.exp, self.log = exp, log
        self._digit_table = self.vdigits(np.arange(q, dtype=np.int64)).astype(np.int32) if self.r > 1 else None
        if self.r > 1:
            # Zech logarithms: g^zech[k] = 1 + g^k, or -1 where 1 + g^k = 0
            plus_one = self._digit_table[exp].astype(np.int64)
            plus_one[:, 0] = (plus_one[:, 0] + 1) % self.p
            self.zech = log[self.vindex(plus_one)]

    # ------------------------------------------------------------------
    # scalar arithmetic
    # ------------------------------------------------------------------
    def add(self, a: int, b: int) -> int:
        if self.r == 1:
            return (a + b) % self.p
        if self.backend == "table":
            if a == 0 or b == 0:
                return a or b
            n = self.q - 1
            la = int(self.log[a])
            z = int(self.zech[(int(self.log[b]) - la) % n])
            return 0 if z < 0 else int(self.exp[(la + z) % n])
        p = self.p
        return self.from_digits([(x + y) % p for x, y in zip(self.digits(a), self.digits(b))])

    def neg(self, a: int) -> int:
        if self.r == 1:
            return -a % self.p
        if self.backend == "table":
            n = self.q - 1
            return 0 if a == 0 else int(self.exp[(int(self.log[a]) + n // 2) % n])
        return self.from_digits([-x for x in self.digits(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.backend == "table":
            if a == 0 or b == 0:
                return 0
            return int(self.exp[(self.log[a] + self.log[b]) % (self.q - 1)])
        return self._scalar_poly_mul(a, b)

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow(self.inv(a), -e)
        if a == 0:
            return 1 if e == 0 else 0
        if self.backend == "table":
            return int(self.exp[(int(self.log[a]) * e) % (self.q - 1)])
        return self._scalar_poly_pow(a, e)

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in a finite field")
        if self.backend == "table":
            return int(self.exp[(-self.log[a]) % (self.q - 1)])
        if self.r == 1:
            return pow(a, -1, self.p)
        return self._poly_inv(a)

    def _poly_inv(self, a: int) -> int:
        # extended Euclid in F_p[x]
        p = self.p
        r0, r1 = list(self.modulus), nt.poly_trim_mod(self.digits(a), p)
        s0, s1 = [], [1]
        while len(r1) > 1:
            quo, rem = nt.poly_divmod_mod(r0, r1, p)
            prod = [0] * (len(quo) + len(s1) - 1) if quo and s1 else []
            for i, x in enumerate(quo):
                for j, y in enumerate(s1):
                    prod[i + j] += x * y
            r0, r1 = r1, rem
            s0, s1 = s1, nt.poly_sub_mod(s0, prod, p)
        c = pow(r1[0], -1, p)
        return self.from_digits([x * c for x in s1])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def frobenius(self, a: int) -> int:
        return self.pow(a, self.p)

    def quadratic_character(self, a: int) -> int:
        if a == 0:
            return 0
        if self.backend == "table":
            return 1 if self.log[a] % 2 == 0 else -1
        return 1 if self._scalar_poly_pow(a, (self.q - 1) // 2) == 1 else -1

    def sqrt(self, a: int) -> Optional[int]:
        """A square root of a, or None when a is not a square."""
        if a == 0:
            return 0
        if self.backend == "table":
            la = int(self.log[a])
            return None if la % 2 else int(self.exp[la // 2])
        return tonelli_shanks(self, a, self.q)

    @cached_property
    def nonsquare(self) -> int:
        for c in range(2, self.q):
            if self.quadratic_character(c) == -1:
                return c
        raise AssertionError  # pragma: no cover

    # ------------------------------------------------------------------
    # vectorised arithmetic
    # ------------------------------------------------------------------
    def vadd(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.r == 1:
            return (a + b) % self.p
        if self._digit_table is not None and self.backend == "table":
            d = self._digit_table
            return ((d[a] + d[b]) % self.p) @ self.powers
        return ((self.vdigits(a) + self.vdigits(b)) % self.p) @ self.powers

    def vneg(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if self.r == 1:
            return -a % self.p
        return (-self.vdigits(a) % self.p) @ self.powers

    def vsub(self, a, b) -> np.ndarray:
        return self.vadd(a, self.vneg(b))

    def vmul(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.r == 1:
            return a * b % self.p
        if self.backend == "table":
            la, lb = self.log[a], self.log[b]
            out = self.exp[(la + lb) % (self.q - 1)]
            return np.where((la < 0) | (lb < 0), 0, out)
        return self.vindex(self._poly_mul_digits(self.vdigits(a), self.vdigits(b)))

    def vpow(self, a, e: int) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if e < 0:
            return self.vpow(self.vinv(a), -e)
        if self.backend == "table":
            la = self.log[a]
            out = self.exp[(la * (e % (self.q - 1))) % (self.q - 1)]
            zero = 1 if e == 0 else 0
            return np.where(la < 0, zero, out)
        return self._vpoly_pow(a, e)

    def vinv(self, a) -> np.ndarray:
        """Inverse with the convention inv(0) = 0."""
        a = np.asarray(a, dtype=np.int64)
        if self.backend == "table":
            la = self.log[a]
            return np.where(la < 0, 0, self.exp[(-la) % (self.q - 1)])
        return self._vpoly_pow(a, self.q - 2)

    def vchi(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if self.backend == "table":
            la = self.log[a]
            return np.where(la < 0, 0, 1 - 2 * (la & 1))
        s = self._vpoly_pow(a, (self.q - 1) // 2)
        return np.where(a == 0, 0, np.where(s == 1, 1, -1))

    def vfrobenius(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if self.r == 1:
            return a
        return (self.vdigits(a) @ self.frobenius_matrix.T % self.p) @ self.powers

    @cached_property
    def frobenius_matrix(self) -> np.ndarray:
        """Matrix of x -> x^p on coefficient vectors (it is F_p-linear)."""
        cols = [self.digits(self._scalar_poly_pow(self.p if self.r > 1 else 1, i * self.p))
                for i in range(self.r)]
        return np.array(cols, dtype=np.int64).T

    # ------------------------------------------------------------------
    # enumeration and subfields
    # ------------------------------------------------------------------
    def elements(self) -> np.ndarray:
        return np.arange(self.q, dtype=np.int64)

    def enumerate(self) -> Iterator[int]:
        return iter(range(self.q))

    def subfield(self, d: int) -> "Subfield":
        return Subfield(self, d)

    def random_element(self, rng: random.Random) -> int:
        return rng.randrange(self.q)


def _vpow_mod(a, e, p):
    result = np.ones_like(a)
    base = a % p
    while e:
        if e & 1:
            result = result * base % p
        base = base * base % p
        e >>= 1
    return result


def tonelli_shanks(F, a: int, q: int) -> Optional[int]:
    """Square root in a field of odd order q using only F.mul / F.pow."""
    if a == 0:
        return 0
    if F.pow(a, (q - 1) // 2) != 1:
        return None
    s, t = 0, q - 1
    while t % 2 == 0:
        t //= 2
        s += 1
    z = F.pow(F.nonsquare, t)
    x = F.pow(a, (t + 1) // 2)
    b = F.pow(a, t)
    m = s
    while b != 1:
        i, bb = 0, b
        while bb != 1:
            bb = F.mul(bb, bb)
            i += 1
        c = z
        for _ in range(m - i - 1):
            c = F.mul(c, c)
        x = F.mul(x, c)
        z = F.mul(c, c)
        b = F.mul(b, z)
        m = i
    return x


def build_field(p: int, r: int, backend: Optional[str] = None) -> FieldCtx:
    return _cached_field(p, r, backend)


_FIELD_CACHE: dict = {}


def _cached_field(p, r, backend):
    key = (p, r, backend)
    if key not in _FIELD_CACHE:
        _FIELD_CACHE[key] = FieldCtx(p, r, backend)
    return _FIELD_CACHE[key]


class Subfield:
    """The subfield F_{p^d} of a field ctx = F_{p^r}, d | r.

    Elements keep the parent encoding, so points found here can be fed
    straight into the parent's arithmetic. The subfield is generated by
    g^((p^r - 1)/(p^d - 1)) for the parent's primitive element g.
    """

    def __init__(self, ctx: FieldCtx, d: int):
        if d < 1 or ctx.r % d:
            raise ValueError(f"{d} does not divide {ctx.r}")
        self.ctx = ctx
        self.p = ctx.p
        self.d = d
        self.q = ctx.p**d
        self.full = d == ctx.r

    def __repr__(self):
        return f"Subfield(F_{self.p}^{self.d} inside {self.ctx!r})"

    @cached_property
    def basis(self) -> list[int]:
        if self.d == 1:
            return [1]
        ctx = self.ctx
        h = ctx.pow(ctx.generator, (ctx.q - 1) // (self.q - 1))
        out = [1]
        for _ in range(self.d - 1):
            out.append(ctx.mul(out[-1], h))
        return out

    def elements(self) -> np.ndarray:
        if self.full:
            return self.ctx.elements()
        if self.d == 1:
            return np.arange(self.p, dtype=np.int64)
        ctx, p = self.ctx, self.p
        digits = np.zeros((1, ctx.r), dtype=np.int64)
        for b in self.basis:
            bd = np.array(ctx.digits(b), dtype=np.int64)
            mult = (np.arange(p, dtype=np.int64)[:, None] * bd) % p  # (p, r)
            digits = ((digits[:, None, :] + mult[None, :, :]) % p).reshape(-1, ctx.r)
        return ctx.vindex(digits)

    def contains(self, a: int) -> bool:
        return self.ctx.pow(a, self.q) == a

    def vchi(self, a) -> np.ndarray:
        if self.full:
            return self.ctx.vchi(a)
        ctx = self.ctx
        a = np.asarray(a, dtype=np.int64)
        if ctx.backend == "table":
            la = ctx.log[a]
            m = (ctx.q - 1) // (self.q - 1)
            return np.where(la < 0, 0, 1 - 2 * ((la // m) & 1))
        s = ctx.vpow(a, (self.q - 1) // 2)
        return np.where(a == 0, 0, np.where(s == 1, 1, -1))

    def quadratic_character(self, a: int) -> int:
        if a == 0:
            return 0
        if self.full:
            return self.ctx.quadratic_character(a)
        return 1 if self.ctx.pow(a, (self.q - 1) // 2) == 1 else -1

    def random_element(self, rng: random.Random) -> int:
        if self.full:
            return rng.randrange(self.q)
        acc = 0
        for b in self.basis:
            acc = self.ctx.add(acc, self.ctx.mul(b, rng.randrange(self.p)))
        return acc

    @cached_property
    def nonsquare(self) -> int:
        rng = random.Random(self.q)
        while True:
            c = self.random_element(rng)
            if self.quadratic_character(c) == -1:
                return c

    # arithmetic is the parent's
    def add(self, a, b):
        return self.ctx.add(a, b)

    def sub(self, a, b):
        return self.ctx.sub(a, b)

    def neg(self, a):
        return self.ctx.neg(a)

    def mul(self, a, b):
        return self.ctx.mul(a, b)

    def inv(self, a):
        return self.ctx.inv(a)

    def div(self, a, b):
        return self.ctx.div(a, b)

    def pow(self, a, e):
        return self.ctx.pow(a, e)

    def from_int(self, n):
        return self.ctx.from_int(n)

    def sqrt(self, a):
        if self.full:
            return self.ctx.sqrt(a)
        if self.quadratic_character(a) != 1:
            return 0 if a == 0 else None
        # the square roots of a subfield square lie in the subfield
        return self.ctx.sqrt(a)


def as_field(F) -> Subfield:
    """Normalise a FieldCtx or Subfield to a Subfield view."""
    return F if isinstance(F, Subfield) else F.subfield(F.r)


def orbit_representatives(ctx: FieldCtx, chunk: int = CHUNK):
    """Yield (reps, degrees) arrays covering the Frobenius orbits of F_q.

    A representative is the smallest encoded element of its orbit; its
    degree is the orbit length, which divides r. The point at infinity is
    not included.
    """
    r = ctx.r
    for start in range(0, ctx.q, chunk):
        a = np.arange(start, min(start + chunk, ctx.q), dtype=np.int64)
        if r == 1:
            yield a, np.ones_like(a)
            continue
        cur = a
        is_min = np.ones(a.shape, dtype=bool)
        degree = np.zeros(a.shape, dtype=np.int64)
        for i in range(1, r + 1):
            cur = ctx.vfrobenius(cur)
            back = (cur == a) & (degree == 0)
            degree[back] = i
            # only images before returning home belong to the orbit
            active = degree == 0
            is_min &= ~(active & (cur < a))
        yield a[is_min], degree[is_min]


def frobenius_orbits(ctx: FieldCtx) -> Iterator[tuple[Optional[int], int]]:
    """Frobenius orbits of P^1(F_q) as (representative, degree).

    The point at infinity comes first, represented by None.
    """
    yield None, 1
    for reps, degs in orbit_representatives(ctx):
        yield from zip(reps.tolist(), degs.tolist())
