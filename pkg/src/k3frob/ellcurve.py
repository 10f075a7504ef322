"""Point counts of short Weierstrass cubics y^2 = x^3 + a4 x + a6 over F_q.

Counts are of the projective cubic, singular point included, so a
singular fiber has q (split node), q + 2 (non-split node) or q + 1
(cusp) points.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum
from math import gcd, isqrt
from typing import Optional

import numpy as np

from . import numtheory as nt
from .errors import BudgetExceeded, Inconclusive, InvalidQuery, InvalidTrace
from .gf import as_field

BRUTE_BUDGET = 10**6
HASSE_MIN_Q = 457
HASSE_TRIES = 64


class FiberClass(str, Enum):
    GOOD = "Good"
    SPLIT = "MultiplicativeSplit"
    NONSPLIT = "MultiplicativeNonsplit"
    ADDITIVE = "Additive"


SINGULAR_TRACE = {FiberClass.SPLIT: 1, FiberClass.NONSPLIT: -1, FiberClass.ADDITIVE: 0}


@dataclass(frozen=True)
class FiberData:
    a4: int
    a6: int
    fiber_class: FiberClass
    trace_symbol: Optional[int] = None

    @property
    def is_good(self) -> bool:
        return self.fiber_class is FiberClass.GOOD


def discriminant_core(F, a4: int, a6: int) -> int:
    """4 a4^3 + 27 a6^2; the discriminant is -16 times this."""
    F = as_field(F)
    c4 = F.mul(F.from_int(4), F.mul(a4, F.mul(a4, a4)))
    c6 = F.mul(F.from_int(27), F.mul(a6, a6))
    return F.add(c4, c6)


def classify_fiber(F, a4: int, a6: int) -> FiberData:
    F = as_field(F)
    if F.p < 5:
        raise InvalidQuery("short Weierstrass models need p >= 5")
    if discriminant_core(F, a4, a6) != 0:
        return FiberData(a4, a6, FiberClass.GOOD)
    if a4 == 0:
        return FiberData(a4, a6, FiberClass.ADDITIVE, 0)
    # x^3 + a4 x + a6 = (x - x0)^2 (x + 2 x0) with x0 = -3 a6 / (2 a4);
    # near the node y^2 ~ 3 x0 (x - x0)^2, so the tangents are rational iff 3 x0 is a square
    x0 = F.neg(F.div(F.mul(F.from_int(3), a6), F.mul(F.from_int(2), a4)))
    chi = F.quadratic_character(F.mul(F.from_int(3), x0))
    cls = FiberClass.SPLIT if chi == 1 else FiberClass.NONSPLIT
    return FiberData(a4, a6, cls, SINGULAR_TRACE[cls])


class BruteCounter:
    """Exhaustive counter over a fixed field, caching x and x^3."""

    def __init__(self, F, budget: int = BRUTE_BUDGET):
        self.F = as_field(F)
        if self.F.q > budget:
            raise BudgetExceeded(f"brute force over a field of size {self.F.q} exceeds {budget}")
        ctx = self.F.ctx
        self.xs = self.F.elements()
        self.x3 = ctx.vmul(ctx.vmul(self.xs, self.xs), self.xs)

    def char_sum(self, a4: int, a6: int) -> int:
        ctx = self.F.ctx
        v = self.x3 if a4 == 0 else ctx.vadd(self.x3, ctx.vmul(self.xs, a4))
        if a6:
            v = ctx.vadd(v, a6)
        return int(self.F.vchi(v).sum())

    def count(self, a4: int, a6: int) -> int:
        return self.F.q + 1 + self.char_sum(a4, a6)


def count_points_brute(F, a4: int, a6: int, budget: int = BRUTE_BUDGET) -> int:
    return BruteCounter(F, budget).count(a4, a6)


# ---------------------------------------------------------------------------
# group law and Hasse-interval order finding
# ---------------------------------------------------------------------------

class _Curve:
    __slots__ = ("F", "a4", "a6")

    def __init__(self, F, a4, a6):
        self.F, self.a4, self.a6 = F, a4, a6

    def rhs(self, x):
        F = self.F
        return F.add(F.mul(F.add(F.mul(x, x), self.a4), x), self.a6)

    def neg(self, P):
        return None if P is None else (P[0], self.F.neg(P[1]))

    def add(self, P, Q):
        if P is None:
            return Q
        if Q is None:
            return P
        F = self.F
        x1, y1 = P
        x2, y2 = Q
        if x1 == x2:
            if F.add(y1, y2) == 0:
                return None
            num = F.add(F.mul(F.from_int(3), F.mul(x1, x1)), self.a4)
            lam = F.div(num, F.add(y1, y1))
        else:
            lam = F.div(F.sub(y2, y1), F.sub(x2, x1))
        x3 = F.sub(F.sub(F.mul(lam, lam), x1), x2)
        y3 = F.sub(F.mul(lam, F.sub(x1, x3)), y1)
        return (x3, y3)

    def mul(self, k: int, P):
        if k < 0:
            return self.mul(-k, self.neg(P))
        acc = None
        while k:
            if k & 1:
                acc = self.add(acc, P)
            P = self.add(P, P)
            k >>= 1
        return acc

    def random_point(self, rng):
        F = self.F
        while True:
            x = F.random_element(rng)
            v = self.rhs(x)
            if v == 0:
                return (x, 0)
            if F.quadratic_character(v) == 1:
                return (x, F.sqrt(v))


def hasse_interval(q: int) -> tuple[int, int]:
    w = isqrt(4 * q)  # floor(2 sqrt q)
    return q + 1 - w, q + 1 + w


def _point_order_multiple(E: _Curve, P, lo: int, hi: int) -> int:
    """Some m > 0 with m P = O, searched by baby-step giant-step in [lo, hi]."""
    s = isqrt(max(hi - lo, 1) // 2) + 1
    baby = {}
    R = None
    for j in range(1, s + 1):
        R = E.add(R, P)
        if R is None:
            return j
        baby.setdefault(R[0], (j, R[1]))
    step = E.mul(2 * s + 1, P)
    c = lo + s
    R = E.mul(c, P)
    while c - s <= hi:
        if R is None:
            return c
        hit = baby.get(R[0])
        if hit is not None:
            j, y = hit
            return c - j if y == R[1] else c + j
        R = E.add(R, step)
        c += 2 * s + 1
    raise Inconclusive("no multiple of the point order in the Hasse interval")


def _point_order(E: _Curve, P, lo: int, hi: int) -> int:
    m = _point_order_multiple(E, P, lo, hi)
    for ell in nt.factorize(m):
        while m % ell == 0 and E.mul(m // ell, P) is None:
            m //= ell
    return m


def count_points_hasse(F, a4: int, a6: int, seed=None, tries: int = HASSE_TRIES) -> int:
    """Group order of a good cubic from point orders on it and its twist.

    Accumulates the exponent bound L | #E and L' | #E' = 2q + 2 - #E until a
    single value in the Hasse interval is compatible with both.
    """
    F = as_field(F)
    q = F.q
    if q <= HASSE_MIN_Q:
        raise InvalidQuery(f"Hasse-interval counting requires q > {HASSE_MIN_Q}")
    if discriminant_core(F, a4, a6) == 0:
        raise InvalidQuery("Hasse-interval counting requires a good fiber")
    lo, hi = hasse_interval(q)
    if seed is None:
        seed = f"{F.p}:{F.d}:{getattr(F.ctx, 'modulus', '')}:{a4}:{a6}"
    rng = random.Random(str(seed))
    E = _Curve(F, a4, a6)
    D = F.nonsquare
    D2 = F.mul(D, D)
    T = _Curve(F, F.mul(a4, D2), F.mul(a6, F.mul(D2, D)))
    L_e = L_t = 1
    for attempt in range(tries):
        curve = E if attempt % 2 == 0 else T
        order = _point_order(curve, curve.random_point(rng), lo, hi)
        if curve is E:
            L_e = L_e * order // gcd(L_e, order)
        else:
            L_t = L_t * order // gcd(L_t, order)
        first = -(-lo // L_e) * L_e
        cands = [n for n in range(first, hi + 1, L_e) if (2 * q + 2 - n) % L_t == 0]
        if len(cands) == 1:
            return cands[0]
    raise Inconclusive(f"order not pinned down after {tries} points")


def count_points(F, a4: int, a6: int, brute_limit: int = BRUTE_BUDGET, counter: BruteCounter = None) -> int:
    """Projective count, brute force when q <= brute_limit and Hasse otherwise."""
    F = as_field(F)
    fib = classify_fiber(F, a4, a6)
    if not fib.is_good:
        return F.q + 1 - fib.trace_symbol
    if F.q <= brute_limit:
        return (counter or BruteCounter(F)).count(a4, a6)
    return count_points_hasse(F, a4, a6)


# ---------------------------------------------------------------------------
# lifting to extensions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TraceSequence:
    q: int
    a: int
    values: tuple[int, ...]


def trace_sequence(q: int, a: int, k_max: int) -> TraceSequence:
    """t_k = alpha^k + beta^k where alpha + beta = a and alpha beta = q."""
    vals = []
    prev, cur = 2, a
    for _ in range(k_max):
        vals.append(cur)
        prev, cur = cur, a * cur - q * prev
    return TraceSequence(q, a, tuple(vals))


def lift_count(q: int, a: int, k: int, fiber_class: FiberClass = FiberClass.GOOD) -> int:
    """Number of points over F_{q^k} from the trace a over F_q."""
    if k < 1:
        raise InvalidTrace("extension degree must be positive")
    fiber_class = FiberClass(fiber_class)
    if fiber_class is FiberClass.GOOD:
        if a * a > 4 * q:
            raise InvalidTrace(f"trace {a} violates the Hasse bound for q = {q}")
        return q**k + 1 - trace_sequence(q, a, k).values[-1]
    if a != SINGULAR_TRACE[fiber_class]:
        raise InvalidTrace(f"trace {a} does not match fiber class {fiber_class.value}")
    return q**k + 1 - a**k if a else q**k + 1


def isomorphism_key(F, a4: int, a6: int):
    """Key that agrees for F_q-isomorphic good cubics.

    (a4, a6) ~ (u^4 a4, u^6 a6). For j = 0 the class of a6 in F*/F*^6
    decides, for j = 1728 the class of a4 in F*/F*^4, otherwise the ratio
    a4^3 / a6^2 together with the quadratic character of a4 a6.
    """
    F = as_field(F)
    q = F.q
    if a4 == 0:
        return ("j0", F.pow(a6, (q - 1) // gcd(6, q - 1)))
    if a6 == 0:
        return ("j1728", F.pow(a4, (q - 1) // gcd(4, q - 1)))
    ratio = F.div(F.mul(a4, F.mul(a4, a4)), F.mul(a6, a6))
    return ("j", ratio, F.quadratic_character(F.mul(a4, a6)))


def visomorphism_keys(F, a4, a6) -> np.ndarray:
    """Vectorised isomorphism_key for good cubics, as rows (tag, k1, k2)."""
    F = as_field(F)
    ctx, q = F.ctx, F.q
    a4 = np.asarray(a4, dtype=np.int64)
    a6 = np.asarray(a6, dtype=np.int64)
    keys = np.zeros((a4.size, 3), dtype=np.int64)
    j0 = a4 == 0
    j1728 = (a6 == 0) & ~j0
    gen = ~(j0 | j1728)
    if j0.any():
        keys[j0, 0] = 0
        keys[j0, 1] = ctx.vpow(a6[j0], (q - 1) // gcd(6, q - 1))
    if j1728.any():
        keys[j1728, 0] = 1
        keys[j1728, 1] = ctx.vpow(a4[j1728], (q - 1) // gcd(4, q - 1))
    if gen.any():
        b4, b6 = a4[gen], a6[gen]
        cube = ctx.vmul(ctx.vmul(b4, b4), b4)
        keys[gen, 0] = 2
        keys[gen, 1] = ctx.vmul(cube, ctx.vinv(ctx.vmul(b6, b6)))
        keys[gen, 2] = F.vchi(ctx.vmul(b4, b6))
    return keys


def vdiscriminant_core(F, a4, a6) -> np.ndarray:
    ctx = as_field(F).ctx
    c4 = ctx.vmul(ctx.vmul(ctx.vmul(a4, a4), a4), ctx.from_int(4))
    c6 = ctx.vmul(ctx.vmul(a6, a6), ctx.from_int(27))
    return ctx.vadd(c4, c6)
