"""Elementary and cyclotomic number theory.

Everything here is exact integer arithmetic on Python ints. Polynomials
are stored as coefficient tuples in ascending degree.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd
from typing import Iterable, Optional

from .errors import InvalidQuery, NotCoprime

TRIAL_DIVISION_LIMIT = 10**6


# --------------------------------------------------------------------------
# integers
# --------------------------------------------------------------------------

def factorize(n: int) -> dict[int, int]:
    """Prime factorization: trial division up to TRIAL_DIVISION_LIMIT,
    Pollard-Brent rho on whatever composite cofactor remains."""
    if n < 1:
        raise InvalidQuery(f"cannot factor {n}")
    out: dict[int, int] = {}
    for d in (2, 3):
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
    d = 5
    step = 2
    while d * d <= n and d <= TRIAL_DIVISION_LIMIT:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += step
        step = 6 - step
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if is_prime(m):
            out[m] = out.get(m, 0) + 1
        else:
            f = _pollard_brent(m)
            stack += [f, m // f]
    return dict(sorted(out.items()))


def _pollard_brent(n: int) -> int:
    """A nontrivial factor of a composite n without small prime factors."""
    for c in range(1, 200):
        y, r, q, g = 2, 1, 1, 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(128, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = gcd(q, n)
                k += 128
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = gcd(abs(x - ys), n)
        if g != n:
            return g
    raise InvalidQuery(f"could not factor {n}")  # pragma: no cover


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for n < 3.3e24."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
    for s in small:
        if n % s == 0:
            return n == s
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def divisors(n: int) -> list[int]:
    divs = [1]
    for prime, mult in factorize(n).items():
        divs = [d * prime**k for d in divs for k in range(mult + 1)]
    return sorted(divs)


def euler_phi(n: int) -> int:
    if n < 1:
        raise InvalidQuery("euler_phi requires n >= 1")
    result = n
    for prime in factorize(n):
        result = result // prime * (prime - 1)
    return result


def _require_coprime(p: int, n: int) -> None:
    if gcd(p, n) != 1:
        raise NotCoprime(f"gcd({p}, {n}) = {gcd(p, n)} != 1")


def mult_order(p: int, n: int) -> int:
    """Order of p in (Z/nZ)*.

    Starts from phi(n) and strips prime factors while the power stays 1.
    """
    if n < 1:
        raise InvalidQuery("modulus must be positive")
    _require_coprime(p, n)
    if n == 1:
        return 1
    order = euler_phi(n)
    for prime in factorize(order):
        while order % prime == 0 and pow(p, order // prime, n) == 1:
            order //= prime
    return order


def minus_one_exponent(p: int, n: int) -> Optional[int]:
    """Smallest m >= 1 with p**m == -1 (mod n), or None."""
    if n < 3:
        raise InvalidQuery("minus_one_exponent requires n >= 3")
    order = mult_order(p, n)
    if order % 2:
        return None
    half = order // 2
    # p^half is the unique element of order 2 in <p>; -1 lies in <p> iff it equals -1
    return half if pow(p, half, n) == n - 1 else None


def valuation(b: int, p: int) -> float | int:
    """p-adic valuation of an integer; ``math.inf`` for zero."""
    if b == 0:
        return float("inf")
    b = abs(b)
    e = 0
    while b % p == 0:
        b //= p
        e += 1
    return e


# --------------------------------------------------------------------------
# integer polynomials
# --------------------------------------------------------------------------

def _trim(coeffs: Iterable[int]) -> tuple[int, ...]:
    c = list(coeffs)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class IntPolynomial:
    """Polynomial with integer coefficients, ``coeffs[i]`` multiplies T**i."""

    coeffs: tuple[int, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(int(c) for c in self.coeffs))

    @classmethod
    def monomial(cls, degree: int, coeff: int = 1) -> "IntPolynomial":
        return cls((0,) * degree + (coeff,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def leading(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def __add__(self, other: "IntPolynomial") -> "IntPolynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return IntPolynomial(x + y for x, y in zip(a, b))

    def __neg__(self) -> "IntPolynomial":
        return IntPolynomial(-c for c in self.coeffs)

    def __sub__(self, other: "IntPolynomial") -> "IntPolynomial":
        return self + (-other)

    def __mul__(self, other: "IntPolynomial") -> "IntPolynomial":
        if self.is_zero or other.is_zero:
            return IntPolynomial()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPolynomial(out)

    def __pow__(self, k: int) -> "IntPolynomial":
        result = IntPolynomial((1,))
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __divmod__(self, divisor: "IntPolynomial"):
        """Division by a polynomial with leading coefficient +-1."""
        if divisor.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        lead = divisor.leading()
        if lead not in (1, -1):
            raise InvalidQuery("exact integer division needs a leading coefficient of +-1")
        rem = list(self.coeffs)
        dq = divisor.degree
        quot = [0] * max(len(rem) - dq, 0)
        for k in range(len(rem) - 1, dq - 1, -1):
            c = rem[k] * lead
            if c:
                quot[k - dq] = c
                for j, d in enumerate(divisor.coeffs):
                    rem[k - dq + j] -= c * d
        return IntPolynomial(quot), IntPolynomial(rem)

    def __floordiv__(self, divisor):
        return divmod(self, divisor)[0]

    def __mod__(self, divisor):
        return divmod(self, divisor)[1]

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if not c:
                continue
            mono = "" if i == 0 else ("T" if i == 1 else f"T^{i}")
            mag = abs(c)
            body = (str(mag) if mag != 1 or not mono else "") + mono
            sign = "-" if c < 0 else "+"
            terms.append((sign, body))
        first_sign, first = terms[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out


@lru_cache(maxsize=None)
def cyclotomic(n: int) -> IntPolynomial:
    """The n-th cyclotomic polynomial, by exact division of T^n - 1."""
    if n < 1:
        raise InvalidQuery("cyclotomic requires n >= 1")
    poly = IntPolynomial.monomial(n) - IntPolynomial((1,))
    for d in divisors(n):
        if d < n:
            poly, rem = divmod(poly, cyclotomic(d))
            assert rem.is_zero
    return poly


@dataclass(frozen=True)
class ResidueOrbit:
    modulus: int
    exponents: frozenset
    closure: tuple[str, ...] = ()

    def __len__(self):
        return len(self.exponents)

    def __contains__(self, a):
        return a % self.modulus in self.exponents

    def sorted(self) -> list[int]:
        return sorted(self.exponents)


def eigenvalue_orbit(n: int, p: int, depth: int) -> ResidueOrbit:
    """Residues {+-p^(-i) mod n : 0 <= i < depth}.

    These are the exponents a for which xi^a must appear as an eigenvalue
    when the formal Brauer group has height ``depth`` and the automorphism
    acts on the 2-form through a primitive n-th root of unity xi.
    """
    if depth < 1:
        raise InvalidQuery("depth must be positive")
    _require_coprime(p, n)
    p_inv = pow(p, -1, n) if n > 1 else 0
    exps = set()
    cur = 1 % n
    for _ in range(depth):
        exps.add(cur)
        exps.add(-cur % n)
        cur = cur * p_inv % n
    closure = ["negation"]
    if all(a * p % n in exps for a in exps):
        closure.append("multiplication by p")
    return ResidueOrbit(n, frozenset(exps), tuple(closure))


# --------------------------------------------------------------------------
# polynomials over F_p (coefficient lists, ascending degree)
# --------------------------------------------------------------------------

def poly_trim_mod(a, p):
    a = [c % p for c in a]
    while a and a[-1] == 0:
        a.pop()
    return a


def poly_divmod_mod(a, b, p):
    a = poly_trim_mod(a, p)
    b = poly_trim_mod(b, p)
    if not b:
        raise ZeroDivisionError("division by zero polynomial")
    inv_lead = pow(b[-1], -1, p)
    q = [0] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b):
        c = a[-1] * inv_lead % p
        shift = len(a) - len(b)
        q[shift] = c
        for j, bj in enumerate(b):
            a[shift + j] = (a[shift + j] - c * bj) % p
        while a and a[-1] == 0:
            a.pop()
    return q, a


def poly_mulmod(a, b, m, p):
    prod = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] += x * y
    return poly_divmod_mod(prod, m, p)[1]


def poly_powmod(a, e, m, p):
    result = [1]
    base = poly_divmod_mod(a, m, p)[1]
    while e:
        if e & 1:
            result = poly_mulmod(result, base, m, p)
        base = poly_mulmod(base, base, m, p)
        e >>= 1
    return poly_divmod_mod(result, m, p)[1]


def poly_gcd_mod(a, b, p):
    a = poly_trim_mod(a, p)
    b = poly_trim_mod(b, p)
    while b:
        a, b = b, poly_divmod_mod(a, b, p)[1]
    if a:
        inv = pow(a[-1], -1, p)
        a = [c * inv % p for c in a]
    return a


def poly_sub_mod(a, b, p):
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return poly_trim_mod([x - y for x, y in zip(a, b)], p)


def is_irreducible_mod(f, p) -> bool:
    """Rabin's irreducibility test for a monic f over F_p."""
    f = poly_trim_mod(f, p)
    r = len(f) - 1
    if r < 1:
        return False
    if r == 1:
        return True
    x = [0, 1]
    if poly_sub_mod(poly_powmod(x, p**r, f, p), x, p):
        return False
    for ell in factorize(r):
        h = poly_sub_mod(poly_powmod(x, p ** (r // ell), f, p), x, p)
        if len(poly_gcd_mod(f, h, p)) > 1:
            return False
    return True


def cyclotomic_factor_degree_mod_p(n: int, p: int) -> int:
    """Common degree of the irreducible factors of Phi_n over F_p.

    Frobenius permutes the primitive n-th roots of unity by zeta -> zeta^p,
    so every orbit, hence every factor, has size ord_n(p).
    """
    _require_coprime(p, n)
    return mult_order(p, n)
