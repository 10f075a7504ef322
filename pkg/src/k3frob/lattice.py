"""Integral lattices given by Gram matrices.

Sign conventions: U is the hyperbolic plane (det -1), E8 is negative
definite (det +1), and the K3 lattice U^3 + E8^2 has det -1 and
signature (3, 19).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import UnknownLattice

_E8_EDGES = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (2, 7)]


def _e8_gram():
    g = [[0] * 8 for _ in range(8)]
    for i in range(8):
        g[i][i] = -2
    for i, j in _E8_EDGES:
        g[i][j] = g[j][i] = 1
    return g


@dataclass(frozen=True)
class GramLattice:
    gram: tuple[tuple[int, ...], ...]
    name: str = ""

    def __post_init__(self):
        gram = tuple(tuple(int(x) for x in row) for row in self.gram)
        object.__setattr__(self, "gram", gram)
        n = len(gram)
        if any(len(row) != n for row in gram):
            raise ValueError("Gram matrix must be square")
        if any(gram[i][j] != gram[j][i] for i in range(n) for j in range(i)):
            raise ValueError("Gram matrix must be symmetric")

    @property
    def rank(self) -> int:
        return len(self.gram)

    @property
    def is_even(self) -> bool:
        return all(self.gram[i][i] % 2 == 0 for i in range(self.rank))

    def to_json(self) -> list[list[int]]:
        return [list(row) for row in self.gram]


def direct_sum(*lattices: GramLattice, name: str = "") -> GramLattice:
    n = sum(L.rank for L in lattices)
    g = [[0] * n for _ in range(n)]
    off = 0
    for L in lattices:
        for i, row in enumerate(L.gram):
            for j, x in enumerate(row):
                g[off + i][off + j] = x
        off += L.rank
    return GramLattice(g, name or " + ".join(L.name for L in lattices))


def builtin(name: str) -> GramLattice:
    key = name.upper()
    if key == "U":
        return GramLattice(((0, 1), (1, 0)), "U")
    if key == "E8":
        return GramLattice(_e8_gram(), "E8")
    if key == "K3":
        u, e8 = builtin("U"), builtin("E8")
        return direct_sum(u, u, u, e8, e8, name="K3")
    raise UnknownLattice(name)


def determinant(matrix) -> int:
    """Bareiss fraction-free elimination; exact for integer matrices."""
    a = [list(map(int, row)) for row in matrix]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def discriminant(lat: GramLattice) -> int:
    return determinant(lat.gram)


def signature(lat: GramLattice) -> tuple[int, int]:
    """(positive, negative) index via congruent diagonalization over Q."""
    a = [[Fraction(x) for x in row] for row in lat.gram]
    n = len(a)
    pos = neg = 0
    for k in range(n):
        if a[k][k] == 0:
            # bring a nonzero pivot to (k, k) by a congruence transformation
            j = next((j for j in range(k + 1, n) if a[j][j] != 0), None)
            if j is not None:
                a[k], a[j] = a[j], a[k]
                for row in a:
                    row[k], row[j] = row[j], row[k]
            else:
                j = next((j for j in range(k + 1, n) if a[k][j] != 0), None)
                if j is None:
                    continue  # null row: radical direction
                # e_k <- e_k + e_j gives a[k][k] = 2 a[k][j] != 0
                for c in range(n):
                    a[k][c] += a[j][c]
                for r in range(n):
                    a[r][k] += a[r][j]
        piv = a[k][k]
        if piv > 0:
            pos += 1
        else:
            neg += 1
        for i in range(k + 1, n):
            f = a[i][k] / piv
            if f:
                for c in range(k, n):
                    a[i][c] -= f * a[k][c]
        for i in range(k + 1, n):
            a[k][i] = Fraction(0)
    return pos, neg


def supersingular_ns_discriminant_check(p: int, sigma: int, observed_det: int) -> bool:
    """The Neron-Severi lattice of a supersingular K3 with Artin
    invariant sigma has discriminant -p^(2 sigma)."""
    return observed_det == -(p ** (2 * sigma))
