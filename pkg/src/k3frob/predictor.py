"""Frobenius invariants of a K3 surface from the congruence class of p mod N.

Given a K3 surface in odd characteristic p with an automorphism acting on
the global 2-form by a primitive N-th root of unity (N > 2), and Picard
rank at least 22 - phi(N):

* if p^m = -1 (mod N) for some m, the surface is supersingular;
* otherwise its height equals the order of p in (Z/NZ)*.

When phi(N) > 10 the rank hypothesis holds automatically and a primitive
N-th root of unity occurs once among the eigenvalues on the transcendental
part, which also pins the Artin invariant of the supersingular case to the
least such m.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from math import gcd
from typing import Optional, Union

from . import numtheory as nt
from .errors import InapplicableHeight, InvalidQuery, NotCoprime, NotDivisible

MAX_HEIGHT = 10
H2_RANK = 22


class Kind(str, Enum):
    FINITE_HEIGHT = "FiniteHeight"
    SUPERSINGULAR = "Supersingular"


@dataclass(frozen=True)
class PredictionQuery:
    non_symplectic_order: int
    characteristic: int
    picard_lower_bound: Optional[int] = None

    def __post_init__(self):
        n, p = self.non_symplectic_order, self.characteristic
        if n < 3:
            raise InvalidQuery(f"non-symplectic order must exceed 2, got {n}")
        if p < 3 or not nt.is_prime(p):
            raise InvalidQuery(f"characteristic must be an odd prime, got {p}")
        if gcd(p, n) != 1:
            raise NotCoprime(f"p = {p} divides N = {n}")
        rho = self.picard_lower_bound
        if rho is not None and not 0 <= rho <= H2_RANK:
            raise InvalidQuery(f"Picard bound {rho} outside [0, 22]")


@dataclass(frozen=True)
class FrobeniusInvariant:
    kind: Kind
    height: Optional[int] = None
    artin_invariant: Optional[int] = None
    certified_artin: bool = False
    conditional: bool = False

    def __post_init__(self):
        if self.kind is Kind.FINITE_HEIGHT:
            if self.height is None or not 1 <= self.height <= MAX_HEIGHT:
                raise ValueError(f"height {self.height} outside [1, 10]")
        elif self.artin_invariant is not None and not 1 <= self.artin_invariant <= MAX_HEIGHT:
            raise ValueError(f"Artin invariant {self.artin_invariant} outside [1, 10]")

    @property
    def is_supersingular(self) -> bool:
        return self.kind is Kind.SUPERSINGULAR

    def describe(self) -> str:
        if self.kind is Kind.FINITE_HEIGHT:
            text = "ordinary (height 1)" if self.height == 1 else f"height {self.height}"
        elif self.artin_invariant is None:
            text = "supersingular"
        else:
            tag = "certified" if self.certified_artin else "uncertified"
            text = f"supersingular of Artin invariant {self.artin_invariant} ({tag})"
        if self.conditional:
            text += " [conditional on Picard rank >= 22 - phi(N)]"
        return text

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "height": self.height,
            "artin_invariant": self.artin_invariant,
            "certified_artin": self.certified_artin,
            "conditional": self.conditional,
        }


def _invariant_for_residue(n: int, a: int, conditional: bool) -> FrobeniusInvariant:
    phi = nt.euler_phi(n)
    m = nt.minus_one_exponent(a, n)
    if m is not None:
        artin = m if m <= MAX_HEIGHT else None
        certified = artin is not None and phi > MAX_HEIGHT and nt.mult_order(a, n) == 2 * m
        return FrobeniusInvariant(Kind.SUPERSINGULAR, artin_invariant=artin,
                                  certified_artin=certified, conditional=conditional)
    h = nt.mult_order(a, n)
    if h > MAX_HEIGHT:
        raise InapplicableHeight(n, a, h)
    return FrobeniusInvariant(Kind.FINITE_HEIGHT, height=h, conditional=conditional)


def _is_conditional(n: int, picard_lower_bound: Optional[int]) -> bool:
    phi = nt.euler_phi(n)
    if phi > MAX_HEIGHT:
        return False
    return picard_lower_bound is None or picard_lower_bound < H2_RANK - phi


def predict(q: PredictionQuery) -> FrobeniusInvariant:
    n, p = q.non_symplectic_order, q.characteristic
    return _invariant_for_residue(n, p % n, _is_conditional(n, q.picard_lower_bound))


TableEntry = Union[FrobeniusInvariant, InapplicableHeight]


def congruence_table(n: int) -> dict[int, TableEntry]:
    """Invariant for every residue class a in (Z/nZ)*.

    Classes whose order exceeds 10 without reaching -1 map to the
    InapplicableHeight instance instead of raising.
    """
    if n < 3:
        raise InvalidQuery(f"N must exceed 2, got {n}")
    conditional = _is_conditional(n, None)
    table: dict[int, TableEntry] = {}
    for a in range(1, n):
        if gcd(a, n) != 1:
            continue
        try:
            table[a] = _invariant_for_residue(n, a, conditional)
        except InapplicableHeight as exc:
            table[a] = exc
    return table


def group_table(table: dict[int, TableEntry]) -> list[tuple[object, list[int]]]:
    """Group residues by invariant, in order of first appearance."""
    groups: dict[object, list[int]] = {}
    for a, inv in table.items():
        key = inv if isinstance(inv, FrobeniusInvariant) else ("inapplicable", inv.height)
        groups.setdefault(key, []).append(a)
    return list(groups.items())


def describe_entry(entry) -> str:
    if isinstance(entry, FrobeniusInvariant):
        return entry.describe()
    if isinstance(entry, tuple):
        return f"inapplicable (order {entry[1]} > 10)"
    return f"inapplicable (order {entry.height} > 10)"


@dataclass(frozen=True)
class RankConstraint:
    order: int
    phi: int
    transcendental_rank_candidates: tuple[int, ...]
    min_picard: int


def rank_constraint(n: int) -> RankConstraint:
    if n < 2:
        raise InvalidQuery("N must be at least 2")
    phi = nt.euler_phi(n)
    cands = tuple(range(phi, H2_RANK, phi))
    return RankConstraint(n, phi, cands, H2_RANK - phi)


def admissible_orders(p: int, sigma: int) -> set[int]:
    """Divisors of p^sigma + 1, the possible orders of the 2-form action
    on a supersingular K3 of Artin invariant sigma."""
    if p < 3 or not nt.is_prime(p):
        raise InvalidQuery(f"p must be an odd prime, got {p}")
    if not 1 <= sigma <= MAX_HEIGHT:
        raise InvalidQuery(f"sigma must lie in [1, 10], got {sigma}")
    return set(nt.divisors(p**sigma + 1))


def predicted_transcendental_charpoly(n: int, rank: int) -> nt.IntPolynomial:
    phi = nt.euler_phi(n)
    if rank % phi or not 0 < rank < H2_RANK:
        raise NotDivisible(f"rank {rank} is not a multiple of phi({n}) = {phi} in [1, 21]")
    return nt.cyclotomic(n) ** (rank // phi)
