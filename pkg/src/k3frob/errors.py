"""Exception hierarchy shared by every k3frob module."""


class K3FrobError(Exception):
    """Base class for all package errors."""


class InvalidQuery(K3FrobError, ValueError):
    """Input violates a documented precondition."""


class NotCoprime(InvalidQuery):
    """Raised when gcd(p, N) != 1 where coprimality is required."""


class NotDivisible(InvalidQuery):
    pass


class InapplicableHeight(K3FrobError):
    """The order of p mod N exceeds 10 and no power of p is -1 mod N.

    Such a pair cannot come from a K3 surface satisfying the rank
    hypothesis, since heights of K3 surfaces lie in [1, 10].
    """

    def __init__(self, order, p, height):
        self.order = order
        self.p = p
        self.height = height
        super().__init__(
            f"order of {p} mod {order} is {height} > 10 and no power of {p} is -1 mod {order}"
        )


class UnknownLattice(K3FrobError, KeyError):
    pass


class NotPrime(InvalidQuery):
    pass


class DegreeTooLarge(K3FrobError):
    pass


class BudgetExceeded(K3FrobError):
    pass


class Inconclusive(K3FrobError):
    """Hasse-interval order finding did not pin down a unique group order."""


class InvalidTrace(InvalidQuery):
    pass


class BadReduction(K3FrobError):
    pass


class MixedPrimes(InvalidQuery):
    pass
