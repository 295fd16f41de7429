"""Exception hierarchy shared by every module of the package."""


class PermPolyError(Exception):
    """Base class for all errors raised by permpoly."""


# field construction and arithmetic

class NotPrime(PermPolyError, ValueError):
    pass


class NotIrreducible(PermPolyError, ValueError):
    pass


class BoundExceeded(PermPolyError, ValueError):
    pass


class DivisionByZero(PermPolyError, ZeroDivisionError):
    pass


class LevelMismatch(PermPolyError, TypeError):
    pass


class EvenCharacteristic(PermPolyError, ValueError):
    pass


class OddCharacteristic(PermPolyError, ValueError):
    pass


class ZeroCoefficient(PermPolyError, ValueError):
    pass


# polynomials

class InexactDivision(PermPolyError, ArithmeticError):
    pass


class ExponentError(PermPolyError, ValueError):
    """Exponent outside the supported dyadic range (denominator 1 or 2)."""


class NotOnMu(PermPolyError, ValueError):
    pass


class HalfExponentInOddCharacteristic(PermPolyError, ValueError):
    pass


class HalfExponent(PermPolyError, ValueError):
    pass


class NonPolynomialSquareRoot(PermPolyError, ArithmeticError):
    pass


# criterion / construction

class ZeroDenominatorPolynomial(PermPolyError, ZeroDivisionError):
    pass


class DegenerateDenominator(PermPolyError, ZeroDivisionError):
    pass


class ZeroPolynomial(PermPolyError, ValueError):
    pass


class InternalMismatch(PermPolyError, AssertionError):
    pass


class NonTerminating(PermPolyError, RuntimeError):
    pass


class InvalidParams(PermPolyError, ValueError):
    pass


# oracle / search

class ImageEscapesT(PermPolyError, ValueError):
    pass


class VerdictMismatch(PermPolyError, AssertionError):
    pass
