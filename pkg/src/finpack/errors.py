"""Exception types shared across the package."""


class FinpackError(Exception):
    """Base class for all errors raised by finpack."""


class NotPrime(FinpackError, ValueError):
    pass


class EvenModulus(FinpackError, ValueError):
    pass


class ZeroInverse(FinpackError, ZeroDivisionError):
    pass


class EmptySet(FinpackError, ValueError):
    pass


class MixedModulus(FinpackError, ValueError):
    pass


class ConventionMismatch(FinpackError, ValueError):
    pass


class CapExceeded(FinpackError, ValueError):
    pass


class ZeroVector(FinpackError, ValueError):
    pass


class DependentBasis(FinpackError, ValueError):
    pass


class DimensionMismatch(FinpackError, ValueError):
    pass


class MissingParam(FinpackError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class PreconditionViolated(FinpackError, ValueError):
    pass


class HypothesisViolated(FinpackError, ValueError):
    pass


class NotADivisor(FinpackError, ValueError):
    pass


class InfeasibleFiber(FinpackError, ValueError):
    pass


class NotOriginLine(FinpackError, ValueError):
    pass


class ParseError(FinpackError, ValueError):
    pass
