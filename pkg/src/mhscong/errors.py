"""Exception hierarchy shared by all modules."""


class MhsError(Exception):
    """Base class for every error raised by this package."""


class NonInvertible(MhsError, ZeroDivisionError):
    pass


class ModulusMismatch(MhsError, ValueError):
    pass


class ModuliNotCoprime(MhsError, ValueError):
    pass


class BoundExceeded(MhsError, ValueError):
    pass


class BadWeight(MhsError, ValueError):
    pass


class PreconditionViolated(MhsError, ValueError):
    pass


class InconsistentConstraints(MhsError, ValueError):
    pass


class ValuationError(MhsError, ArithmeticError):
    """A quantity expected to be p-integral has negative p-adic valuation."""


class BudgetExceeded(MhsError, RuntimeError):
    pass


class OutOfDomain(MhsError, ValueError):
    pass


class PrimeTooSmall(MhsError, ValueError):
    pass


class MismatchedWindows(MhsError, ValueError):
    pass


class InconsistentData(MhsError, ValueError):
    pass


class SingularInput(MhsError, ValueError):
    pass
