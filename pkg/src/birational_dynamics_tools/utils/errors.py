"""Exception hierarchy shared by every module of the package."""
from typing import Optional


class BirationalDynamicsError(Exception):
    """Base class for all errors raised by birational-dynamics-tools."""


class SpecificationError(BirationalDynamicsError, ValueError):
    """A map specification or sweep file failed to load or validate."""


class ZeroVector(BirationalDynamicsError, ValueError):
    """All coordinates of a projective point are zero."""


class DimensionMismatch(BirationalDynamicsError, ValueError):
    pass


class IndeterminateEvaluation(BirationalDynamicsError, ArithmeticError):
    """All coordinate polynomials of a lift vanish at the evaluated point."""

    def __init__(self, step: int = 0, message: Optional[str] = None):
        self.step = step
        super().__init__(message or f"Indeterminate evaluation at step {step}: the lift vanishes identically.")


class NearIndeterminate(BirationalDynamicsError, ArithmeticError):
    """The floating-point lift value is below the indeterminacy tolerance."""

    def __init__(self, step: int = 0, message: Optional[str] = None):
        self.step = step
        super().__init__(message or f"Lift value is numerically zero at step {step}.")


class DegenerateRestriction(BirationalDynamicsError, RuntimeError):
    pass


class ResourceLimit(BirationalDynamicsError, MemoryError):
    pass


class NotPrime(BirationalDynamicsError, ValueError):
    pass


class SingularMatrix(BirationalDynamicsError, ValueError):
    pass


class PrecisionExhausted(BirationalDynamicsError, ArithmeticError):
    """Cancellation consumed every p-adic digit of working precision."""


class WrongDimension(BirationalDynamicsError, ValueError):
    pass


class DegenerateFamily(BirationalDynamicsError, ValueError):
    pass


class DegenerateLine(BirationalDynamicsError, ValueError):
    pass


class EmptySet(BirationalDynamicsError, ValueError):
    pass


class NoConvergence(BirationalDynamicsError, RuntimeError):
    pass
