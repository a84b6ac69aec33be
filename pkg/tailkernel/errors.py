"""Exception hierarchy and the Undefined estimate sentinel."""

from enum import Enum


class TailKernelError(Exception):
    """Base class for all library errors."""


class DomainError(TailKernelError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class ValidationError(TailKernelError, ValueError):
    """Malformed input file, config key or flag combination."""


class NumericalError(TailKernelError, ArithmeticError):
    """A computation failed at runtime (non-finite result, quadrature failure)."""


class SingularityError(NumericalError):
    """A denominator vanished (e.g. rho(tau1) with eta3/eta2 - eta1 = 0)."""


class NoOptimumError(NumericalError):
    """The asymptotic MSE has no interior minimiser (no second-order bias)."""


class Reason(str, Enum):
    """Why an estimate is undefined at a given k."""
    ZERO_DENOMINATOR = "zero-denominator"
    FULLY_CENSORED = "fully-censored-tail"
    KM_TOP_ZERO = "km-top-zero"
    RHO_SINGULAR = "rho-singular"
    NONPOSITIVE_ESTIMATE = "nonpositive-estimate"
    OUT_OF_RANGE = "k-out-of-range"


class Undefined(float):
    """NaN that remembers why it is NaN.

    Behaves as float('nan') in arithmetic so paths can be assembled with numpy,
    while `reason` survives for reporting.
    """

    reason: Reason

    def __new__(cls, reason: Reason) -> "Undefined":
        obj = super().__new__(cls, "nan")
        obj.reason = reason
        return obj

    def __repr__(self) -> str:
        return f"Undefined({self.reason.value})"

    def __reduce__(self):
        return (Undefined, (self.reason,))


def is_undefined(value: float) -> bool:
    """True for Undefined sentinels and plain NaN."""
    return value != value
