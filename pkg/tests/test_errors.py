"""Tests for the error hierarchy and the Undefined sentinel."""

import math
import pickle

from tailkernel.errors import (
    DomainError,
    NoOptimumError,
    NumericalError,
    Reason,
    SingularityError,
    TailKernelError,
    Undefined,
    ValidationError,
    is_undefined,
)


def test_hierarchy():
    assert issubclass(DomainError, ValueError)
    assert issubclass(ValidationError, TailKernelError)
    assert issubclass(SingularityError, NumericalError)
    assert issubclass(NoOptimumError, NumericalError)


class TestUndefined:
    def test_is_nan(self):
        value = Undefined(Reason.KM_TOP_ZERO)
        assert math.isnan(value)
        assert is_undefined(value)
        assert math.isnan(value + 1.0)

    def test_keeps_reason(self):
        value = Undefined(Reason.FULLY_CENSORED)
        assert value.reason is Reason.FULLY_CENSORED
        assert repr(value) == "Undefined(fully-censored-tail)"

    def test_pickles(self):
        value = pickle.loads(pickle.dumps(Undefined(Reason.RHO_SINGULAR)))
        assert value.reason is Reason.RHO_SINGULAR

    def test_plain_values(self):
        assert is_undefined(float("nan"))
        assert not is_undefined(0.25)
