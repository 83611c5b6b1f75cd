"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes: ``InvalidInputError`` -> 2,
``PrecisionError`` -> 3, ``Finding`` -> 1.
"""


class InvalidInputError(ValueError):
    """Parameters rejected before any computation starts."""


class NotPrimeError(InvalidInputError):
    pass


class DegreeError(InvalidInputError):
    pass


class TwistRangeError(InvalidInputError):
    pass


class CharacteristicDividesDegreeError(InvalidInputError):
    pass


class PrecisionError(ArithmeticError):
    """Working precision or truncation was too small; raise N (or J/E)."""


class Finding(AssertionError):
    """A computed quantity contradicts a proved statement.

    These are results, not bugs in the caller's input, and must never be
    swallowed.
    """
