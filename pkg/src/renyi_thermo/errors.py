"""Exception hierarchy.

Input problems (malformed or invalid matrices) derive from ``ValidationError``;
mathematically inadmissible parameters derive from ``DomainError``.  The CLI
maps the first family to exit code 2 and the second to exit code 3.
"""


class RenyiThermoError(Exception):
    pass


class ValidationError(RenyiThermoError, ValueError):
    """Input does not satisfy the invariants of its declared type."""


class NotPositiveError(ValidationError):
    pass


class ZeroTraceError(ValidationError):
    pass


class DomainError(RenyiThermoError, ValueError):
    """Arguments are valid objects but outside the domain of the operation."""


class DimensionMismatchError(DomainError):
    pass


class SpectralDomainError(DomainError):
    """log or negative power requested on a non-positive spectrum."""


class SingularSigmaError(DomainError):
    pass


class BetaZeroError(DomainError):
    def __init__(self, msg="beta must be nonzero"):
        super().__init__(msg)


class BetaRangeError(DomainError):
    pass


class AlphaInfiniteError(DomainError):
    pass


class AlphaOneError(DomainError):
    pass


class OddDimensionError(DomainError):
    pass


class EigenConvergenceError(RenyiThermoError, ArithmeticError):
    pass


class UnknownCheckError(RenyiThermoError, KeyError):
    pass


class ConfigError(RenyiThermoError, ValueError):
    pass
