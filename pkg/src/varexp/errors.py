"""Exception hierarchy.

Everything that signals a violated precondition derives from
:class:`ValidationError`; the CLI maps that family to exit status 2 and
:class:`NonConvergenceError` to exit status 3.
"""


class VarexpError(Exception):
    """Base class for all library errors."""

    code = "error"


class ValidationError(VarexpError, ValueError):
    code = "validation"


class PointOutsideDomainError(ValidationError):
    code = "point-outside-domain"


class RegionOutsideDomainError(ValidationError):
    code = "region-outside-domain"


class EmptyRegionError(ValidationError):
    code = "empty-region"


class ExponentLocallyConstantError(ValidationError):
    """No exponent gap could be resolved on the neighborhood at the given resolution."""

    code = "exponent-locally-constant"


class SingularConfigurationError(ValidationError):
    code = "singular-configuration"


class DomainMismatchError(ValidationError):
    code = "domain-mismatch"


class NonPositiveInfimumError(ValidationError):
    """Kernel infimum over K x K is not positive; the neighborhood must shrink."""

    code = "non-positive-infimum"

    def __init__(self, message, value=None):
        super().__init__(message)
        self.value = value


class ScheduleError(ValidationError):
    code = "schedule"


class NonConvergenceError(VarexpError, ArithmeticError):
    code = "non-convergence"
