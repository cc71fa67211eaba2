"""Exception hierarchy shared by every module.

Each error records the module that raised it so the CLI can name the failing
stage in its message.
"""


class Pile2dofError(Exception):
    """Base class for all package errors."""

    module = "pile2dof"

    def __init__(self, message, module=None):
        super().__init__(message)
        if module is not None:
            self.module = module


class InvalidArgumentError(Pile2dofError, ValueError):
    pass


class AlignmentError(Pile2dofError, ValueError):
    """Two series differ in dt, t0 or length."""


class NumericError(Pile2dofError, ArithmeticError):
    pass


class UndefinedOrientationError(InvalidArgumentError):
    """Both accelerometer axes read zero, so no tilt can be inferred."""


class ModelViolationError(Pile2dofError, ValueError):
    """Rotations inconsistent with a single-load Euler-Bernoulli pile."""


class MissingGeometryError(InvalidArgumentError):
    pass


class UndefinedMetricError(NumericError):
    """Reference peak or RMS is zero, so a normalized error is undefined."""


class AliasingError(InvalidArgumentError):
    pass


class FormatError(Pile2dofError, ValueError):
    """Malformed event, displacement or config file."""
