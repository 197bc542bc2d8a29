"""
Exception hierarchy for waveletgrid.

Configuration problems map to exit code 2 and numerical failures to exit
code 3 (see utils.command_error_from).
"""


class WaveletGridError(Exception):
    """Base class for every error raised by waveletgrid."""


class ConfigurationError(WaveletGridError, ValueError):
    """Invalid run configuration, flag combination or adaptation thresholds."""


class NumericalError(WaveletGridError):
    """A numerical operation failed; ``operation`` names it."""

    operation = 'numerical'

    def __init__(self, message, operation=None):
        super().__init__(message)
        if operation is not None:
            self.operation = operation


class NonConvergedRoot(NumericalError):
    operation = 'find_control_points'


class DegenerateGradient(NumericalError):
    operation = 'compute_normal'


class SingularVandermonde(NumericalError):
    operation = 'extrapolate'


class InsufficientPoints(NumericalError):
    operation = 'fwt_line'


class InsufficientStencilPoints(NumericalError):
    operation = 'select_ellipse_points'


class RankDeficient(NumericalError):
    operation = 'lsq_fit'


class UnstableStep(NumericalError):
    operation = 'step_rk3'


class NonPositiveValue(NumericalError, ValueError):
    operation = 'fit_order'


class SerializationError(WaveletGridError):
    """Problems reading or writing persisted fields."""


class FormatError(SerializationError):
    pass


class MaskMismatch(SerializationError):
    pass
