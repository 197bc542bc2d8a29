from django.core.management.base import CommandError

from .exceptions import ConfigurationError, NumericalError, SerializationError

CONFIG_EXIT_CODE = 2
NUMERICAL_EXIT_CODE = 3


def command_error_from(exc):
    """
    Translate a waveletgrid exception into a CommandError carrying the exit code.

    Numerical failures exit with 3 and name the failing operation; invalid
    configurations and unreadable files exit with 2.
    """
    if isinstance(exc, NumericalError):
        return CommandError(f'{exc.operation}: {exc}', returncode=NUMERICAL_EXIT_CODE)
    if isinstance(exc, ConfigurationError):
        return CommandError(f'Configuration error: {exc}', returncode=CONFIG_EXIT_CODE)
    if isinstance(exc, SerializationError):
        return CommandError(f'{exc.__class__.__name__}: {exc}', returncode=CONFIG_EXIT_CODE)
    return CommandError(str(exc), returncode=1)


def geometric_sequence(start, stop, count):
    """``count`` values from ``start`` to ``stop`` evenly spaced in log."""
    if count == 1:
        return [float(start)]
    ratio = (stop / start) ** (1.0 / (count - 1))
    return [float(start * ratio ** k) for k in range(count)]
