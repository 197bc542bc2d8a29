"""Entry point running the management commands and returning their exit code."""

import os
import sys

from django.core.management import execute_from_command_line

ALIASES = {
    'scaling-function': 'scaling_function',
}


def main(argv=None):
    """
    Dispatch ``argv`` (program name first) and return the exit code:
    0 on success, 2 for configuration errors, 3 for numerical failures.
    """
    argv = list(sys.argv if argv is None else argv)
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'src.settings.local')
    if len(argv) > 1:
        argv[1] = ALIASES.get(argv[1], argv[1])
    try:
        execute_from_command_line(argv)
    except SystemExit as exc:
        if exc.code is None:
            return 0
        return exc.code if isinstance(exc.code, int) else 1
    return 0
