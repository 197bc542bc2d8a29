#!/usr/bin/env python
"""Django's command-line utility for the waveletgrid commands."""
import os
import sys


def main():
    """Run administrative and numerical commands."""
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'src.settings.local')
    try:
        from waveletgrid.cli import main as run
    except ImportError as exc:
        raise ImportError(
            "Couldn't import Django. Are you sure it's installed and "
            "available on your PYTHONPATH environment variable? Did you "
            "forget to activate a virtual environment?"
        ) from exc
    sys.exit(run(sys.argv))


if __name__ == '__main__':
    main()
