"""
Local development settings
"""

from .base import *

# This is just for local development
SECRET_KEY = 'waveletgrid-insecure-local-dev-key'

DEBUG = True

# Verbose numerical logging while developing
LOGGING['loggers']['waveletgrid']['level'] = 'DEBUG'

# Sequential per-line work keeps runs bit-reproducible
WAVELETGRID['THREADS'] = 1
