"""
Batch-run settings for long parameter sweeps
"""

import os

from .base import *

SECRET_KEY = os.environ.get('WAVELETGRID_SECRET_KEY', 'waveletgrid-batch')

DEBUG = False

# Run summaries and adaptation events only
LOGGING['loggers']['waveletgrid']['level'] = os.environ.get('WAVELETGRID_LOG_LEVEL', 'INFO')

# Thread cap for per-line transform work, e.g. WAVELETGRID_THREADS=8
WAVELETGRID['THREADS'] = int(os.environ.get('WAVELETGRID_THREADS', '1'))

# Memory guard for the finest adaptive level on shared machines
WAVELETGRID['ADAPTATION']['MAX_LEVEL'] = int(os.environ.get('WAVELETGRID_MAX_LEVEL', '12'))
