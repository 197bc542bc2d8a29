"""
Base settings for waveletgrid - shared across all environments
"""

from pathlib import Path

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent.parent

# Application definition
INSTALLED_APPS = [
    'waveletgrid.apps.WaveletGridConfig',
]

# No models: runs persist to IWF1/CSV/SVG files, never to a database
DATABASES = {}

# Internationalization
LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'
USE_I18N = False
USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# ----------------------------------------
# WAVELETGRID NUMERICAL DEFAULTS
# ----------------------------------------

# Read through waveletgrid.conf.wavelet_settings; run configs and CLI flags override these.
WAVELETGRID = {
    'WAVELET': '6.2',
    'GEOMETRY': {
        'kind': 'star',
        'center': [0.51, 0.51],
        'r0': 0.3,
        'amp': 0.04,
        'lobes': 5,
    },
    'SNAP_TOLERANCE': 1e-6,
    'ROOT_TOLERANCE': 1e-12,
    'ROOT_MAX_ITER': 50,
    'GRADIENT_STEP': 1e-6,
    # Near/free detail split in fine spacings; None means N + 3
    'NEAR_BOUNDARY_WIDTH': None,
    'STENCIL': {
        # None means 2N grid units for the wavelet stencils, N for the solver ghosts
        'RN': None,
        'RT': None,
        'SOLVER_RN': None,
        'SOLVER_RT': None,
    },
    'ADAPTATION': {
        'K': 2,
        'CADENCE': 10,
        'EPS_RATIO': 100.0,
        'MIN_LEVEL': 5,
        'MAX_LEVEL': 12,
    },
    'SOLVER': {
        'FOURIER': 0.2,
        'BLOWUP_FACTOR': 1e6,
    },
    'THREADS': 1,
}

# ----------------------------------------
# LOGGING
# ----------------------------------------

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '{levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'plain',
        },
    },
    'loggers': {
        'waveletgrid': {
            'handlers': ['console'],
            'level': 'INFO',
            'propagate': False,
        },
    },
}
