"""
Access to the WAVELETGRID settings dict.

Modules read numerical defaults through ``wavelet_settings`` so that user
settings are merged over the defaults below, in the same way the REST
framework settings dict is consumed. When Django is not configured (plain
library use) the defaults are returned unchanged.
"""

import copy

from django.conf import settings
from django.core.exceptions import ImproperlyConfigured
from django.core.signals import setting_changed

DEFAULTS = {
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
    'NEAR_BOUNDARY_WIDTH': None,
    'STENCIL': {
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


def _merge(defaults, overrides):
    merged = copy.deepcopy(defaults)
    for key, value in (overrides or {}).items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


class WaveletSettings:
    """
    Lazy view over settings.WAVELETGRID.

    Attribute access returns the merged value, e.g.
    ``wavelet_settings.SNAP_TOLERANCE`` or ``wavelet_settings.ADAPTATION['K']``.
    """

    def __init__(self, defaults=None):
        self.defaults = defaults or DEFAULTS
        self._cached = None

    @property
    def merged(self):
        if self._cached is None:
            try:
                user = getattr(settings, 'WAVELETGRID', {})
            except ImproperlyConfigured:
                user = {}
            self._cached = _merge(self.defaults, user)
        return self._cached

    def __getattr__(self, name):
        if name.startswith('_') or name not in self.defaults:
            raise AttributeError(f"Invalid waveletgrid setting: '{name}'")
        return self.merged[name]

    def reload(self):
        self._cached = None


wavelet_settings = WaveletSettings()


def reload_wavelet_settings(*args, setting=None, **kwargs):
    if setting == 'WAVELETGRID':
        wavelet_settings.reload()


setting_changed.connect(reload_wavelet_settings)
