"""Builtin test fields f(x, y) on the unit box."""

import numpy as np

from .exceptions import ConfigurationError


def sine_field(scale=100.0, wavenumber=2):
    """scale * sin(2 pi k x) sin(2 pi k y); the default is 100 sin(4 pi x) sin(4 pi y)."""
    omega = 2 * np.pi * wavenumber

    def field(x, y):
        return scale * np.sin(omega * x) * np.sin(omega * y)

    return field


def polynomial_field(degree=2, scale=1.0):
    """A bivariate polynomial of total degree ``degree`` with a mixed term."""
    def field(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        total = np.ones(np.broadcast(x, y).shape)
        for d in range(1, degree + 1):
            a = (d + 1) // 2
            total = total + (x - 0.5) ** a * (y - 0.5) ** (d - a) / d
        return scale * total

    return field


def random_field(seed=0, scale=1.0):
    """Seeded i.i.d. uniform values on [-scale, scale], one per grid point."""
    def field(x, y):
        rng = np.random.default_rng(seed)
        shape = np.broadcast(np.asarray(x), np.asarray(y)).shape
        return scale * rng.uniform(-1.0, 1.0, size=shape)

    return field


def constant_field(scale=1.0):
    return lambda x, y: scale * np.ones(np.broadcast(np.asarray(x), np.asarray(y)).shape)


def field_from_config(config=None):
    config = dict(config or {})
    name = config.pop('name', 'sine')
    seed = config.pop('seed', 0)
    degree = config.pop('degree', 2)
    if name == 'sine':
        return sine_field(scale=config.get('scale', 100.0))
    if name == 'random':
        return random_field(seed=seed, scale=config.get('scale', 1.0))
    if name == 'polynomial':
        return polynomial_field(degree=degree, scale=config.get('scale', 1.0))
    if name == 'constant':
        return constant_field(scale=config.get('scale', 1.0))
    raise ConfigurationError(f"Unknown field '{name}'")
