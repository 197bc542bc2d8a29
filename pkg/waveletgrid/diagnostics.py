"""
Lebesgue ratios, convergence-order fits, boundary amplification and
scaling-function cascades.
"""

import math
from fractions import Fraction

import attrs
import numpy as np

from .exceptions import ConfigurationError, NonPositiveValue
from .wavelet1d import PERIODIC, EndClosures, LineBuffer, TypeI, TypeII, iwt_line


def _odd_product(start, stop):
    """|prod_{j=start}^{stop} (1 - 2j)| as an integer."""
    return abs(math.prod(1 - 2 * j for j in range(start, stop + 1)))


def _check_order(N):
    if N < 2 or N % 2:
        raise ConfigurationError(f'N must be even and at least 2, got {N}')


def lebesgue_ratio(N):
    """Asymptotic near-boundary amplification of Type I extrapolation, as an exact Fraction."""
    _check_order(N)
    return Fraction(_odd_product(1, N), _odd_product(-N // 2 + 1, N // 2))


def lebesgue_ratio_bc(N, psi):
    """
    Same ratio when the boundary value enters the extrapolation, ``psi`` being
    the boundary distance fraction in (0, 1]. Exact when ``psi`` is a Fraction.
    """
    _check_order(N)
    if not 0 < psi <= 1:
        raise ConfigurationError(f'psi must lie in (0, 1], got {psi}')
    ratio = Fraction(_odd_product(1, N - 1), _odd_product(-N // 2 + 1, N // 2))
    if isinstance(psi, (Fraction, int)):
        return Fraction(psi) * ratio
    return float(psi) * float(ratio)


@attrs.frozen
class ConvergenceFit:
    h: tuple
    values: tuple
    slope: float
    intercept: float
    residual: float

    @property
    def order(self):
        return self.slope


def fit_order(pairs):
    """Least-squares slope of log(value) against log(h) for at least three dyadic (h, value) pairs."""
    pairs = sorted(((float(h), float(v)) for h, v in pairs), reverse=True)
    if len(pairs) < 3:
        raise ConfigurationError(f'Need at least 3 (h, value) pairs, got {len(pairs)}')
    h = np.array([p[0] for p in pairs])
    values = np.array([p[1] for p in pairs])
    if np.any(values <= 0) or np.any(~np.isfinite(values)):
        raise NonPositiveValue('Convergence values must be positive and finite')
    if np.any(h <= 0):
        raise NonPositiveValue('Grid spacings must be positive')
    if not np.allclose(h[:-1] / h[1:], 2.0, rtol=1e-6):
        raise ConfigurationError('Grid spacings must halve between consecutive pairs')
    coefficients, residuals, *_ = np.polyfit(np.log(h), np.log(values), 1, full=True)
    return ConvergenceFit(
        h=tuple(h),
        values=tuple(values),
        slope=float(coefficients[0]),
        intercept=float(coefficients[1]),
        residual=float(residuals[0]) if len(residuals) else 0.0,
    )


def boundary_amplification(coeffs, width=None):
    """Near-boundary over free-space maximum detail magnitude of a CoefficientField."""
    near = max(coeffs.max_details('near', width).values())
    free = max(coeffs.max_details('free', width).values())
    if free == 0.0:
        return math.inf if near > 0 else 0.0
    return near / free


# --- Scaling functions ---

@attrs.frozen(eq=False)
class ScalingFunctionCurve:
    """Samples of a scaling function; ``x`` is in coarse grid units from the impulse."""
    x: np.ndarray
    values: np.ndarray
    context: str
    boundary_position: float = None

    def value_at(self, x):
        index = np.flatnonzero(np.isclose(self.x, x))
        if index.size == 0:
            raise KeyError(x)
        return float(self.values[index[0]])


def _refine(values, first_coarse, spec, closures):
    """One cascade step: coarse values at coarse indices first_coarse.. -> fine buffer."""
    if closures is PERIODIC:
        fine = np.zeros(2 * len(values))
        fine[::2] = values
        return iwt_line(LineBuffer(fine, 0), spec, PERIODIC).values, 0
    odd_start = isinstance(closures.left, TypeII)
    offset = 2 * first_coarse - 1 if odd_start else 2 * first_coarse
    fine = np.zeros(2 * len(values) - 1 + int(odd_start))
    fine[int(odd_start)::2] = values
    buf = iwt_line(LineBuffer(fine, offset), spec, closures)
    return buf.values, offset


def scaling_function_samples(spec, refinements, context='free', offset=1.0):
    """
    Cascade a unit scaling coefficient through ``refinements`` inverse
    transforms with zero details.

    ``context`` is 'free' (periodic line), 'type1' (impulse on the first
    coarse point next to the boundary) or 'type2' (Type II closure with a
    zero boundary value ``offset`` fine spacings left of the first point).
    The type2 offset stays the same at every refinement, so the boundary
    does not stay at a fixed physical position across the cascade.
    """
    if not 0 <= refinements <= 10:
        raise ConfigurationError(f'refinements must lie in [0, 10], got {refinements}')
    count = 4 * spec.order
    values = np.zeros(count)
    if context == 'free':
        impulse = count // 2
        values[impulse] = 1.0
        closures, first = PERIODIC, 0
    elif context == 'type1':
        impulse, first = 0, 0
        values[0] = 1.0
        closures = EndClosures(TypeI(), TypeI())
    elif context == 'type2':
        if not 0 < offset <= 1:
            raise ConfigurationError(f'offset must lie in (0, 1], got {offset}')
        impulse, first = 0, 1
        values[0] = 1.0
        closures = EndClosures(TypeII(boundary_value=0.0, psi=offset), TypeI())
    else:
        raise ConfigurationError(f"Unknown scaling-function context '{context}'")

    odd_start = context == 'type2'
    for _ in range(refinements):
        values, first = _refine(values, first, spec, closures)
        impulse = 2 * impulse + int(odd_start)
    spacing = 2.0 ** -refinements
    x = (np.arange(len(values)) - impulse) * spacing
    boundary = None
    if odd_start:
        # the boundary sits ``offset`` spacings left of the first value
        boundary = (-offset - impulse) * spacing
    return ScalingFunctionCurve(x=x, values=values, context=context, boundary_position=boundary)
