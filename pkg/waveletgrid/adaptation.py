"""
Multi-level compression and the temporal coarsen/refine/keep policy.

Thresholds are scaled by 2^(-k (L - L0)); the refinement threshold must be
at least 2^N times the coarsening threshold so that a coarsened field is
never refined straight back.
"""

import enum
import logging

import attrs
import numpy as np

from .conf import wavelet_settings
from .exceptions import ConfigurationError
from .geometry import ImmersedGrid
from .stencil import lsq_fit, minimum_image, select_ellipse_points
from .wavelet2d import CoefficientField, decompose, fwt2d, iwt2d, reconstruct, scaling_to_coarse

logger = logging.getLogger(__name__)


class Decision(enum.Enum):
    COARSEN = 'coarsen'
    KEEP = 'keep'
    REFINE = 'refine'


@attrs.frozen
class AdaptationEvent:
    """One adaptation check; ``max_detail`` is measured before the level change."""
    time: float
    decision: Decision
    max_detail: float
    level_before: int
    level_after: int
    coarsen_threshold: float
    refine_threshold: float

    @property
    def changed(self):
        return self.level_before != self.level_after


@attrs.define
class AdaptationState:
    """
    Level bookkeeping of one adaptive run.

    ``order`` is the wavelet order N used by the flip-flop guard
    eps_r >= 2^N eps_c.
    """
    level: int
    eps_c: float
    eps_r: float
    order: int = 6
    base_level: int = None
    k: int = attrs.field(factory=lambda: wavelet_settings.ADAPTATION['K'])
    cadence: int = attrs.field(factory=lambda: wavelet_settings.ADAPTATION['CADENCE'])
    min_level: int = attrs.field(factory=lambda: wavelet_settings.ADAPTATION['MIN_LEVEL'])
    max_level: int = attrs.field(factory=lambda: wavelet_settings.ADAPTATION['MAX_LEVEL'])
    history: list = attrs.field(factory=list)

    def __attrs_post_init__(self):
        if self.base_level is None:
            self.base_level = self.level
        if not self.eps_c > 0:
            raise ConfigurationError(f'eps_c must be positive, got {self.eps_c}')
        if not self.eps_r > self.eps_c:
            raise ConfigurationError(f'eps_r ({self.eps_r}) must exceed eps_c ({self.eps_c})')
        if self.eps_r < 2 ** self.order * self.eps_c:
            raise ConfigurationError(
                f'Flip-flop guard violated: eps_r = {self.eps_r:g} < 2^{self.order} eps_c = '
                f'{2 ** self.order * self.eps_c:g}'
            )
        if self.k < 0:
            raise ConfigurationError(f'k must be non-negative, got {self.k}')
        if self.cadence < 1:
            raise ConfigurationError(f'Adaptation cadence must be at least 1, got {self.cadence}')
        if not self.min_level <= self.level <= self.max_level:
            raise ConfigurationError(
                f'Level {self.level} outside the allowed range [{self.min_level}, {self.max_level}]'
            )

    @classmethod
    def from_ratio(cls, level, eps_r, order, ratio=None, **kwargs):
        """State with eps_c = eps_r / ratio (default ratio from settings)."""
        if ratio is None:
            ratio = wavelet_settings.ADAPTATION['EPS_RATIO']
        if not ratio > 0:
            raise ConfigurationError(f'eps ratio must be positive, got {ratio}')
        return cls(level=level, eps_c=eps_r / ratio, eps_r=eps_r, order=order, **kwargs)

    @property
    def factor(self):
        return 2.0 ** (-self.k * (self.level - self.base_level))

    @property
    def thresholds(self):
        return self.eps_c * self.factor, self.eps_r * self.factor

    def decide(self, max_detail):
        return decide(max_detail, self)

    def apply(self, decision, max_detail, time=0.0):
        """Record ``decision`` and move the level; changes beyond the caps degrade to Keep."""
        eps_c, eps_r = self.thresholds
        if decision is Decision.REFINE and self.level >= self.max_level:
            decision = Decision.KEEP
        if decision is Decision.COARSEN and self.level <= self.min_level:
            decision = Decision.KEEP
        before = self.level
        if decision is Decision.REFINE:
            self.level += 1
        elif decision is Decision.COARSEN:
            self.level -= 1
        event = AdaptationEvent(
            time=float(time),
            decision=decision,
            max_detail=float(max_detail),
            level_before=before,
            level_after=self.level,
            coarsen_threshold=eps_c,
            refine_threshold=eps_r,
        )
        self.history.append(event)
        if event.changed:
            logger.info('t=%.6g: %s %d -> %d (max detail %.3e)', time, decision.value, before, self.level, max_detail)
        else:
            logger.debug('t=%.6g: keep level %d (max detail %.3e)', time, self.level, max_detail)
        return event


def decide(max_detail, state):
    """Coarsen below the scaled eps_c, refine at or above the scaled eps_r, keep otherwise."""
    eps_c, eps_r = state.thresholds
    if max_detail < eps_c:
        return Decision.COARSEN
    if max_detail >= eps_r:
        return Decision.REFINE
    return Decision.KEEP


# --- Level changes ---

def _nearest_control_point(grid, x, y):
    points = grid.control_points_all()
    if not points:
        return None
    positions = np.array([cp.position for cp in points])
    distance = np.hypot(minimum_image(positions[:, 0] - x), minimum_image(positions[:, 1] - y))
    return points[int(np.argmin(distance))]


def fill_from_boundary(values, grid, targets, order, provider=None):
    """
    Values at ``targets`` (grid indices on ``grid``) that have no data of
    their own, evaluated from the nearest control point's stencil polynomial.
    """
    filled = {}
    fits = {}
    for i, j in targets:
        x, y = i * grid.h, j * grid.h
        cp = _nearest_control_point(grid, x, y)
        if cp is None:
            continue
        key = (cp.axis, cp.line_index, cp.adjacent_inside_index, cp.side)
        if key not in fits:
            indices = select_ellipse_points(cp, grid, order=order, even_only=False)
            constraint = None if provider is None else float(provider(*cp.position))
            fits[key] = lsq_fit(
                indices * grid.h, values[indices[:, 0], indices[:, 1]],
                order - 1, cp.position, grid.h, constraint=constraint,
            )
        filled[(int(i), int(j))] = float(fits[key](x, y))
    return filled


def _assign_missing(target_values, source_mask, target_mask, donor_values, donor_grid, order, provider, scale):
    """Fill target points missing from ``source_mask``; donor indices are target indices times ``scale``."""
    missing = np.argwhere(target_mask & ~source_mask)
    if missing.size == 0:
        return target_values
    donors = fill_from_boundary(donor_values, donor_grid, missing * scale, order, provider)
    for i, j in missing:
        target_values[i, j] = donors[(int(i * scale), int(j * scale))]
    logger.debug('Filled %d newly exposed points from boundary stencils', len(missing))
    return target_values


def coarsen_field(values, grid, spec, provider=None, coarse_grid=None, coeffs=None, threads=None):
    """
    Keep lambda on the coarse grid: u^(L-1) = lambda^(L-1).

    Returns (coarse values, coarse grid, coefficients of the fine level).
    """
    if coeffs is None:
        coeffs = fwt2d(values, grid, spec, provider, threads)
    if coarse_grid is None:
        coarse_grid = grid.coarsen()
    coarse = scaling_to_coarse(coeffs, coarse_grid)
    _assign_missing(coarse, grid.mask[::2, ::2], coarse_grid.mask, values, grid, spec.order, provider, 2)
    return coarse, coarse_grid, coeffs


def refine_field(values, grid, spec, provider=None, fine_grid=None, threads=None):
    """
    Set gamma = 0, lambda = u and invert one level.

    Returns (fine values, fine grid).
    """
    if fine_grid is None:
        fine_grid = ImmersedGrid.build(grid.levelset, grid.level + 1, order=spec.order, snap_tolerance=grid.snap_tolerance)
    scaling = np.where(grid.mask, values, np.nan)
    _assign_missing(scaling, grid.mask, fine_grid.mask[::2, ::2], values, grid, spec.order, provider, 1)
    data = np.where(fine_grid.mask, 0.0, np.nan)
    data[::2, ::2] = np.where(fine_grid.mask[::2, ::2], scaling, np.nan)
    coeffs = CoefficientField(data=data, grid=fine_grid.with_order(spec.order), spec=spec)
    return iwt2d(coeffs, provider, threads), coeffs.grid


def adapt_cycle(values, grid, spec, state, time=0.0, provider=None, threads=None):
    """
    One adaptation event: transform, decide, change at most one level.

    Returns (values, grid, event).
    """
    coeffs = fwt2d(values, grid, spec, provider, threads)
    max_detail = coeffs.max_detail
    event = state.apply(decide(max_detail, state), max_detail, time)
    if event.decision is Decision.COARSEN:
        coarse_grid = ImmersedGrid.build(grid.levelset, state.level, order=spec.order, snap_tolerance=grid.snap_tolerance)
        values, grid, _ = coarsen_field(values, grid, spec, provider, coarse_grid=coarse_grid, coeffs=coeffs)
    elif event.decision is Decision.REFINE:
        values, grid = refine_field(values, grid, spec, provider, threads=threads)
    return values, grid, event


# --- Compression ---

@attrs.frozen(eq=False)
class CompressionResult:
    eps: float
    values: np.ndarray
    active_points: int
    total_points: int
    einf: float
    max_details: tuple

    @property
    def compression_ratio(self):
        return self.active_points / self.total_points if self.total_points else 0.0


def _compression_result(field, grid, pyramid, eps, provider, threads, radii):
    values, active = reconstruct(pyramid, eps, provider, threads, radii)
    inside = grid.mask
    einf = float(np.max(np.abs(values[inside] - field[inside]))) if inside.any() else 0.0
    return CompressionResult(
        eps=float(eps),
        values=values,
        active_points=active,
        total_points=int(inside.sum()),
        einf=einf,
        max_details=tuple(pyramid.max_details()),
    )


def compress_hierarchy(field, grid, spec, levels, eps, provider=None, threads=None, radii=None):
    """
    Decompose ``levels`` times, drop |gamma| < eps and reconstruct.

    Returns (reconstructed field, active point count).
    """
    result = compress_sweep(field, grid, spec, levels, [eps], provider, threads, radii)[0]
    return result.values, result.active_points


def compress_sweep(field, grid, spec, levels, eps_values, provider=None, threads=None, radii=None):
    """CompressionResult per eps, sharing a single decomposition."""
    pyramid = decompose(field, grid, spec, levels, provider, threads, radii)
    results = []
    for eps in eps_values:
        result = _compression_result(field, pyramid.finest_grid, pyramid, eps, provider, threads, radii)
        logger.info(
            'eps=%.3e: Einf=%.3e, active %d/%d', result.eps, result.einf, result.active_points, result.total_points,
        )
        results.append(result)
    return results
