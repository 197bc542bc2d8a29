"""
Dimension-split 2D transforms over the immersed domain.

The forward transform runs an x-pass over every row, then a y-pass over
every column. Columns with odd i carry x-details and are closed with zero
ghost values; every other interval gets Type I, Type II or Hermite ghosts.
The inverse runs the y-pass, then the x-pass, each one unlifting first and
recomputing closures from the restored scaling values before un-predicting.

After fwt2d the fine array holds (even, even) -> lambda, (odd, even) -> gx,
(even, odd) -> gy and (odd, odd) -> gxy; outside points hold NaN.
"""

import logging
from concurrent.futures import ThreadPoolExecutor

import attrs
import numpy as np

from .conf import wavelet_settings
from .exceptions import ConfigurationError
from .geometry import Axis, IntervalKind
from .stencil import eval_x_derivative, fit_boundary_stencil
from .wavelet1d import (
    PERIODIC, DerivativeData, EndClosures, Hermite, LineBuffer, TypeI, TypeII, ZeroFill,
    allocate_hermite_conditions, fwt_line, unlift_line, unpredict_line,
)

logger = logging.getLogger(__name__)

DETAIL_CLASSES = {
    'gx': (1, 0),
    'gy': (0, 1),
    'gxy': (1, 1),
}


@attrs.define(eq=False)
class CoefficientField:
    """In-place coefficient layout of one transform level."""
    data: np.ndarray
    grid: object
    spec: object

    @property
    def level(self):
        return self.grid.level

    @property
    def scaling(self):
        """lambda values on the coarse grid (NaN outside)."""
        return self.data[::2, ::2].copy()

    def class_mask(self, name):
        if name == 'lambda':
            pi, pj = 0, 0
        else:
            pi, pj = DETAIL_CLASSES[name]
        i = np.arange(self.grid.n)
        selector = np.outer(i % 2 == pi, i % 2 == pj)
        return selector & self.grid.mask

    def details_mask(self):
        return self.grid.mask & ~self.class_mask('lambda')

    @property
    def near_width(self):
        """
        Default near/free split in fine grid spacings.

        Zero-filled ghosts on the detail columns reach past the boundary
        closure into the y-pass, so the split covers N + 3 spacings unless
        ``NEAR_BOUNDARY_WIDTH`` is set.
        """
        width = wavelet_settings.NEAR_BOUNDARY_WIDTH
        return float(width) if width is not None else float(self.spec.order + 3)

    def region_mask(self, region=None, width=None):
        if region is None:
            return np.ones(self.grid.dims, dtype=bool)
        near = self.grid.near_boundary_mask(self.near_width if width is None else width)
        if region == 'near':
            return near
        if region == 'free':
            return ~near
        raise ConfigurationError(f"Unknown region '{region}'")

    def max_details(self, region=None, width=None):
        """Per-class max |gamma|, optionally restricted to 'near' or 'free' (beyond ``near_width`` spacings)."""
        region_mask = self.region_mask(region, width)
        result = {}
        for name in DETAIL_CLASSES:
            selected = self.data[self.class_mask(name) & region_mask]
            result[name] = float(np.max(np.abs(selected))) if selected.size else 0.0
        return result

    @property
    def max_detail(self):
        return max(self.max_details().values())

    def thresholded(self, eps):
        """Copy keeping details with |gamma| >= eps; returns (field, surviving detail count)."""
        data = self.data.copy()
        details = self.details_mask()
        drop = details & (np.abs(data) < eps)
        data[drop] = 0.0
        return attrs.evolve(self, data=data), int(details.sum() - drop.sum())

    def copy(self):
        return attrs.evolve(self, data=self.data.copy())


@attrs.frozen(eq=False)
class Pyramid:
    """Multi-level decomposition: ``fields[0]`` is the finest level."""
    fields: list
    coarse_values: np.ndarray
    coarse_grid: object

    @property
    def levels(self):
        return len(self.fields)

    @property
    def finest_grid(self):
        return self.fields[0].grid

    def max_details(self):
        return [field.max_detail for field in self.fields]


def _resolve_threads(threads):
    if threads is None:
        threads = wavelet_settings.THREADS
    return max(int(threads or 1), 1)


def _map(func, items, threads):
    if threads <= 1 or len(items) < 2:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(func, items))


def _is_detail_line(axis, iv):
    """In the y-pass, columns with odd i carry x-details."""
    return axis is Axis.Y and iv.line_index % 2 == 1


class _ClosureBuilder:
    """Chooses the ghost closure of every interval of one pass from a data snapshot."""

    def __init__(self, grid, spec, axis, data, provider, radii):
        self.grid = grid
        self.spec = spec
        self.axis = axis
        self.data = data
        self.provider = provider
        self.radii = radii or (None, None)

    def boundary_value(self, cp):
        return float(self.provider(*cp.position))

    def wide_end(self, cp, index):
        if self.provider is not None and index % 2 == 1:
            return TypeII(boundary_value=self.boundary_value(cp), psi=cp.psi)
        return TypeI()

    def hermite(self, iv):
        order = self.spec.order
        first_even = iv.start_index + (iv.start_index % 2)
        inside_count = len(range(first_even, iv.end_index + 1, 2))
        left_value, left_n, right_value, right_n = allocate_hermite_conditions(
            inside_count, iv.start_index % 2 == 1, iv.end_index % 2 == 1, order,
        )
        left = self.boundary_data(iv.left, iv.start_index - iv.left.psi, left_value, left_n)
        right = self.boundary_data(iv.right, iv.end_index + iv.right.psi, right_value, right_n)
        return Hermite(left=left, right=right)

    def boundary_data(self, cp, coordinate, with_value, derivative_count):
        poly = None
        if derivative_count or (with_value and self.provider is None):
            rn, rt = self.radii
            poly = fit_boundary_stencil(cp, self.grid, self.data, order=self.spec.order, rn=rn, rt=rt).polynomial
        value = None
        if with_value:
            value = self.boundary_value(cp) if self.provider is not None else poly(*cp.position)
        derivatives = tuple(
            eval_x_derivative(poly, cp.position, j, self.axis) for j in range(1, derivative_count + 1)
        )
        return DerivativeData(coordinate=coordinate, value=value, derivatives=derivatives)

    def __call__(self, iv):
        if iv.kind is IntervalKind.FULL_PERIODIC_LINE:
            return PERIODIC
        if _is_detail_line(self.axis, iv):
            return EndClosures(ZeroFill(), ZeroFill())
        if iv.kind is IntervalKind.WIDE:
            return EndClosures(self.wide_end(iv.left, iv.start_index), self.wide_end(iv.right, iv.end_index))
        return self.hermite(iv)


def _lines(data, axis):
    """View whose first index runs along ``axis``; writes go through to ``data``."""
    return data if axis is Axis.X else data.T


def _pass(data, grid, spec, axis, provider, inverse, threads, radii):
    axis = Axis(axis)
    view = _lines(data, axis)
    n = grid.n
    intervals = [iv for line in grid.intervals[axis] for iv in line]

    def buffer(iv):
        return LineBuffer(view[iv.indices(n), iv.line_index], offset=iv.start_index, h=grid.h)

    def store(iv, buf):
        view[iv.indices(n), iv.line_index] = buf.values

    def closure_kind(iv):
        return PERIODIC if iv.kind is IntervalKind.FULL_PERIODIC_LINE else EndClosures(ZeroFill(), ZeroFill())

    def unlift(iv):
        return unlift_line(buffer(iv), spec, closure_kind(iv))

    def step(pair):
        iv, closures = pair
        if inverse:
            return unpredict_line(buffer(iv), spec, closures)
        return fwt_line(buffer(iv), spec, closures)

    if inverse:
        for iv, buf in zip(intervals, _map(unlift, intervals, threads)):
            store(iv, buf)

    # closures only read the snapshot
    builder = _ClosureBuilder(grid, spec, axis, data.copy(), provider, radii)
    pairs = list(zip(intervals, _map(builder, intervals, threads)))
    for iv, buf in zip(intervals, _map(step, pairs, threads)):
        store(iv, buf)


def _prepare(values, grid):
    data = np.array(values, dtype=float, copy=True)
    if data.shape != grid.dims:
        raise ConfigurationError(f'Field shape {data.shape} does not match grid {grid.dims}')
    data[~grid.mask] = np.nan
    return data


def fwt2d(values, grid, spec, provider=None, threads=None, radii=None):
    """
    One forward level: fine values on ``grid`` -> CoefficientField.

    ``provider(x, y)`` returns Dirichlet boundary values; when given, odd
    boundary-adjacent ends of wide intervals use Type II closures.
    """
    data = _prepare(values, grid)
    threads = _resolve_threads(threads)
    if grid.order != spec.order:
        grid = grid.with_order(spec.order)
    _pass(data, grid, spec, Axis.X, provider, False, threads, radii)
    _pass(data, grid, spec, Axis.Y, provider, False, threads, radii)
    return CoefficientField(data=data, grid=grid, spec=spec)


def iwt2d(coeffs, provider=None, threads=None, radii=None):
    """Inverse of fwt2d with the same provider: returns fine values (NaN outside)."""
    data = _prepare(coeffs.data, coeffs.grid)
    threads = _resolve_threads(threads)
    _pass(data, coeffs.grid, coeffs.spec, Axis.Y, provider, True, threads, radii)
    _pass(data, coeffs.grid, coeffs.spec, Axis.X, provider, True, threads, radii)
    return data


def scaling_to_coarse(coeffs, coarse_grid):
    """lambda restricted to the coarse grid (outside coarse points set to NaN)."""
    values = coeffs.scaling
    values[~coarse_grid.mask] = np.nan
    return values


def decompose(values, grid, spec, levels, provider=None, threads=None, radii=None):
    """Apply ``levels`` consecutive forward transforms, finest first."""
    if levels < 1:
        raise ConfigurationError('At least one level is required')
    if grid.order != spec.order:
        grid = grid.with_order(spec.order)
    fields = []
    current = values
    for _ in range(levels):
        coeffs = fwt2d(current, grid, spec, provider, threads, radii)
        fields.append(coeffs)
        grid = grid.coarsen()
        current = scaling_to_coarse(coeffs, grid)
        logger.debug('Level %d: max detail %.3e', coeffs.level, coeffs.max_detail)
    return Pyramid(fields=fields, coarse_values=current, coarse_grid=grid)


def reconstruct(pyramid, eps=0.0, provider=None, threads=None, radii=None):
    """
    Drop details with |gamma| < eps and invert the pyramid.

    Returns (fine values, active count) where the active count is the number
    of coarse scaling values plus surviving details.
    """
    current = pyramid.coarse_values
    active = int(pyramid.coarse_grid.mask.sum())
    for coeffs in reversed(pyramid.fields):
        kept, surviving = coeffs.thresholded(eps)
        active += surviving
        coarse_inside = kept.class_mask('lambda')[::2, ::2]
        kept.data[::2, ::2] = np.where(coarse_inside, current, np.nan)
        current = iwt2d(kept, provider, threads, radii)
    return current, active
