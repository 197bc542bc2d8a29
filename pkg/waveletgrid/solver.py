"""
Reference immersed diffusion solver: u_t = lap(u) + s on the domain with
time-dependent Dirichlet data on the body, coupled to temporal adaptation.

The Laplacian uses the fourth-order five-point stencil per axis. Points
whose stencil crosses the boundary read two ghost layers filled from
constrained least-squares polynomials (boundary value exact), so the
operator is linear in (u, g):

    lap(u) = A u + B g(t)

with A and B assembled once per grid level as sparse matrices.
"""

import logging
import time as timer

import attrs
import numpy as np
import scipy.sparse

from .adaptation import adapt_cycle
from .conf import wavelet_settings
from .exceptions import ConfigurationError, UnstableStep
from .geometry import Axis, ImmersedGrid, IntervalKind, empty_levelset, levelset_from_config
from .stencil import ghost_weights

logger = logging.getLogger(__name__)

FOURTH_ORDER_WEIGHTS = {-2: -1.0 / 12, -1: 16.0 / 12, 0: -30.0 / 12, 1: 16.0 / 12, 2: -1.0 / 12}

RK3_A = (0.0, -5.0 / 9.0, -153.0 / 128.0)
RK3_B = (1.0 / 3.0, 15.0 / 16.0, 8.0 / 15.0)
RK3_C = (0.0, 1.0 / 3.0, 3.0 / 4.0)


def mollifier(t):
    """Smooth step from 0 (t <= 0) to 1 (t >= 1)."""
    t = np.asarray(t, dtype=float)
    inner = np.clip(t, 1e-12, 1 - 1e-12)
    a = np.exp(-1.0 / inner)
    b = np.exp(-1.0 / (1.0 - inner))
    value = np.where(t <= 0, 0.0, np.where(t >= 1, 1.0, a / (a + b)))
    return float(value) if value.ndim == 0 else value


@attrs.frozen
class DiffusionProblem:
    """
    ``boundary(x, y, t)``, ``initial(x, y)`` and ``source(x, y, t)`` are
    vectorised; the diffusivity is 1.
    """
    levelset: object
    boundary: object
    initial: object
    final_time: float
    source: object = None
    fourier: float = None
    name: str = 'custom'

    @property
    def fourier_number(self):
        return self.fourier if self.fourier is not None else wavelet_settings.SOLVER['FOURIER']


def star_diffusion_problem(final_time=5.0, levelset=None, lobes=5):
    """Star body with g = sin(5 theta) chi(5 t) and a quiescent start."""
    if levelset is None:
        levelset = levelset_from_config(wavelet_settings.GEOMETRY)

    def boundary(x, y, t):
        return np.sin(lobes * levelset.theta(x, y)) * mollifier(5.0 * t)

    return DiffusionProblem(
        levelset=levelset,
        boundary=boundary,
        initial=lambda x, y: np.zeros(np.broadcast(x, y).shape),
        final_time=final_time,
        name='star',
    )


def free_decay_problem(final_time=0.01, wavenumber=1):
    """No body; u0 = sin(2 pi k x) sin(2 pi k y) decays as exp(-8 pi^2 k^2 t)."""
    omega = 2 * np.pi * wavenumber

    def exact(x, y, t):
        return np.exp(-2 * omega ** 2 * t) * np.sin(omega * x) * np.sin(omega * y)

    return DiffusionProblem(
        levelset=empty_levelset(),
        boundary=exact,
        initial=lambda x, y: exact(x, y, 0.0),
        final_time=final_time,
        name='free-decay',
    )


@attrs.define(eq=False)
class ImmersedLaplacian:
    grid: object
    A: object
    B: object
    numbering: np.ndarray
    control_points: list

    @property
    def size(self):
        return self.A.shape[0]

    def boundary_vector(self, boundary, t):
        if not self.control_points:
            return np.zeros(0)
        positions = np.array([cp.position for cp in self.control_points])
        return np.asarray(boundary(positions[:, 0], positions[:, 1], t), dtype=float) * np.ones(len(positions))

    def apply(self, u, g):
        result = self.A @ u
        if self.B.shape[1]:
            result += self.B @ g
        return result

    def flatten(self, values):
        return np.asarray(values, dtype=float)[self.grid.mask]

    def unflatten(self, vector):
        values = np.full(self.grid.dims, np.nan)
        values[self.grid.mask] = vector
        return values


def assemble_laplacian(grid, order=None, radii=None):
    """Sparse (A, B) of the immersed fourth-order Laplacian on ``grid``."""
    order = grid.order if order is None else order
    rn, rt = radii or (None, None)
    n, h = grid.n, grid.h
    numbering = np.full(grid.dims, -1, dtype=np.int64)
    numbering[grid.mask] = np.arange(grid.inside_count)
    control_points = grid.control_points_all()
    cp_column = {id(cp): k for k, cp in enumerate(control_points)}
    scale = 1.0 / h ** 2

    rows, cols, vals = [], [], []
    brows, bcols, bvals = [], [], []

    def point(axis, line, index):
        index = index % n
        return (index, line) if axis is Axis.X else (line, index)

    for axis in Axis:
        for line_intervals in grid.intervals[axis]:
            for iv in line_intervals:
                span = iv.indices(n)
                length = len(span)
                ghosts = {}
                for side, cp, anchor, step in (('left', iv.left, iv.start_index, -1), ('right', iv.right, iv.end_index, 1)):
                    if cp is None:
                        continue
                    # ghost positions, unwrapped along the line
                    along = np.array([anchor + step, anchor + 2 * step], dtype=float) * h
                    across = np.full(2, iv.line_index * h)
                    targets = np.stack([along, across] if axis is Axis.X else [across, along], axis=1)
                    indices, inside_w, boundary_w = ghost_weights(cp, grid, targets, order=order, rn=rn, rt=rt)
                    ghosts[side] = (numbering[indices[:, 0], indices[:, 1]], inside_w, boundary_w, cp_column[id(cp)])

                periodic = iv.kind is IntervalKind.FULL_PERIODIC_LINE
                for t in range(length):
                    row = numbering[point(axis, iv.line_index, span[t])]
                    for offset, weight in FOURTH_ORDER_WEIGHTS.items():
                        w = weight * scale
                        pos = t + offset
                        if periodic or 0 <= pos < length:
                            rows.append(row)
                            cols.append(numbering[point(axis, iv.line_index, span[pos % length])])
                            vals.append(w)
                            continue
                        side, k = ('left', -pos - 1) if pos < 0 else ('right', pos - length)
                        stencil_cols, inside_w, boundary_w, column = ghosts[side]
                        rows.extend([row] * len(stencil_cols))
                        cols.extend(stencil_cols.tolist())
                        vals.extend((w * inside_w[k]).tolist())
                        brows.append(row)
                        bcols.append(column)
                        bvals.append(w * boundary_w[k])

    size = grid.inside_count
    A = scipy.sparse.csr_matrix((vals, (rows, cols)), shape=(size, size))
    B = scipy.sparse.csr_matrix((bvals, (brows, bcols)), shape=(size, len(control_points)))
    logger.debug('Assembled Laplacian at level %d: %d unknowns, %d nonzeros', grid.level, size, A.nnz + B.nnz)
    return ImmersedLaplacian(grid=grid, A=A, B=B, numbering=numbering, control_points=control_points)


def laplacian(field, grid, boundary, t=0.0, operator=None):
    """Immersed Laplacian of ``field`` (indexed [i, j], NaN outside) with boundary data ``boundary(x, y, t)``."""
    operator = operator or assemble_laplacian(grid)
    result = operator.apply(operator.flatten(field), operator.boundary_vector(boundary, t))
    return operator.unflatten(result)


def _rhs(operator, problem, u, t, source_points):
    value = operator.apply(u, operator.boundary_vector(problem.boundary, t))
    if problem.source is not None:
        value = value + np.asarray(problem.source(source_points[0], source_points[1], t), dtype=float)
    return value


def step_rk3(u, t, dt, problem, operator, scale=1.0):
    """One low-storage three-stage Runge-Kutta step of the flattened field ``u``."""
    x, y = operator.grid.coordinates()
    source_points = (x[operator.grid.mask], y[operator.grid.mask])
    u = np.array(u, dtype=float, copy=True)
    q = np.zeros_like(u)
    for a, b, c in zip(RK3_A, RK3_B, RK3_C):
        q = a * q + dt * _rhs(operator, problem, u, t + c * dt, source_points)
        u = u + b * q
    limit = wavelet_settings.SOLVER['BLOWUP_FACTOR'] * max(scale, 1.0)
    peak = float(np.max(np.abs(u))) if u.size else 0.0
    if not np.isfinite(peak) or peak > limit:
        raise UnstableStep(f'max|u| = {peak:.3e} exceeds {limit:.3e} at t = {t + dt:.6g}')
    return u


@attrs.frozen
class SeriesPoint:
    step: int
    time: float
    level: int
    max_detail: float
    dt: float


@attrs.define(eq=False)
class RunRecord:
    series: list
    events: list
    values: np.ndarray
    grid: object
    wall_time: float

    @property
    def final_time(self):
        return self.series[-1].time if self.series else 0.0


class _OperatorCache:
    def __init__(self, order, radii):
        self.order = order
        self.radii = radii
        self.operators = {}

    def get(self, grid):
        operator = self.operators.get(grid.level)
        if operator is None or operator.grid is not grid:
            operator = assemble_laplacian(grid, self.order, self.radii)
            self.operators[grid.level] = operator
        return operator


def _integrate(problem, spec, grid, state=None, threads=None, dt=None, radii=None):
    start = timer.perf_counter()
    cache = _OperatorCache(spec.order, radii)
    values = grid.sample(problem.initial)
    scale = max(1.0, float(np.nanmax(np.abs(values))) if grid.inside_count else 1.0)
    t, step = 0.0, 0
    series, events = [], []
    final_time = float(problem.final_time)
    while t < final_time * (1 - 1e-12):
        operator = cache.get(grid)
        step_dt = dt if dt is not None else problem.fourier_number * grid.h ** 2
        step_dt = min(step_dt, final_time - t)
        u = step_rk3(operator.flatten(values), t, step_dt, problem, operator, scale)
        values = operator.unflatten(u)
        t += step_dt
        step += 1
        max_detail = float('nan')
        if state is not None and step % state.cadence == 0:
            provider = _boundary_at(problem, t)
            values, grid, event = adapt_cycle(values, grid, spec, state, time=t, provider=provider, threads=threads)
            events.append(event)
            max_detail = event.max_detail
        series.append(SeriesPoint(step=step, time=t, level=grid.level, max_detail=max_detail, dt=step_dt))
    wall_time = timer.perf_counter() - start
    logger.info(
        '%s run finished: t=%.6g, %d steps, level %d, %d adaptation events, %.2fs',
        problem.name, t, step, grid.level, len(events), wall_time,
    )
    return RunRecord(series=series, events=events, values=values, grid=grid, wall_time=wall_time)


def _boundary_at(problem, t):
    def provider(x, y):
        return problem.boundary(x, y, t)
    return provider


def run_fixed(problem, spec, level, dt=None, radii=None):
    """Integrate to the final time without adaptation (reference runs)."""
    grid = ImmersedGrid.build(problem.levelset, level, order=spec.order)
    return _integrate(problem, spec, grid, dt=dt, radii=radii)


def run_adaptive(problem, spec, state, threads=None, radii=None):
    """
    Integrate to the final time, adapting every ``state.cadence`` steps.

    Each AdaptationEvent carries the max detail measured before its level
    change, at the level it was decided on (``level_before``), together with
    that level's thresholds.
    """
    if spec.order != 4 + state.k:
        logger.warning(
            'Wavelet order N=%d differs from 4 + k = %d for the fourth-order discretisation',
            spec.order, 4 + state.k,
        )
    if state.level != state.base_level:
        raise ConfigurationError('Adaptive runs start at the base level')
    grid = ImmersedGrid.build(problem.levelset, state.level, order=spec.order)
    return _integrate(problem, spec, grid, state=state, threads=threads, radii=radii)


def compare_fields(record, reference):
    """
    L-infinity and RMS error of ``record`` against a finer or equal ``reference``
    over points inside at both resolutions.
    """
    grid, ref_grid = record.grid, reference.grid
    if ref_grid.level < grid.level:
        raise ConfigurationError(
            f'Reference level {ref_grid.level} is coarser than the compared level {grid.level}'
        )
    stride = 2 ** (ref_grid.level - grid.level)
    ref_values = reference.values[::stride, ::stride]
    common = grid.mask & ref_grid.mask[::stride, ::stride]
    if not common.any():
        return {'linf': 0.0, 'l2': 0.0, 'points': 0}
    diff = record.values[common] - ref_values[common]
    return {
        'linf': float(np.max(np.abs(diff))),
        'l2': float(np.sqrt(np.mean(diff ** 2))),
        'points': int(common.sum()),
    }
