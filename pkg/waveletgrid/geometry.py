"""
Immersed geometry on the periodic unit box.

The excluded body E is the region where the level set is negative; the
domain Omega is where it is positive. Grid arrays are indexed ``[i, j]``
with ``i`` along x and ``j`` along y, point (i, j) sitting at (i h, j h).
"""

import enum
import logging

import attrs
import numpy as np

from .conf import wavelet_settings
from .exceptions import ConfigurationError, DegenerateGradient, NonConvergedRoot

logger = logging.getLogger(__name__)


class Axis(enum.IntEnum):
    X = 0
    Y = 1


class Side(enum.Enum):
    """Where a control point sits relative to its adjacent inside point."""
    LEFT = 'left'
    RIGHT = 'right'


class IntervalKind(enum.Enum):
    FULL_PERIODIC_LINE = 'full'
    WIDE = 'wide'
    NARROW = 'narrow'


# --- Level sets ---

@attrs.frozen
class LevelSet:
    """
    Continuous scalar function on [0,1)^2, negative inside the body.

    ``func`` and ``gradient`` take coordinate arrays (x, y) and must be
    vectorised; ``gradient`` returns the pair (d/dx, d/dy) or is None, in
    which case normals use central differences.
    """
    func: object
    gradient: object = None
    name: str = 'custom'
    center: tuple = (0.5, 0.5)

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return np.asarray(self.func(x, y), dtype=float) * np.ones(np.broadcast(x, y).shape)

    def theta(self, x, y):
        """Polar angle about the level-set centre."""
        return np.arctan2(np.asarray(y) - self.center[1], np.asarray(x) - self.center[0])


def star_levelset(center=(0.51, 0.51), r0=0.3, amp=0.04, lobes=5):
    """phi(r, theta) = r - (r0 + amp sin(lobes theta)) about ``center``."""
    x0, y0 = float(center[0]), float(center[1])

    def func(x, y):
        dx, dy = x - x0, y - y0
        return np.hypot(dx, dy) - (r0 + amp * np.sin(lobes * np.arctan2(dy, dx)))

    def gradient(x, y):
        dx, dy = x - x0, y - y0
        r = np.hypot(dx, dy)
        theta = np.arctan2(dy, dx)
        with np.errstate(divide='ignore', invalid='ignore'):
            wave = amp * lobes * np.cos(lobes * theta) / r ** 2
            gx = dx / r + wave * dy
            gy = dy / r - wave * dx
        return gx, gy

    return LevelSet(func=func, gradient=gradient, name='star', center=(x0, y0))


def circle_levelset(center=(0.5, 0.5), r=0.25):
    """phi = |x - center| - r: the disc is excluded."""
    x0, y0 = float(center[0]), float(center[1])

    def func(x, y):
        return np.hypot(x - x0, y - y0) - r

    def gradient(x, y):
        dx, dy = x - x0, y - y0
        dist = np.hypot(dx, dy)
        with np.errstate(divide='ignore', invalid='ignore'):
            return dx / dist, dy / dist

    return LevelSet(func=func, gradient=gradient, name='circle', center=(x0, y0))


DISC_CLUSTER = ((0.45, 0.45), (0.55, 0.45), (0.45, 0.55), (0.55, 0.55))


def discs_levelset(centers=DISC_CLUSTER, r=0.04):
    """
    Union of equal discs; phi is the distance to the nearest disc surface.

    The default cluster leaves gaps of 0.02 between neighbours along both
    axes, so grid lines through the gaps carry narrow intervals.
    """
    centers = [(float(cx), float(cy)) for cx, cy in centers]

    def offsets(x, y):
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        dx = np.stack([x - cx for cx, _ in centers])
        dy = np.stack([y - cy for _, cy in centers])
        return dx, dy, np.hypot(dx, dy)

    def func(x, y):
        return offsets(x, y)[2].min(axis=0) - r

    def gradient(x, y):
        dx, dy, dist = offsets(x, y)
        nearest = dist.argmin(axis=0)[None]
        dx, dy, dist = (np.take_along_axis(a, nearest, axis=0)[0] for a in (dx, dy, dist))
        with np.errstate(divide='ignore', invalid='ignore'):
            return dx / dist, dy / dist

    center = tuple(np.mean(centers, axis=0).tolist())
    return LevelSet(func=func, gradient=gradient, name='discs', center=center)


def empty_levelset():
    """No body: every grid point is inside."""
    return LevelSet(
        func=lambda x, y: np.ones(np.broadcast(x, y).shape),
        gradient=lambda x, y: (np.zeros(np.broadcast(x, y).shape), np.zeros(np.broadcast(x, y).shape)),
        name='none',
    )


def levelset_from_config(config):
    """Build a builtin level set from its run-config dict (already schema-checked)."""
    kind = config.get('kind', 'none')
    if kind == 'star':
        return star_levelset(
            center=config.get('center', (0.51, 0.51)),
            r0=config.get('r0', 0.3),
            amp=config.get('amp', 0.04),
            lobes=config.get('lobes', 5),
        )
    if kind == 'circle':
        return circle_levelset(center=config.get('center', (0.5, 0.5)), r=config.get('r', 0.25))
    if kind == 'discs':
        return discs_levelset(centers=config.get('centers', DISC_CLUSTER), r=config.get('r', 0.04))
    if kind == 'none':
        return empty_levelset()
    raise ConfigurationError(f"Unknown geometry kind '{kind}'")


# --- Grid types ---

@attrs.frozen
class ControlPoint:
    """Intersection of the boundary with one grid line."""
    position: tuple
    axis: Axis
    line_index: int
    adjacent_inside_index: int
    outside_index: int
    side: Side
    psi: float
    normal: tuple

    @property
    def parity(self):
        return self.adjacent_inside_index % 2

    @property
    def line_coordinate(self):
        """Position along the line in grid-index units, relative to the adjacent index."""
        if self.side is Side.LEFT:
            return self.adjacent_inside_index - self.psi
        return self.adjacent_inside_index + self.psi


@attrs.frozen
class Interval1D:
    """
    Maximal run of inside points on one grid line.

    ``end_index`` is unwrapped: an interval crossing the periodic seam has
    ``end_index >= n`` and its points are ``indices % n``.
    """
    axis: Axis
    line_index: int
    start_index: int
    end_index: int
    kind: IntervalKind
    left: ControlPoint = None
    right: ControlPoint = None

    @property
    def length(self):
        return self.end_index - self.start_index + 1

    def indices(self, n):
        return np.arange(self.start_index, self.end_index + 1) % n


@attrs.frozen(eq=False)
class ImmersedGrid:
    level: int
    levelset: LevelSet
    order: int
    mask: np.ndarray
    phi: np.ndarray
    snap_tolerance: float
    control_points: dict = attrs.field(factory=dict)
    intervals: dict = attrs.field(factory=dict)

    @property
    def n(self):
        return 2 ** self.level

    @property
    def h(self):
        return 2.0 ** -self.level

    @property
    def dims(self):
        return (self.n, self.n)

    @property
    def inside_count(self):
        return int(self.mask.sum())

    def coordinates(self):
        x = np.arange(self.n) * self.h
        return np.meshgrid(x, x, indexing='ij')

    def sample(self, func):
        """Evaluate ``func(x, y)`` on inside points; outside points hold NaN."""
        x, y = self.coordinates()
        values = np.full(self.dims, np.nan)
        values[self.mask] = np.broadcast_to(np.asarray(func(x, y), dtype=float), self.dims)[self.mask]
        return values

    def line_intervals(self, axis, line):
        return self.intervals[Axis(axis)][line]

    def narrow_intervals(self, axis):
        return [iv for line in self.intervals[Axis(axis)] for iv in line if iv.kind is IntervalKind.NARROW]

    def near_boundary_mask(self, width=3.0):
        """Points within ``width`` grid spacings of the boundary (|phi| / |grad phi|)."""
        if not self.control_points_all():
            return np.zeros(self.dims, dtype=bool)
        x, y = self.coordinates()
        gx, gy = _gradient(self.levelset, x, y)
        norm = np.maximum(np.hypot(gx, gy), 1e-12)
        return np.abs(self.phi) / norm <= width * self.h

    def control_points_all(self):
        return [cp for axis in Axis for cp in self.control_points.get(axis, [])]

    def coarsen(self):
        """Level L-1 grid whose mask is the even-even subsample of this one."""
        if self.level <= 2:
            raise ConfigurationError('Cannot coarsen below level 2')
        coarse = ImmersedGrid(
            level=self.level - 1,
            levelset=self.levelset,
            order=self.order,
            mask=self.mask[::2, ::2].copy(),
            phi=self.phi[::2, ::2].copy(),
            snap_tolerance=self.snap_tolerance,
        )
        return _finish(coarse)

    def with_order(self, order):
        if order == self.order:
            return self
        return _finish(attrs.evolve(self, order=order, control_points={}, intervals={}))

    @classmethod
    def build(cls, levelset, level, order=6, snap_tolerance=None):
        return _finish(classify_points(levelset, level, order=order, snap_tolerance=snap_tolerance))


# --- Operations ---

def classify_points(levelset, L, order=6, snap_tolerance=None):
    """
    Sample the level set and split grid points into inside/outside.

    Points with |phi| below ``snap_tolerance * h`` are classified outside so
    that no inside point sits arbitrarily close to the boundary.
    """
    if L < 2:
        raise ConfigurationError(f'Grid level must be at least 2, got {L}')
    if snap_tolerance is None:
        snap_tolerance = wavelet_settings.SNAP_TOLERANCE
    n = 2 ** L
    h = 1.0 / n
    x = np.arange(n) * h
    xx, yy = np.meshgrid(x, x, indexing='ij')
    phi = levelset(xx, yy)
    mask = phi >= snap_tolerance * h
    return ImmersedGrid(
        level=L,
        levelset=levelset,
        order=order,
        mask=mask,
        phi=phi,
        snap_tolerance=snap_tolerance,
    )


def _finish(grid):
    control_points = {axis: find_control_points(grid.levelset, grid, axis) for axis in Axis}
    grid = attrs.evolve(grid, control_points=control_points)
    intervals = {axis: enumerate_intervals(grid, axis) for axis in Axis}
    grid = attrs.evolve(grid, intervals=intervals)
    logger.debug(
        'Grid level %d: %d inside points, %d/%d control points, %d/%d narrow intervals',
        grid.level, grid.inside_count,
        len(control_points[Axis.X]), len(control_points[Axis.Y]),
        len(grid.narrow_intervals(Axis.X)), len(grid.narrow_intervals(Axis.Y)),
    )
    return grid


def _along(axis, t, line_coord):
    """Coordinates of points at parameter t on a line of the given axis."""
    if axis is Axis.X:
        return t, line_coord
    return line_coord, t


def find_control_points(levelset, grid, axis):
    """
    Locate boundary crossings between adjacent grid points of every line.

    Each inside/outside transition yields one control point found by
    vectorised bisection (or placed on the outside point when that point was
    snapped). Sorted by line, then by position along the line.
    """
    axis = Axis(axis)
    n, h = grid.n, grid.h
    tol = wavelet_settings.ROOT_TOLERANCE
    max_iter = wavelet_settings.ROOT_MAX_ITER

    # lines along axis: m[i_along, line]
    m = grid.mask if axis is Axis.X else grid.mask.T
    phi = grid.phi if axis is Axis.X else grid.phi.T
    nxt = np.roll(m, -1, axis=0)
    along, line = np.nonzero(m != nxt)
    if along.size == 0:
        return []

    left_inside = m[along, line]
    inside_idx = np.where(left_inside, along, along + 1)
    outside_idx = np.where(left_inside, along + 1, along)
    line_coord = line * h
    t_in = inside_idx * h
    t_out = outside_idx * h
    phi_out = phi[outside_idx % n, line]
    phi_in = phi[inside_idx % n, line]

    if np.any(phi_in <= 0):
        raise NonConvergedRoot('Inside point with non-positive level set; mask and level set disagree')

    snapped = phi_out > 0
    lo = t_in.copy()
    hi = t_out.copy()
    active = ~snapped
    for _ in range(max_iter):
        if not active.any():
            break
        mid = 0.5 * (lo + hi)
        x, y = _along(axis, np.mod(mid, 1.0), line_coord)
        pm = levelset(x, y)
        positive = pm > 0
        lo = np.where(active & positive, mid, lo)
        hi = np.where(active & ~positive, mid, hi)
        active &= np.abs(hi - lo) > tol
    if active.any():
        raise NonConvergedRoot(f'Bisection did not reach {tol:g} within {max_iter} iterations')

    t_c = np.where(snapped, t_out, 0.5 * (lo + hi))
    psi = np.abs(t_c - t_in) / h
    xc, yc = _along(axis, np.mod(t_c, 1.0), line_coord)
    nx, ny = _unit_gradient(levelset, xc, yc)

    points = []
    order = np.lexsort((t_c, line))
    for k in order:
        points.append(ControlPoint(
            position=(float(xc[k]), float(yc[k])),
            axis=axis,
            line_index=int(line[k]),
            adjacent_inside_index=int(inside_idx[k] % n),
            outside_index=int(outside_idx[k] % n),
            side=Side.RIGHT if left_inside[k] else Side.LEFT,
            psi=float(min(psi[k], 1.0)),
            normal=(float(nx[k]), float(ny[k])),
        ))
    return points


def _gradient(levelset, x, y):
    if levelset.gradient is not None:
        gx, gy = levelset.gradient(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        return np.asarray(gx, dtype=float), np.asarray(gy, dtype=float)
    eps = wavelet_settings.GRADIENT_STEP
    gx = (levelset(x + eps, y) - levelset(x - eps, y)) / (2 * eps)
    gy = (levelset(x, y + eps) - levelset(x, y - eps)) / (2 * eps)
    return gx, gy


def _unit_gradient(levelset, x, y):
    gx, gy = _gradient(levelset, x, y)
    norm = np.hypot(gx, gy)
    if np.any(~np.isfinite(norm)) or np.any(norm < 1e-10):
        raise DegenerateGradient('Level-set gradient vanishes at a boundary point')
    return gx / norm, gy / norm


def compute_normal(levelset, x):
    """Unit normal grad(phi)/|grad(phi)| at ``x``; points from the body into the domain."""
    px, py = float(x[0]), float(x[1])
    nx, ny = _unit_gradient(levelset, np.array([px]), np.array([py]))
    return np.array([nx[0], ny[0]])


def enumerate_intervals(grid, axis):
    """Split every line of ``axis`` into full, wide (>= 2N points) or narrow intervals."""
    axis = Axis(axis)
    n = grid.n
    m = grid.mask if axis is Axis.X else grid.mask.T
    lookup = {
        (cp.line_index, cp.adjacent_inside_index, cp.side): cp
        for cp in grid.control_points.get(axis, [])
    }
    wide_threshold = 2 * grid.order

    per_line = []
    for line in range(n):
        inside = m[:, line]
        if inside.all():
            per_line.append([Interval1D(axis, line, 0, n - 1, IntervalKind.FULL_PERIODIC_LINE)])
            continue
        if not inside.any():
            per_line.append([])
            continue
        starts = np.nonzero(inside & ~np.roll(inside, 1))[0]
        ends = np.nonzero(inside & ~np.roll(inside, -1))[0]
        intervals = []
        for s in starts:
            k = np.searchsorted(ends, s)
            e = ends[k] if k < len(ends) else ends[0] + n
            length = e - s + 1
            kind = IntervalKind.WIDE if length >= wide_threshold else IntervalKind.NARROW
            intervals.append(Interval1D(
                axis=axis,
                line_index=line,
                start_index=int(s),
                end_index=int(e),
                kind=kind,
                left=lookup[(line, int(s), Side.LEFT)],
                right=lookup[(line, int(e % n), Side.RIGHT)],
            ))
        per_line.append(intervals)
    return per_line
