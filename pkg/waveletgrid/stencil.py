"""
Half-elliptical least-squares polynomial fits at control points.

A stencil gathers inside points on the domain side of the boundary within
a distorted distance

    d_c(x) = sqrt(xi^T Sigma xi),
    Sigma = n n^T / (h r_n)^2 + (I - n n^T) / (h r_t)^2,

with xi = x - x_c (periodic minimum image) and fits a bivariate polynomial
of total degree N-1 in the local coordinates (x - x_c) / h.
"""

import logging
import math

import attrs
import numpy as np
import scipy.linalg

from .conf import wavelet_settings
from .exceptions import InsufficientStencilPoints, RankDeficient
from .geometry import Axis

logger = logging.getLogger(__name__)


def monomial_exponents(degree):
    """Exponents (a, b) of x^a y^b, ordered by total degree then by falling a."""
    return tuple((a, total - a) for total in range(degree + 1) for a in range(total, -1, -1))


def basis_dimension(order):
    return order * (order + 1) // 2


def minimum_image(delta):
    """Shortest periodic displacement on the unit box."""
    return np.mod(np.asarray(delta, dtype=float) + 0.5, 1.0) - 0.5


def _falling(power, count):
    return np.prod(np.arange(power, power - count, -1, dtype=float)) if count else 1.0


@attrs.frozen(eq=False)
class Polynomial2D:
    """sum_k c_k X^a_k Y^b_k with X = (x - cx) / scale, Y = (y - cy) / scale."""
    coefficients: np.ndarray
    exponents: tuple
    center: tuple
    scale: float

    @property
    def degree(self):
        return max(a + b for a, b in self.exponents)

    def _local(self, x, y):
        X = minimum_image(np.asarray(x, dtype=float) - self.center[0]) / self.scale
        Y = minimum_image(np.asarray(y, dtype=float) - self.center[1]) / self.scale
        return X, Y

    def derivative(self, nx=0, ny=0, x=None, y=None):
        """Physical derivative d^nx/dx^nx d^ny/dy^ny at (x, y), the centre by default."""
        if x is None:
            x, y = self.center
        X, Y = self._local(x, y)
        total = np.zeros(np.broadcast(X, Y).shape)
        for c, (a, b) in zip(self.coefficients, self.exponents):
            if a < nx or b < ny or c == 0.0:
                continue
            total = total + c * _falling(a, nx) * _falling(b, ny) * X ** (a - nx) * Y ** (b - ny)
        total = total / self.scale ** (nx + ny)
        return float(total) if total.ndim == 0 else total

    def __call__(self, x, y):
        return self.derivative(0, 0, x, y)


@attrs.frozen(eq=False)
class BoundaryStencil:
    """Point set and fitted polynomial for one control point."""
    control_point: object
    rn: float
    rt: float
    indices: np.ndarray
    polynomial: Polynomial2D = None

    @property
    def count(self):
        return len(self.indices)


def default_radii(order, solver=False):
    stencil = wavelet_settings.STENCIL
    if solver:
        rn, rt = stencil.get('SOLVER_RN'), stencil.get('SOLVER_RT')
        fallback = order
    else:
        rn, rt = stencil.get('RN'), stencil.get('RT')
        fallback = 2 * order
    return float(rn or fallback), float(rt or fallback)


def _ellipse_members(cp, grid, rn, rt, even_only):
    n, h = grid.n, grid.h
    cx, cy = cp.position
    reach = int(math.ceil(max(rn, rt))) + 1
    if 2 * reach + 1 >= n:
        ii = jj = np.arange(n)
    else:
        ii = np.arange(int(round(cx / h)) - reach, int(round(cx / h)) + reach + 1) % n
        jj = np.arange(int(round(cy / h)) - reach, int(round(cy / h)) + reach + 1) % n
    I, J = np.meshgrid(ii, jj, indexing='ij')
    I, J = I.ravel(), J.ravel()
    dx = minimum_image(I * h - cx)
    dy = minimum_image(J * h - cy)
    nx, ny = cp.normal
    normal_part = dx * nx + dy * ny
    tangent_sq = np.maximum(dx * dx + dy * dy - normal_part ** 2, 0.0)
    distance_sq = normal_part ** 2 / (h * rn) ** 2 + tangent_sq / (h * rt) ** 2
    keep = grid.mask[I, J] & (normal_part >= -1e-12 * h) & (distance_sq <= 1.0 + 1e-12)
    if even_only:
        keep &= (I % 2 == 0) & (J % 2 == 0)
    I, J = I[keep], J[keep]
    order = np.lexsort((J, I))
    return np.stack([I[order], J[order]], axis=1)


def select_ellipse_points(cp, grid, rn=None, rt=None, order=None, even_only=True):
    """
    Grid indices (m, 2) of inside points in the half-ellipse of ``cp``.

    The radii are doubled once when the set is smaller than the polynomial
    basis; InsufficientStencilPoints is raised if that is still not enough.
    """
    order = grid.order if order is None else order
    if rn is None or rt is None:
        drn, drt = default_radii(order, solver=not even_only)
        rn = drn if rn is None else rn
        rt = drt if rt is None else rt
    if rn <= 0 or rt <= 0:
        raise InsufficientStencilPoints(f'Ellipse radii must be positive, got {rn}, {rt}')
    needed = basis_dimension(order)
    points = _ellipse_members(cp, grid, rn, rt, even_only)
    if len(points) >= needed:
        return points
    logger.warning(
        'Stencil at (%.6f, %.6f) has %d < %d points, doubling radii to (%g, %g)',
        cp.position[0], cp.position[1], len(points), needed, 2 * rn, 2 * rt,
    )
    points = _ellipse_members(cp, grid, 2 * rn, 2 * rt, even_only)
    if len(points) < needed:
        raise InsufficientStencilPoints(
            f'Stencil at ({cp.position[0]:.6f}, {cp.position[1]:.6f}) has {len(points)} points, '
            f'needs {needed}'
        )
    return points


def _design_matrix(points, center, scale, exponents):
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    X = minimum_image(points[:, 0] - center[0]) / scale
    Y = minimum_image(points[:, 1] - center[1]) / scale
    return np.stack([X ** a * Y ** b for a, b in exponents], axis=1)


def _pseudo_inverse(matrix):
    """Least-squares solution operator of ``matrix`` (column-equilibrated, pivoted QR)."""
    norms = np.abs(matrix).max(axis=0)
    norms[norms == 0] = 1.0
    scaled = matrix / norms
    solution, _, rank, _ = scipy.linalg.lstsq(scaled, np.eye(matrix.shape[0]), lapack_driver='gelsy')
    if rank < matrix.shape[1]:
        raise RankDeficient(f'Stencil design matrix has rank {rank} < {matrix.shape[1]}')
    return solution / norms[:, None]


def lsq_fit(points, values, degree, center, scale, constraint=None):
    """
    Unweighted least-squares polynomial of total ``degree`` through ``values``.

    ``points`` are physical positions. With ``constraint`` the polynomial
    takes that value exactly at ``center``.
    """
    exponents = monomial_exponents(degree)
    values = np.asarray(values, dtype=float)
    matrix = _design_matrix(points, center, scale, exponents)
    if len(values) < len(exponents) - (constraint is not None):
        raise RankDeficient(f'{len(values)} points cannot determine {len(exponents)} coefficients')
    coefficients = np.zeros(len(exponents))
    if constraint is None:
        coefficients[:] = _pseudo_inverse(matrix) @ values
    else:
        coefficients[0] = constraint
        coefficients[1:] = _pseudo_inverse(matrix[:, 1:]) @ (values - constraint)
    return Polynomial2D(
        coefficients=coefficients,
        exponents=exponents,
        center=(float(center[0]), float(center[1])),
        scale=float(scale),
    )


def eval_x_derivative(poly, x=None, n=1, axis=Axis.X):
    """n-th physical derivative of ``poly`` along ``axis`` at ``x`` (centre by default)."""
    if x is None:
        x = poly.center
    if Axis(axis) is Axis.X:
        return poly.derivative(n, 0, x[0], x[1])
    return poly.derivative(0, n, x[0], x[1])


def fit_boundary_stencil(cp, grid, data, order=None, rn=None, rt=None):
    """Fit the even-index half-ellipse polynomial of ``data`` (indexed [i, j]) at ``cp``."""
    order = grid.order if order is None else order
    default_rn, default_rt = default_radii(order)
    rn = default_rn if rn is None else rn
    rt = default_rt if rt is None else rt
    indices = select_ellipse_points(cp, grid, rn, rt, order=order, even_only=True)
    poly = lsq_fit(indices * grid.h, data[indices[:, 0], indices[:, 1]], order - 1, cp.position, grid.h)
    return BoundaryStencil(control_point=cp, rn=rn, rt=rt, indices=indices, polynomial=poly)


def ghost_weights(cp, grid, targets, order=None, rn=None, rt=None):
    """
    Linear ghost extension for the diffusion solver.

    Returns ``(indices, inside_weights, boundary_weights)`` such that the
    constrained fit through the boundary value g and the stencil values u
    evaluates at ``targets`` (physical positions, shape (t, 2)) to
    ``inside_weights @ u[indices] + boundary_weights * g``.
    """
    order = grid.order if order is None else order
    indices = select_ellipse_points(cp, grid, rn, rt, order=order, even_only=False)
    exponents = monomial_exponents(order - 1)
    matrix = _design_matrix(indices * grid.h, cp.position, grid.h, exponents)
    solve = _pseudo_inverse(matrix[:, 1:])
    rows = _design_matrix(targets, cp.position, grid.h, exponents)[:, 1:]
    inside_weights = rows @ solve
    boundary_weights = 1.0 - inside_weights.sum(axis=1)
    return indices, inside_weights, boundary_weights
