"""
One-dimensional lifted interpolating wavelet transforms on lines and intervals.

A line buffer stores fine-level values in place; after the forward
transform even global indices hold scaling coefficients and odd global
indices hold details. Intervals that end at the immersed boundary are
closed by polynomial ghost values:

- Type I: degree N-1 extrapolation from N coarse inside values
- Type II: the same using the Dirichlet boundary value and N-1 inside values
  (only when the boundary-adjacent index is odd)
- Hermite: one degree N-1 polynomial matching inside values plus boundary
  values/derivatives at both ends, for intervals with fewer than 2N points
- zero fill: ghost values are 0 (lines that carry detail coefficients)
"""

import enum
import functools
from fractions import Fraction

import attrs
import numpy as np
import scipy.linalg

from .exceptions import ConfigurationError, InsufficientPoints, SingularVandermonde

DUAL_LIFTING_TAPS = {
    2: (Fraction(1, 2), Fraction(1, 2)),
    4: (Fraction(-1, 16), Fraction(9, 16), Fraction(9, 16), Fraction(-1, 16)),
    6: (
        Fraction(3, 256), Fraction(-25, 256), Fraction(75, 128),
        Fraction(75, 128), Fraction(-25, 256), Fraction(3, 256),
    ),
}


class LineSide(enum.Enum):
    LEFT = 'left'
    RIGHT = 'right'


@attrs.frozen
class WaveletSpec:
    """Interpolating wavelet of order N with lifting order N-tilde ("N.Ntilde")."""
    order: int = attrs.field(validator=attrs.validators.in_((2, 4, 6)))
    lifting: int = attrs.field(default=0, validator=attrs.validators.in_((0, 2)))

    @property
    def dual_taps(self):
        return np.array([float(tap) for tap in DUAL_LIFTING_TAPS[self.order]])

    @property
    def primal_taps(self):
        if self.lifting == 0:
            return np.zeros(0)
        return np.array([float(tap) / 2 for tap in DUAL_LIFTING_TAPS[self.lifting]])

    @property
    def ghost_width(self):
        return self.order // 2

    @property
    def basis_size(self):
        """Dimension of bivariate polynomials of degree N-1."""
        return self.order * (self.order + 1) // 2

    @classmethod
    def parse(cls, text):
        try:
            order, _, lifting = str(text).partition('.')
            return cls(int(order), int(lifting or 0))
        except (TypeError, ValueError) as exc:
            raise ConfigurationError(f"Invalid wavelet '{text}', expected one of 2.0 ... 6.2") from exc

    def __str__(self):
        return f'{self.order}.{self.lifting}'


ALL_WAVELETS = tuple(WaveletSpec(order, lifting) for order in (2, 4, 6) for lifting in (0, 2))


# --- Buffers and closures ---

@attrs.define
class LineBuffer:
    """
    Values of one interval (or a full periodic line).

    ``offset`` is the global fine index of ``values[0]``; indices may run past
    the line length for intervals crossing the periodic seam, parity is kept.
    """
    values: np.ndarray = attrs.field(converter=lambda v: np.array(v, dtype=float))
    offset: int = 0
    h: float = 1.0

    @property
    def first(self):
        return self.offset

    @property
    def last(self):
        return self.offset + len(self.values) - 1


@attrs.frozen
class Periodic:
    pass


@attrs.frozen
class TypeI:
    pass


@attrs.frozen
class TypeII:
    """Extrapolation through the boundary value; ``psi`` is the fine-grid fraction."""
    boundary_value: float
    psi: float


@attrs.frozen
class ZeroFill:
    pass


@attrs.frozen
class DerivativeData:
    """
    Boundary data at one control point.

    ``coordinate`` is in the caller's line frame; ``derivatives[j - 1]`` is
    the j-th derivative along the line in that frame's physical units.
    """
    coordinate: float
    value: float = None
    derivatives: tuple = ()


@attrs.frozen
class Hermite:
    left: DerivativeData
    right: DerivativeData


@attrs.frozen
class EndClosures:
    left: object = TypeI()
    right: object = TypeI()


PERIODIC = Periodic()


# --- Polynomial helpers ---

def _monomial_row(xi, derivative, degree):
    powers = np.arange(degree + 1)
    row = np.zeros(degree + 1)
    valid = powers >= derivative
    falling = np.ones(degree + 1)
    for d in range(derivative):
        falling = falling * (powers - d)
    row[valid] = falling[valid] * float(xi) ** (powers[valid] - derivative)
    return row


def _solve_square(rows, rhs):
    matrix = np.asarray(rows, dtype=float)
    coef, _, rank, _ = scipy.linalg.lstsq(matrix, np.asarray(rhs, dtype=float), lapack_driver='gelsy')
    if rank < matrix.shape[1]:
        raise SingularVandermonde(f'Extrapolation system has rank {rank} < {matrix.shape[1]}')
    return coef


def _lagrange_weights(nodes, targets):
    """Matrix mapping values at ``nodes`` to the interpolant's values at ``targets``."""
    nodes = np.asarray(nodes, dtype=float)
    targets = np.asarray(targets, dtype=float)
    degree = len(nodes) - 1
    origin = nodes[0]
    vander = np.array([_monomial_row(x - origin, 0, degree) for x in nodes])
    inverse = _solve_square(vander, np.eye(len(nodes)))
    evaluate = np.array([_monomial_row(x - origin, 0, degree) for x in targets])
    return evaluate @ inverse


@functools.lru_cache(maxsize=None)
def _type1_weights(order):
    return _lagrange_weights(np.arange(order), -np.arange(1, order // 2 + 1))


def _orient(outward, side):
    """Ghosts ordered outward from the boundary -> array order on ``side``."""
    return outward[::-1] if LineSide(side) is LineSide.LEFT else outward


def extrapolate_type1(lam_near, side):
    """
    Ghost values from the degree N-1 interpolant of N coarse values.

    ``lam_near`` is in array order (boundary value first on the left side,
    last on the right side); the N/2 ghosts are returned in array order.
    """
    values = np.asarray(lam_near, dtype=float)
    order = len(values)
    inward = values if LineSide(side) is LineSide.LEFT else values[::-1]
    return _orient(_type1_weights(order) @ inward, side)


def extrapolate_type2(lam_near, boundary_value, psi, side):
    """
    Ghost values from the interpolant through the boundary value and N-1 coarse values.

    ``psi`` is the distance between the boundary and the first coarse inside
    value, in coarse grid units.
    """
    values = np.asarray(lam_near, dtype=float)
    order = len(values) + 1
    if not psi > 0:
        raise SingularVandermonde('Boundary value coincides with an inside value', operation='extrapolate_type2')
    inward = values if LineSide(side) is LineSide.LEFT else values[::-1]
    nodes = np.concatenate([[-float(psi)], np.arange(order - 1)])
    weights = _lagrange_weights(nodes, -np.arange(1, order // 2 + 1))
    return _orient(weights @ np.concatenate([[boundary_value], inward]), side)


def hermite_polynomial(inside, left, right, order, inside_coords=None):
    """
    Coefficients (and origin) of the single degree N-1 polynomial q matching
    inside values, then left and right boundary values/derivatives.
    """
    inside = np.asarray(inside, dtype=float)
    k = len(inside)
    coords = np.arange(k, dtype=float) if inside_coords is None else np.asarray(inside_coords, dtype=float)
    degree = order - 1
    origin = coords[0] if k else left.coordinate
    rows, rhs = [], []
    for xi, value in zip(coords, inside):
        rows.append(_monomial_row(xi - origin, 0, degree))
        rhs.append(value)
    for data in (left, right):
        if data.value is not None:
            rows.append(_monomial_row(data.coordinate - origin, 0, degree))
            rhs.append(data.value)
        for j, derivative in enumerate(data.derivatives, start=1):
            rows.append(_monomial_row(data.coordinate - origin, j, degree))
            rhs.append(derivative)
    if len(rows) != order:
        raise SingularVandermonde(
            f'Hermite closure needs exactly {order} conditions, got {len(rows)}',
            operation='extrapolate_hermite',
        )
    try:
        return _solve_square(rows, rhs), origin
    except SingularVandermonde as exc:
        raise SingularVandermonde(str(exc), operation='extrapolate_hermite') from exc


def extrapolate_hermite(inside, left, right, spec, inside_coords=None, ghost_coords=None):
    """
    Ghost values on both ends from one Hermite-like interpolant.

    Coordinates default to coarse units with inside values at 0..k-1 and
    N/2 ghosts on each side (left ghosts first, both in array order).
    """
    k = len(inside)
    width = spec.ghost_width
    if ghost_coords is None:
        ghost_coords = np.concatenate([np.arange(-width, 0), np.arange(k, k + width)])
    coef, origin = hermite_polynomial(inside, left, right, spec.order, inside_coords)
    rows = np.array([_monomial_row(x - origin, 0, spec.order - 1) for x in np.asarray(ghost_coords, dtype=float)])
    return rows @ coef


def allocate_hermite_conditions(inside_count, left_odd, right_odd, order):
    """
    Split the N - k boundary conditions of a narrow interval.

    Boundary values are used only at ends whose adjacent index is odd; the
    remaining derivatives are split evenly with the extra one on the left.
    Returns (left_value, left_derivatives, right_value, right_derivatives).
    """
    slots = order - inside_count
    left_value = bool(left_odd) and slots > 0
    slots -= int(left_value)
    right_value = bool(right_odd) and slots > 0
    slots -= int(right_value)
    left_derivatives = (slots + 1) // 2
    right_derivatives = slots // 2
    return left_value, left_derivatives, right_value, right_derivatives


# --- Transform ---

def _coarse_range(buf):
    first, last = buf.first, buf.last
    return -(-first // 2), last // 2


def _split(buf):
    idx = np.arange(len(buf.values)) + buf.offset
    even = idx % 2 == 0
    return even, ~even, idx


def _ghosts(lam, buf, spec, closures, A):
    order, width = spec.order, spec.ghost_width
    k = len(lam)

    if isinstance(closures, Hermite):
        scale = 2.0 * buf.h

        def local(data):
            return DerivativeData(
                coordinate=data.coordinate / 2.0 - A,
                value=data.value,
                derivatives=tuple(d * scale ** j for j, d in enumerate(data.derivatives, start=1)),
            )

        ghosts = extrapolate_hermite(lam, local(closures.left), local(closures.right), spec)
        return ghosts[:width], ghosts[width:]

    if not isinstance(closures, EndClosures):
        raise ConfigurationError(f'Unsupported line closure {closures!r}')

    needs_points = not (isinstance(closures.left, ZeroFill) and isinstance(closures.right, ZeroFill))
    if needs_points and len(buf.values) < 2 * order:
        raise InsufficientPoints(f'Extrapolated interval needs {2 * order} points, has {len(buf.values)}')

    def end(closure, side):
        if isinstance(closure, ZeroFill):
            return np.zeros(width)
        if isinstance(closure, TypeI):
            near = lam[:order] if side is LineSide.LEFT else lam[k - order:]
            return extrapolate_type1(near, side)
        if isinstance(closure, TypeII):
            boundary_index = buf.first if side is LineSide.LEFT else buf.last
            if boundary_index % 2 == 0:
                raise ConfigurationError('Type II closure requires an odd boundary-adjacent index')
            near = lam[:order - 1] if side is LineSide.LEFT else lam[k - order + 1:]
            return extrapolate_type2(near, closure.boundary_value, (1.0 + closure.psi) / 2.0, side)
        raise ConfigurationError(f'Unsupported end closure {closure!r}')

    return end(closures.left, LineSide.LEFT), end(closures.right, LineSide.RIGHT)


def _prediction(buf, spec, closures):
    """Interpolated values at the odd entries of ``buf`` from its even entries."""
    even, odd, idx = _split(buf)
    lam = buf.values[even]
    taps = spec.dual_taps
    width = spec.ghost_width
    if isinstance(closures, Periodic):
        ext = np.pad(lam, (width - 1, width), mode='wrap')
        return np.correlate(ext, taps, mode='valid')
    A, _ = _coarse_range(buf)
    left, right = _ghosts(lam, buf, spec, closures, A)
    ext = np.concatenate([left, lam, right])
    pred = np.correlate(ext, taps, mode='valid')
    m = (idx[odd] - 1) // 2
    return pred[m - A + 1]


def _update(buf, spec, closures):
    """Lifting correction for the even entries from the odd entries (zero outside)."""
    even, odd, idx = _split(buf)
    taps = spec.primal_taps
    gam = buf.values[odd]
    half = spec.lifting // 2
    if isinstance(closures, Periodic):
        ext = np.pad(gam, (half, half - 1), mode='wrap')
        return np.correlate(ext, taps, mode='valid')
    A, B = _coarse_range(buf)
    ext = np.zeros(B - A + spec.lifting)
    m = (idx[odd] - 1) // 2
    ext[m - (A - half)] = gam
    return np.correlate(ext, taps, mode='valid')


def _check_periodic(buf, closures):
    if isinstance(closures, Periodic) and (buf.offset % 2 or len(buf.values) % 2):
        raise ConfigurationError('Periodic lines need an even length and offset')


def fwt_line(buf, spec, closures):
    """Forward one-level transform of ``buf`` in place (predict, then lift)."""
    _check_periodic(buf, closures)
    even, odd, _ = _split(buf)
    if odd.any():
        buf.values[odd] -= _prediction(buf, spec, closures)
    if spec.lifting and even.any() and odd.any():
        buf.values[even] += _update(buf, spec, closures)
    return buf


def unlift_line(buf, spec, closures=PERIODIC):
    """First inverse phase: remove the lifting correction from the even entries."""
    even, odd, _ = _split(buf)
    if spec.lifting and even.any() and odd.any():
        buf.values[even] -= _update(buf, spec, closures)
    return buf


def unpredict_line(buf, spec, closures):
    """Second inverse phase: restore odd entries from details and extrapolated scaling values."""
    _, odd, _ = _split(buf)
    if odd.any():
        buf.values[odd] += _prediction(buf, spec, closures)
    return buf


def iwt_line(buf, spec, closures):
    """Inverse one-level transform of ``buf`` in place."""
    _check_periodic(buf, closures)
    return unpredict_line(unlift_line(buf, spec, closures), spec, closures)
