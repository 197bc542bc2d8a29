"""
Persistence: IWF1 field files, run configs, CSV reports and log-log plots.

IWF1 layout (little-endian, see docs/iwf1.md):

    b'IWF1' | uint32 nx, ny, level | uint8 first mask value | uint32 run count
    | uint32 run lengths | uint64 inside count | float64 inside values

The mask is run-length encoded in row-major order over [i, j].
"""

import json
import logging
from pathlib import Path

import attrs
import jsonschema
import matplotlib
import numpy as np
import pandas as pd
import yaml

matplotlib.use('Agg')
import matplotlib.pyplot as plt  # noqa: E402

from .exceptions import ConfigurationError, FormatError, MaskMismatch, NonPositiveValue  # noqa: E402
from .schemas import GEOMETRY_SCHEMA, RUN_CONFIG_SCHEMA  # noqa: E402

logger = logging.getLogger(__name__)

MAGIC = b'IWF1'
HEADER = np.dtype([('nx', '<u4'), ('ny', '<u4'), ('level', '<u4'), ('first', 'u1'), ('runs', '<u4')])
FLOAT_FORMAT = '%.17g'


# --- IWF1 fields ---

@attrs.frozen(eq=False)
class FieldFile:
    values: np.ndarray
    mask: np.ndarray
    level: int

    @property
    def inside_count(self):
        return int(self.mask.sum())


def encode_mask(mask):
    """(first value, run lengths) of the row-major flattened mask."""
    flat = np.asarray(mask, dtype=bool).ravel()
    if flat.size == 0:
        return False, np.zeros(0, dtype=np.uint32)
    change = np.flatnonzero(flat[1:] != flat[:-1]) + 1
    bounds = np.concatenate([[0], change, [flat.size]])
    return bool(flat[0]), np.diff(bounds).astype(np.uint32)


def decode_mask(first, runs, shape):
    runs = np.asarray(runs, dtype=np.int64)
    if runs.sum() != shape[0] * shape[1]:
        raise FormatError(f'Mask runs cover {runs.sum()} points, expected {shape[0] * shape[1]}')
    states = (np.arange(len(runs)) % 2 == 0) == bool(first)
    return np.repeat(states, runs).reshape(shape)


def write_field(path, values, grid):
    """Write the inside values of ``values`` on ``grid`` as IWF1."""
    values = np.asarray(values, dtype=float)
    mask = grid.mask
    if values.shape != mask.shape:
        raise MaskMismatch(f'Field shape {values.shape} does not match grid {mask.shape}')
    first, runs = encode_mask(mask)
    header = np.zeros(1, dtype=HEADER)
    header[0] = (mask.shape[0], mask.shape[1], grid.level, int(first), len(runs))
    payload = b''.join([
        MAGIC,
        header.tobytes(),
        runs.astype('<u4').tobytes(),
        np.array([mask.sum()], dtype='<u8').tobytes(),
        values[mask].astype('<f8').tobytes(),
    ])
    Path(path).write_bytes(payload)
    logger.debug('Wrote %s: level %d, %d inside values', path, grid.level, int(mask.sum()))


def read_field(path, grid=None):
    """
    Read an IWF1 file. With ``grid`` the stored mask must match its mask
    and level; outside points of the returned values hold NaN.
    """
    data = Path(path).read_bytes()
    if data[:4] != MAGIC:
        raise FormatError(f'{path}: bad magic {data[:4]!r}, expected {MAGIC!r}')
    cursor = 4
    try:
        header = np.frombuffer(data, dtype=HEADER, count=1, offset=cursor)[0]
        cursor += HEADER.itemsize
        run_count = int(header['runs'])
        runs = np.frombuffer(data, dtype='<u4', count=run_count, offset=cursor)
        cursor += 4 * run_count
        inside = int(np.frombuffer(data, dtype='<u8', count=1, offset=cursor)[0])
        cursor += 8
        stored = np.frombuffer(data, dtype='<f8', count=inside, offset=cursor)
        cursor += 8 * inside
    except ValueError as exc:
        raise FormatError(f'{path}: truncated file') from exc
    if cursor != len(data):
        raise FormatError(f'{path}: {len(data) - cursor} trailing bytes')
    shape = (int(header['nx']), int(header['ny']))
    mask = decode_mask(header['first'], runs, shape)
    if int(mask.sum()) != inside:
        raise FormatError(f'{path}: header inside count {inside} != mask count {int(mask.sum())}')
    level = int(header['level'])
    if grid is not None:
        if grid.level != level or grid.mask.shape != shape or not np.array_equal(grid.mask, mask):
            raise MaskMismatch(f'{path}: stored mask does not match the level {grid.level} grid')
    values = np.full(shape, np.nan)
    values[mask] = stored
    return FieldFile(values=values, mask=mask, level=level)


# --- Run configs ---

@attrs.frozen
class RunConfig:
    """Validated run config; sections default to empty dicts."""
    data: dict = attrs.field(factory=dict)

    def section(self, name):
        return dict(self.data.get(name, {}))

    def get(self, name, default=None):
        return self.data.get(name, default)

    @property
    def geometry(self):
        return self.data.get('geometry')

    @property
    def wavelet(self):
        return self.data.get('wavelet')


def validate_run_config(data):
    try:
        jsonschema.validate(data, RUN_CONFIG_SCHEMA, cls=jsonschema.Draft202012Validator)
    except jsonschema.ValidationError as exc:
        location = '/'.join(str(p) for p in exc.absolute_path) or '<root>'
        raise ConfigurationError(f'Invalid run config at {location}: {exc.message}') from exc
    return RunConfig(data)


def load_run_config(path):
    """Load a YAML or JSON run config and validate it."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigurationError(f'Cannot read config {path}: {exc}') from exc
    try:
        data = yaml.safe_load(text) or {}
    except yaml.YAMLError as exc:
        raise ConfigurationError(f'Cannot parse config {path}: {exc}') from exc
    if not isinstance(data, dict):
        raise ConfigurationError(f'Config {path} must hold a mapping')
    return validate_run_config(data)


def parse_geometry(text):
    """Level-set description from inline JSON or a JSON/YAML file path."""
    candidate = Path(text)
    try:
        is_file = candidate.is_file()
    except OSError:
        is_file = False
    try:
        data = yaml.safe_load(candidate.read_text()) if is_file else json.loads(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise ConfigurationError(f'Invalid geometry description: {exc}') from exc
    try:
        jsonschema.validate(data, GEOMETRY_SCHEMA, cls=jsonschema.Draft202012Validator)
    except jsonschema.ValidationError as exc:
        raise ConfigurationError(f'Invalid geometry description: {exc.message}') from exc
    return data


# --- Reports ---

def write_csv(rows, path):
    """Write a DataFrame or a list of dicts with full float precision."""
    frame = rows if isinstance(rows, pd.DataFrame) else pd.DataFrame(list(rows))
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    return frame


def read_pairs(path, x='h', y='value'):
    """(x, y) pairs from a CSV with a header row."""
    try:
        frame = pd.read_csv(path, float_precision='round_trip')
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise ConfigurationError(f'Cannot read {path}: {exc}') from exc
    missing = {x, y} - set(frame.columns)
    if missing:
        raise ConfigurationError(f'{path} lacks column(s) {", ".join(sorted(missing))}')
    return list(zip(frame[x].astype(float), frame[y].astype(float)))


def emit_loglog_plot(series, path, guide_slope=1.0, xlabel='x', ylabel='y', title=None):
    """
    Deterministic SVG log-log plot of ``series`` ({label: (x, y)}) with a
    reference slope guide through the first series.
    """
    if not series:
        raise NonPositiveValue('Nothing to plot', operation='emit_loglog_plot')
    prepared = []
    for label, (x, y) in series.items():
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.size == 0 or x.shape != y.shape:
            raise NonPositiveValue(f"Series '{label}' is empty or ragged", operation='emit_loglog_plot')
        if np.any(x <= 0) or np.any(y <= 0) or not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise NonPositiveValue(f"Series '{label}' has non-positive values", operation='emit_loglog_plot')
        prepared.append((label, x, y))

    with matplotlib.rc_context({'svg.hashsalt': 'waveletgrid', 'svg.fonttype': 'none'}):
        fig, ax = plt.subplots(figsize=(5.0, 4.0))
        for label, x, y in prepared:
            ax.loglog(x, y, marker='o', label=label)
        if guide_slope is not None:
            _, x0, y0 = prepared[0]
            xs = np.array([x0.min(), x0.max()])
            anchor = y0[np.argmin(x0)]
            ax.loglog(xs, anchor * (xs / xs[0]) ** guide_slope, 'k--', linewidth=0.8, label=f'slope {guide_slope:g}')
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title)
        ax.grid(True, which='both', linewidth=0.3)
        ax.legend()
        fig.savefig(path, format='svg', metadata={'Date': None})
        plt.close(fig)
    logger.debug('Wrote plot %s', path)
