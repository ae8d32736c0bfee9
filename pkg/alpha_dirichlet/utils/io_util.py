import hashlib
import io
import logging
import sys
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np
import pandas as pd
import yaml

from alpha_dirichlet.config.config import STRICT_CLOSURE_TOL, get_zero_epsilon
from alpha_dirichlet.service.simplex_service import SimplexService
from alpha_dirichlet.utils.response_error import (ConfigError, DomainError,
                                                  InputError)

ZERO_ERROR = 'error'
ZERO_EPSILON = 'epsilon'
CLOSURE_STRICT = 'strict'
CLOSURE_RENORMALIZE = 'renormalize'


@dataclass(frozen=True)
class Dataset:
    """Compositional rows read from a file, all of length D."""
    name: str
    component_labels: tuple
    rows: np.ndarray
    provenance: str = ''
    digest: str = ''

    @property
    def D(self):
        return self.rows.shape[1]


@dataclass
class RunReport:
    """Everything needed to recompute a CLI result: the command echo, its
    configuration, the input digest and the results payload."""
    command: str
    config: dict
    results: dict
    version: str
    seed: Optional[int] = None
    input_digest: str = ''
    wall_time: Optional[float] = field(default=None)

    def to_dict(self):
        report = asdict(self)
        if report['wall_time'] is None:
            del report['wall_time']
        return report


class IoUtil:
    """
    Reading of compositional CSV files and key=value configs, writing of
    CSV tables and YAML run reports.
    """

    @staticmethod
    def load_csv(path, has_header=True, zero_policy=ZERO_ERROR, epsilon=None,
                 closure=CLOSURE_STRICT, name=None):
        """Read a CSV file of compositions.
        Args:
            path: (str) File path, UTF-8, comma separated.
            has_header: (bool) First row holds component labels.
            zero_policy: (str) 'error' or 'epsilon' (replace zeros by
                epsilon and close the row).
            epsilon: (float) Replacement value of the 'epsilon' policy.
            closure: (str) 'strict' (rows must sum to 1 within 1e-3) or
                'renormalize' (divide rows by their sums).
            name: (str) Dataset name, the file name otherwise.
        Returns:
            (Dataset) Validated rows in the simplex interior.
        Raises:
            InputError: Unreadable file, ragged rows, non numeric cells or
                a strict row sum away from one.
            DomainError: Negative cells, or a zero cell under 'error'.
        """
        try:
            with open(path, 'rb') as f:
                content = f.read()
        except OSError as error:
            raise InputError(f'Cannot read {path}: {error}') from error
        try:
            text = content.decode('utf8')
        except UnicodeDecodeError as error:
            raise InputError(f'{path} is not UTF-8 text') from error
        try:
            frame = pd.read_csv(io.StringIO(text), header=None, dtype=str,
                                skipinitialspace=True, skip_blank_lines=True)
        except pd.errors.EmptyDataError:
            raise InputError(f'{path} holds no rows') from None
        except pd.errors.ParserError as error:
            raise InputError(f'{path}: ragged rows: {error}') from error
        labels = None
        if has_header:
            labels = tuple('' if pd.isna(cell) else str(cell).strip()
                           for cell in frame.iloc[0])
            frame = frame.iloc[1:]
        if frame.empty:
            raise InputError(f'{path} holds a header but no data rows')
        width = frame.shape[1]
        cells = frame.apply(lambda column: column.str.strip())
        missing = np.argwhere(cells.isna().to_numpy())
        if missing.size:
            i, j = missing[0]
            raise InputError(f'{path}: row {i + 1}, column {j + 1} is empty or '
                             f'missing')
        numeric = cells.apply(pd.to_numeric, errors='coerce')
        bad = np.argwhere(numeric.isna().to_numpy())
        if bad.size:
            i, j = bad[0]
            raise InputError(f'{path}: row {i + 1}, column {j + 1} is not '
                             f'numeric: {cells.iat[i, j]!r}')
        values = numeric.to_numpy(dtype=np.float64)
        if width < 2:
            raise InputError(f'{path}: compositions need at least two columns')
        if not np.all(np.isfinite(values)):
            raise InputError(f'{path} holds non finite cells')
        negative = np.argwhere(values < 0.0)
        if negative.size:
            i, j = negative[0]
            raise DomainError(f'{path}: row {i + 1}, column {j + 1} is negative')
        zero = np.argwhere(values == 0.0)
        if zero.size:
            if zero_policy == ZERO_ERROR:
                i, j = zero[0]
                raise DomainError(f'{path}: row {i + 1}, column {j + 1} is zero; '
                                  f'use the epsilon zero policy to replace zeros')
            if zero_policy != ZERO_EPSILON:
                raise ConfigError(f'Unknown zero policy {zero_policy!r}')
            values = SimplexService.replace_zeros(
                values, get_zero_epsilon() if epsilon is None else epsilon)
        if closure == CLOSURE_STRICT:
            sums = values.sum(axis=1)
            off = np.argwhere(np.abs(sums - 1.0) > STRICT_CLOSURE_TOL)
            if off.size:
                i = int(off[0][0])
                raise InputError(f'{path}: row {i + 1} sums to {sums[i]!r}; use '
                                 f'renormalize closure for raw amounts')
        elif closure != CLOSURE_RENORMALIZE:
            raise ConfigError(f'Unknown closure policy {closure!r}')
        rows = SimplexService.closure(values)
        if labels is None:
            labels = tuple(f'x{j + 1}' for j in range(width))
        logging.getLogger('alpha_dirichlet.io').info(
            {'file': str(path), 'rows': rows.shape[0], 'components': width})
        return Dataset(name=name or str(path), component_labels=labels,
                       rows=rows, provenance=f'read from {path}',
                       digest=hashlib.sha256(content).hexdigest())

    @staticmethod
    def read_key_values(path):
        """Read a flat key=value file; '#' starts a comment.
        Args:
            path: (str) File path.
        Returns:
            (dict) Raw string values by key.
        """
        try:
            with open(path, 'rt', encoding='utf8') as f:
                lines = f.readlines()
        except OSError as error:
            raise InputError(f'Cannot read {path}: {error}') from error
        values = {}
        for number, line in enumerate(lines, start=1):
            line = line.split('#', 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition('=')
            if not sep or not key.strip():
                raise ConfigError(f'{path}:{number}: expected key=value, got '
                                  f'{line!r}')
            if key.strip() in values:
                raise ConfigError(f'{path}:{number}: duplicate key {key.strip()!r}')
            values[key.strip()] = value.strip()
        return values

    @staticmethod
    def parse_float(value, key):
        """Strict float of a config value; a decimal point is required."""
        text = value.strip()
        if '.' not in text:
            raise ConfigError(f'{key}: {value!r} needs an explicit decimal point')
        try:
            return float(text)
        except ValueError:
            raise ConfigError(f'{key}: {value!r} is not a number') from None

    @staticmethod
    def parse_floats(value, key):
        return [IoUtil.parse_float(part, key) for part in value.split(',')]

    @staticmethod
    def parse_int(value, key):
        try:
            return int(value.strip())
        except ValueError:
            raise ConfigError(f'{key}: {value!r} is not an integer') from None

    @staticmethod
    def write_csv(header, rows, out=None):
        """Write a CSV table, floats in shortest round-trip form.
        Args:
            header: (list) Column names.
            rows: (iterable) Rows of cells.
            out: (str) Output path, stdout otherwise.
        """
        frame = pd.DataFrame([[_cell(cell) for cell in row] for row in rows],
                             columns=list(header), dtype=object)
        _emit(frame.to_csv(index=False, lineterminator='\n'), out)

    @staticmethod
    def write_report(report, out=None):
        """Write a run report as YAML with sorted keys."""
        text = yaml.safe_dump(_plain(report.to_dict()), sort_keys=True,
                              default_flow_style=False)
        _emit(text, out)

    @staticmethod
    def file_digest(path):
        """sha256 hex digest of a file's bytes."""
        try:
            with open(path, 'rb') as f:
                return hashlib.sha256(f.read()).hexdigest()
        except OSError as error:
            raise InputError(f'Cannot read {path}: {error}') from error


def _cell(value):
    if value is None:
        return ''
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _plain(value):
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, np.generic):
        return value.item()
    return value


def _emit(text, out):
    if out is None or out == '-':
        sys.stdout.write(text)
        return
    try:
        with open(out, 'wt', encoding='utf8', newline='') as f:
            f.write(text)
    except OSError as error:
        raise InputError(f'Cannot write {out}: {error}') from error
