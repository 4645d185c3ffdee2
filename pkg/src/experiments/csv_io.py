"""
CSV I/O Module
Field snapshots, long-form tables and expected-value files.
Numbers are written in shortest round-trip form so reruns are byte-identical.
"""

import logging
import os
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..utils.error_handler import (
    ErrorCodes, ConfigurationError, LatticeBoltzmannError, AcceptanceError
)

logger = logging.getLogger(__name__)

COORDINATE_NAMES = ('x1', 'x2', 'x3')
EXPECTED_COLUMNS = ['metric', 'expected', 'tolerance', 'kind']
EXPECTED_KINDS = ('abs', 'rel', 'max')


def _ensure_parent(path: str):
    parent = os.path.dirname(os.path.abspath(path))
    try:
        os.makedirs(parent, exist_ok=True)
    except OSError as e:
        raise LatticeBoltzmannError(ErrorCodes.DIRECTORY_CREATION_FAILED,
                                    f"Cannot create directory {parent}: {e}")


def write_frame(path: str, frame: pd.DataFrame) -> str:
    """Write a frame without index using round-trip float formatting"""
    _ensure_parent(path)
    try:
        frame.to_csv(path, index=False, lineterminator='\n')
    except OSError as e:
        raise LatticeBoltzmannError(ErrorCodes.FILE_WRITE_ERROR, f"Cannot write {path}: {e}")
    logger.debug(f"Wrote {len(frame)} rows to {path}")
    return path


def read_frame(path: str) -> pd.DataFrame:
    if not os.path.exists(path):
        raise LatticeBoltzmannError(ErrorCodes.FILE_NOT_FOUND, f"File not found: {path}")
    try:
        return pd.read_csv(path, float_precision='round_trip')
    except (OSError, ValueError, pd.errors.ParserError) as e:
        raise LatticeBoltzmannError(ErrorCodes.FILE_READ_ERROR, f"Cannot read {path}: {e}")


def field_frame(coordinates: Sequence[np.ndarray], U: np.ndarray) -> pd.DataFrame:
    """Columns x1..xD then U, nodes in C order"""
    U = np.asarray(U, dtype=float)
    data = {}
    for name, coord in zip(COORDINATE_NAMES, coordinates):
        data[name] = np.asarray(coord, dtype=float).ravel()
    data['U'] = U.ravel()
    return pd.DataFrame(data)


def write_field(path: str, coordinates: Sequence[np.ndarray], U: np.ndarray) -> str:
    """Field snapshot; coordinates are full-shape mesh arrays"""
    return write_frame(path, field_frame(coordinates, U))


def read_field(path: str) -> Tuple[List[np.ndarray], np.ndarray]:
    """Flat coordinate columns and U as written by write_field"""
    frame = read_frame(path)
    if 'U' not in frame.columns:
        raise LatticeBoltzmannError(ErrorCodes.FILE_READ_ERROR, f"{path} has no U column")
    coordinates = [frame[name].to_numpy() for name in COORDINATE_NAMES if name in frame.columns]
    return coordinates, frame['U'].to_numpy()


def write_table(path: str, rows: List[Dict[str, Any]], columns: Sequence[str]) -> str:
    return write_frame(path, pd.DataFrame(rows, columns=list(columns)))


def write_summary(path: str, summary: Dict[str, float]) -> str:
    rows = [{'metric': metric, 'value': float(value)} for metric, value in summary.items()]
    return write_table(path, rows, ['metric', 'value'])


def read_expected(path: str) -> pd.DataFrame:
    """Expected-value rows (metric, expected, tolerance, kind)"""
    if not os.path.exists(path):
        raise ConfigurationError(ErrorCodes.FILE_NOT_FOUND, f"Expected-values file not found: {path}")
    frame = read_frame(path)
    missing = [c for c in EXPECTED_COLUMNS if c not in frame.columns]
    if missing:
        raise ConfigurationError(ErrorCodes.MISSING_REQUIRED_FIELD,
                                 f"{path} lacks column(s) {missing}")
    bad_kinds = sorted(set(frame['kind']) - set(EXPECTED_KINDS))
    if bad_kinds:
        raise ConfigurationError(ErrorCodes.INVALID_VALUE,
                                 f"{path}: unknown comparison kind(s) {bad_kinds}",
                                 context={'available': list(EXPECTED_KINDS)})
    return frame


def compare_metric(value: float, expected: float, tolerance: float, kind: str) -> bool:
    """abs: |v - e| <= tol; rel: |v - e| <= tol |e|; max: v <= e + tol"""
    if kind == 'abs':
        return abs(value - expected) <= tolerance
    if kind == 'rel':
        return abs(value - expected) <= tolerance * abs(expected)
    return value <= expected + tolerance


def check_expected(summary: Dict[str, float], expected: pd.DataFrame,
                   source: Optional[str] = None) -> List[Dict[str, Any]]:
    """
    Compare summary metrics against expected rows.
    Raises AcceptanceError listing every failed or missing metric.
    """
    results = []
    failures = []
    for row in expected.itertuples(index=False):
        if row.metric not in summary:
            failures.append(f"{row.metric}: not produced by the run")
            results.append({'metric': row.metric, 'value': None, 'passed': False})
            continue
        value = float(summary[row.metric])
        passed = compare_metric(value, float(row.expected), float(row.tolerance), row.kind)
        results.append({'metric': row.metric, 'value': value, 'expected': float(row.expected),
                        'tolerance': float(row.tolerance), 'kind': row.kind, 'passed': passed})
        if not passed:
            failures.append(f"{row.metric}: {value!r} vs expected {row.expected!r} "
                            f"({row.kind}, tolerance {row.tolerance!r})")

    if failures:
        code = (ErrorCodes.EXPECTED_METRIC_MISSING
                if all(f.endswith('not produced by the run') for f in failures)
                else ErrorCodes.ACCEPTANCE_CHECK_FAILED)
        raise AcceptanceError(code, f"{len(failures)} acceptance check(s) failed" +
                              (f" against {source}" if source else "") + ":\n  " +
                              "\n  ".join(failures),
                              context={'results': results})
    return results
