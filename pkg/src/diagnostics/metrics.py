"""
Diagnostics Metrics Module
Total variation, error norms, convergence orders, conservation sums,
positivity scans and convex-combination H monitoring
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Sequence, Union

import numpy as np

from ..utils.error_handler import ErrorCodes, FluxDomainError

logger = logging.getLogger(__name__)

H_FUNCTIONS: Dict[str, Callable[[np.ndarray], np.ndarray]] = {
    'square': lambda f: f * f,
    'abs': np.abs,
}


@dataclass
class NormReport:
    """L2 error of one resolution of a convergence study"""
    N: int
    dx: float
    l2: float
    order: Optional[float] = None


def total_variation(field, periodic: bool = False, axis: Optional[int] = None) -> float:
    """
    sum_i |theta_{i+1} - theta_i| along one axis, summed over all lines.
    With axis=None every axis contributes.
    """
    field = np.asarray(field, dtype=float)
    axes = range(field.ndim) if axis is None else [axis]
    total = 0.0
    for ax in axes:
        if periodic:
            jumps = np.roll(field, -1, axis=ax) - field
        else:
            jumps = np.diff(field, axis=ax)
        total += float(np.sum(np.abs(jumps)))
    return total


def total_variation_by_axis(field, periodic: bool = False) -> List[float]:
    """Per-axis total variation of a 2D/3D field"""
    field = np.asarray(field, dtype=float)
    return [total_variation(field, periodic=periodic, axis=ax) for ax in range(field.ndim)]


def l2_error(numeric, reference, dx: Optional[float] = None, normalization: str = 'count') -> float:
    """
    Discrete L2 error.

    'count' (default) is sqrt(sum e_i^2) / n over the n compared nodes, the
    convention of the published Burgers convergence tables. 'dx' is
    sqrt(sum e_i^2 * dx^D).
    """
    numeric = np.asarray(numeric, dtype=float)
    reference = np.asarray(reference, dtype=float)
    if numeric.shape != reference.shape:
        raise FluxDomainError(ErrorCodes.SHAPE_MISMATCH,
                              f"Field shapes differ: {numeric.shape} vs {reference.shape}")
    squared = float(np.sum((numeric - reference) ** 2))

    if normalization == 'count':
        return math.sqrt(squared) / numeric.size
    if normalization == 'dx':
        if dx is None:
            raise FluxDomainError(ErrorCodes.VALUE_OUT_OF_RANGE, "dx-weighted L2 needs dx")
        return math.sqrt(squared * dx ** numeric.ndim)
    raise FluxDomainError(ErrorCodes.VALUE_OUT_OF_RANGE, f"Unknown normalization: {normalization}")


def convergence_order(reports: Sequence[NormReport]) -> List[float]:
    """Pairwise orders log(e_coarse/e_fine) / log(dx_coarse/dx_fine)"""
    if len(reports) < 2:
        raise FluxDomainError(ErrorCodes.NON_MONOTONE_SPACING,
                              "Convergence order needs at least two resolutions")
    orders = []
    for coarse, fine in zip(reports[:-1], reports[1:]):
        if not fine.dx < coarse.dx:
            raise FluxDomainError(ErrorCodes.NON_MONOTONE_SPACING,
                                  f"Spacing must decrease: {coarse.dx} then {fine.dx}")
        order = math.log(coarse.l2 / fine.l2) / math.log(coarse.dx / fine.dx)
        fine.order = order
        orders.append(order)
    return orders


def conserved_sum(U, cell_volume: float = 1.0) -> float:
    """Serial reduction sum_i U_i dV"""
    return float(np.sum(np.asarray(U, dtype=float).ravel())) * cell_volume


def positivity_scan(U, tolerance: float = 0.0) -> Dict[str, Any]:
    """Minimum of U and the first node below -tolerance"""
    U = np.asarray(U, dtype=float)
    violations = np.argwhere(U < -tolerance)
    first = tuple(int(i) for i in violations[0]) if violations.size else None
    if first is not None and U.ndim == 1:
        first = first[0]
    return {
        'passed': first is None,
        'min_value': float(np.min(U)) if U.size else 0.0,
        'first_violation': first,
        'violation_count': int(len(violations))
    }


def h_monitor(f, f_eq, f_star, omega_hat: float,
              H: Union[str, Callable[[np.ndarray], np.ndarray]] = 'square') -> Dict[str, Any]:
    """
    Nodewise check of H(f*) <= (1 - omega_hat) H(f) + omega_hat H(f^eq)
    for the post-collision populations (streaming only permutes them).
    """
    H_fn = H_FUNCTIONS[H] if isinstance(H, str) else H
    f = np.asarray(f, dtype=float)
    f_eq = np.asarray(f_eq, dtype=float)
    f_star = np.asarray(f_star, dtype=float)

    excess = H_fn(f_star) - ((1.0 - omega_hat) * H_fn(f) + omega_hat * H_fn(f_eq))
    violation = np.maximum(excess, 0.0)
    return {
        'omega_hat': omega_hat,
        'H': H if isinstance(H, str) else getattr(H, '__name__', 'custom'),
        'max_violation': float(np.max(violation)) if violation.size else 0.0,
        'violations': int(np.count_nonzero(excess > 1e-14)),
        'theorem_applies': 0.0 < omega_hat <= 1.0
    }


def discontinuity_location(x, U) -> float:
    """Midpoint of the largest jump between neighbouring nodes"""
    x = np.asarray(x, dtype=float)
    jumps = np.abs(np.diff(np.asarray(U, dtype=float)))
    i = int(np.argmax(jumps))
    return 0.5 * (x[i] + x[i + 1])


def level_crossings(x, U, level: float = 0.5) -> List[float]:
    """Linearly interpolated positions where U crosses the level"""
    x = np.asarray(x, dtype=float)
    shifted = np.asarray(U, dtype=float) - level
    crossings = []
    for i in range(len(x) - 1):
        a, b = shifted[i], shifted[i + 1]
        if a == 0.0:
            crossings.append(float(x[i]))
        elif a * b < 0.0:
            crossings.append(float(x[i] + (x[i + 1] - x[i]) * a / (a - b)))
    if len(x) and shifted[-1] == 0.0:
        crossings.append(float(x[-1]))
    return crossings


def shock_location(x, U) -> float:
    """
    Sub-cell position of the largest jump: the linearly interpolated crossing
    of the mean of the states one node outside the jump. A steady shock with
    an intermediate node then sits on that node instead of either interface.
    """
    x = np.asarray(x, dtype=float)
    U = np.asarray(U, dtype=float)
    i = int(np.argmax(np.abs(np.diff(U))))
    lo, hi = max(i - 1, 0), min(i + 2, len(U) - 1)
    level = 0.5 * (U[lo] + U[hi])
    crossings = level_crossings(x[lo:hi + 1], U[lo:hi + 1], level)
    middle = 0.5 * (x[i] + x[i + 1])
    if not crossings:
        return middle
    return min(crossings, key=lambda c: abs(c - middle))
