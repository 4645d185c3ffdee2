"""
Macroscopic Finite-Difference Oracle Module
Rebuilds U^{n+1} of a kinetic run from its equilibrium history as a
(1 - omega_hat)-geometric combination of widened upwind updates, and checks
consistency, total-variation and positivity properties on that form
"""

import logging
import math
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from ..diagnostics.metrics import total_variation
from ..flux_models.fluxes import ScalarFlux
from ..lattice_models.equilibria import LatticeModel
from ..lattice_models.velocity_sets import lambda_vector, shift_field
from ..utils.error_handler import ErrorCodes, SolverError

logger = logging.getLogger(__name__)

DEFAULT_DEPTH_CAP = 64


class HistoryLevel:
    """Macroscopic data of one time level"""

    def __init__(self, U: np.ndarray, lam: np.ndarray, dt: float, splits=None):
        self.U = U
        self.lam = lam
        self.dt = dt
        self.splits = splits


class MacroHistory:
    """Levels n-N .. n recorded since the last equilibrium initialization"""

    def __init__(self, model: LatticeModel, fluxes: Sequence[ScalarFlux], omega_hat: float,
                 dx: float, depth_cap: int = DEFAULT_DEPTH_CAP):
        self.model = model
        self.fluxes = list(fluxes)
        self.omega_hat = float(omega_hat)
        self.dx = float(dx)
        self.depth_cap = int(depth_cap)
        self.levels: List[HistoryLevel] = []

    @property
    def depth(self) -> int:
        """N: number of steps since initialization"""
        return len(self.levels) - 1

    @property
    def at_capacity(self) -> bool:
        return len(self.levels) > self.depth_cap

    def clear(self):
        self.levels = []

    def record(self, U: np.ndarray, lam, dt: float):
        """Store U^n with its split fluxes (split-form models only)"""
        lam_vec = lambda_vector(lam, self.model.dimension)
        U = np.array(U, dtype=float, copy=True)
        splits = None
        if self.model.supports_split_form:
            splits = [
                (direction, G_plus, G_minus, self.model.component_speed(direction, lam_vec))
                for direction, G_plus, G_minus in self.model.directional_splits(U, self.fluxes)
            ]
        self.levels.append(HistoryLevel(U, lam_vec, float(dt), splits))


def _require_depth(history: MacroHistory, k: int):
    if not history.levels:
        raise SolverError(ErrorCodes.INSUFFICIENT_HISTORY, "Oracle history is empty")
    if k < 0 or k > history.depth:
        raise SolverError(ErrorCodes.INSUFFICIENT_HISTORY,
                          f"Offset k={k} needs history depth >= {k}, have {history.depth}",
                          context={'k': k, 'depth': history.depth})


def underlying_field(history: MacroHistory, k: int) -> np.ndarray:
    """
    Widened upwind update of level n-k over the whole grid.

    Split-form models use
        U - (1/lambda) sum_l [(G+_x - G+_{x-(k+1)e_l}) - (G-_{x+(k+1)e_l} - G-_x)],
    the other models the equivalent sum_q f^eq_q(x - (k+1) m_q).
    """
    _require_depth(history, k)
    level = history.levels[-1 - k]
    width = k + 1

    if level.splits is not None:
        result = level.U.copy()
        for direction, G_plus, G_minus, speed in level.splits:
            upstream = shift_field(G_plus, width, direction)
            downstream = shift_field(G_minus, -width, direction)
            result = result - ((G_plus - upstream) - (downstream - G_minus)) / speed
        return result

    feq = history.model.equilibrium(level.U, history.fluxes, level.lam)
    result = np.zeros_like(level.U)
    for q, offset in enumerate(history.model.offsets):
        result = result + shift_field(feq[q], width, offset)
    return result


def underlying_update(history: MacroHistory, i, k: int) -> float:
    """Widened upwind update of level n-k at node i"""
    return float(underlying_field(history, k)[i])


def reconstruction_weights(omega_hat: float, N: int) -> np.ndarray:
    """omega_hat (1-omega_hat)^k for k < N, then (1-omega_hat)^N"""
    k = np.arange(N + 1, dtype=float)
    weights = omega_hat * np.power(1.0 - omega_hat, k)
    weights[N] = (1.0 - omega_hat) ** N
    return weights


def weight_sum(omega_hat: float, N: int) -> float:
    return math.fsum(reconstruction_weights(omega_hat, N))


def multistep_field(history: MacroHistory) -> np.ndarray:
    """U^{n+1} over the whole grid from the multi-step form"""
    _require_depth(history, 0)
    N = history.depth
    weights = reconstruction_weights(history.omega_hat, N)
    total = np.zeros_like(history.levels[-1].U)
    for k in range(N + 1):
        total = total + weights[k] * underlying_field(history, k)
    return total


def multistep_reconstruct(history: MacroHistory, i) -> float:
    """U_i^{n+1} from the multi-step form"""
    return float(multistep_field(history)[i])


def _centered_derivative(field: np.ndarray, axis: int, dx: float) -> np.ndarray:
    """Fourth-order centered difference on a periodic grid"""
    return (-np.roll(field, -2, axis=axis) + 8.0 * np.roll(field, -1, axis=axis)
            - 8.0 * np.roll(field, 1, axis=axis) + np.roll(field, 2, axis=axis)) / (12.0 * dx)


def consistency_residual_field(history: MacroHistory, reconstruction: np.ndarray) -> np.ndarray:
    """|dU/dt + div G| with a time-centered flux divergence"""
    _require_depth(history, 0)
    level = history.levels[-1]
    reconstruction = np.asarray(reconstruction, dtype=float)
    time_derivative = (reconstruction - level.U) / level.dt

    divergence = np.zeros_like(level.U)
    for axis, flux in enumerate(history.fluxes):
        old = _centered_derivative(np.asarray(flux.eval(level.U)), axis, history.dx)
        new = _centered_derivative(np.asarray(flux.eval(reconstruction)), axis, history.dx)
        divergence = divergence + 0.5 * (old + new)
    return np.abs(time_derivative + divergence)


def consistency_residual(history: MacroHistory, reconstruction: np.ndarray, i) -> float:
    """Residual of the conservation law at node i"""
    return float(consistency_residual_field(history, reconstruction)[i])


def consistency_residual_norm(history: MacroHistory, reconstruction: np.ndarray) -> float:
    """Root-mean-square residual over the grid"""
    residual = consistency_residual_field(history, reconstruction)
    return float(np.sqrt(np.mean(residual ** 2)))


def tv_bound_check(history: MacroHistory, reconstruction: np.ndarray,
                   initial_tv: Optional[float] = None, periodic: bool = True,
                   tolerance: float = 1e-12) -> Dict[str, Any]:
    """Total variation of U^{n+1} against the underlying updates"""
    N = history.depth
    omega_hat = history.omega_hat
    underlying_tv = [total_variation(underlying_field(history, k), periodic=periodic)
                     for k in range(N + 1)]
    tv_new = total_variation(np.asarray(reconstruction, dtype=float), periodic=periodic)
    max_tv = max(underlying_tv)

    decay = abs(1.0 - omega_hat)
    weight_bound = abs(omega_hat) * sum(decay ** k for k in range(N)) + decay ** N
    applies = 0.0 < omega_hat <= 1.0

    report = {
        'omega_hat': omega_hat,
        'depth': N,
        'tv': tv_new,
        'max_underlying_tv': max_tv,
        'weight_bound': weight_bound,
        'weighted_bound': weight_bound * max_tv,
        'theorem_applies': applies,
        'within_max_bound': tv_new <= max_tv + tolerance * max(1.0, max_tv),
        'passed': None
    }
    if initial_tv is not None:
        report['initial_tv'] = initial_tv
        report['within_initial_tv'] = tv_new <= initial_tv + tolerance * max(1.0, initial_tv)
    if applies:
        report['passed'] = report['within_max_bound'] and report.get('within_initial_tv', True)
    return report


def positivity_check(history: MacroHistory, reconstruction: np.ndarray,
                     tolerance: float = 1e-14) -> Dict[str, Any]:
    """If every underlying update is non-negative, U^{n+1} must be too"""
    N = history.depth
    min_underlying = min(float(np.min(underlying_field(history, k))) for k in range(N + 1))
    min_reconstruction = float(np.min(reconstruction))
    applies = 0.0 < history.omega_hat <= 1.0 and min_underlying >= 0.0
    return {
        'min_underlying': min_underlying,
        'min_reconstruction': min_reconstruction,
        'theorem_applies': applies,
        'passed': (min_reconstruction >= -tolerance) if applies else None
    }


class MacroFDOracle:
    """Comparison front-end over a MacroHistory filled by the solver"""

    def __init__(self, history: MacroHistory):
        self.history = history
        self.max_defect = 0.0

    def reconstruct(self) -> np.ndarray:
        return multistep_field(self.history)

    def defect(self, U_solver: np.ndarray) -> float:
        """Largest nodewise gap between the kinetic and the reconstructed U^{n+1}"""
        gap = float(np.max(np.abs(self.reconstruct() - np.asarray(U_solver))))
        self.max_defect = max(self.max_defect, gap)
        return gap
