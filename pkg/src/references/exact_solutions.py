"""
Exact Solutions Module
Reference solutions for the benchmark problems: characteristics for the
Burgers sine wave, translated indicators for the stiff-source advection
tests, the oblique-advection step and a fine-grid steady Embid solve
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from ..flux_models.fluxes import BurgersFlux, oblique_coefficients
from ..lattice_models.equilibria import UpwindModel
from ..solver.lattice_solver import (
    BoundarySpec, FaceCondition, Grid, LatticeSolver, RelaxationMode, SourceTerm
)
from ..utils.error_handler import ErrorCodes, SolverError

logger = logging.getLogger(__name__)

BURGERS_SHOCK_TIME = 1.0 / (2.0 * math.pi)
LEVEQUE_YEE_LEVEL = 0.3
EMBID_INFLOW = (1.0, -0.1)
EMBID_STEP = 0.1


def burgers_moc(x, t: float, tol: float = 1e-15, max_iterations: int = 100):
    """
    Solve u = sin(2 pi (x - u t)) by Newton iteration.
    Valid before the shock forms at t = 1/(2 pi).
    """
    if t < 0.0 or t >= BURGERS_SHOCK_TIME:
        raise SolverError(ErrorCodes.CHARACTERISTICS_NOT_CONVERGED,
                          f"Characteristics cross at t = 1/(2 pi); got t = {t}",
                          context={'t': t})
    x_arr = np.asarray(x, dtype=float)
    scalar = x_arr.ndim == 0
    x_arr = np.atleast_1d(x_arr)
    two_pi = 2.0 * math.pi
    floor = max(tol, 64.0 * np.finfo(float).eps)

    def residual(u):
        return u - np.sin(two_pi * (x_arr - u * t))

    u = np.sin(two_pi * x_arr)
    g = residual(u)
    for _ in range(max_iterations):
        if np.all(np.abs(g) <= tol):
            break
        slope = 1.0 + two_pi * t * np.cos(two_pi * (x_arr - u * t))
        u_next = np.clip(u - g / slope, -1.0, 1.0)
        if np.array_equal(u_next, u):
            break
        u = u_next
        g = residual(u)

    unresolved = np.abs(g) > floor
    if np.any(unresolved):
        # g(-1) <= 0 <= g(1) and g is increasing before the shock time
        low = np.where(unresolved, -1.0, u)
        high = np.where(unresolved, 1.0, u)
        for _ in range(200):
            middle = 0.5 * (low + high)
            below = residual(middle) < 0.0
            low = np.where(unresolved & below, middle, low)
            high = np.where(unresolved & ~below, middle, high)
        u = np.where(unresolved, 0.5 * (low + high), u)
        g = residual(u)
        if np.any(np.abs(g) > floor):
            raise SolverError(ErrorCodes.CHARACTERISTICS_NOT_CONVERGED,
                              "Characteristic equation did not converge",
                              context={'max_residual': float(np.max(np.abs(g)))})
    return float(u[0]) if scalar else u


def _coordinates(points) -> Tuple[np.ndarray, ...]:
    if isinstance(points, (list, tuple)):
        return tuple(np.asarray(p, dtype=float) for p in points)
    return (np.asarray(points, dtype=float),)


def leveque_yee_exact(points, t: float, level: float = LEVEQUE_YEE_LEVEL):
    """
    Initial indicator translated by t along every axis.
    1D: U = 1 for x - t <= level. 2D/3D: U = 1 inside sum (x_d - t)^2 <= level.
    points is one coordinate array (1D) or a list of per-axis arrays.
    """
    coords = _coordinates(points)
    if len(coords) == 1:
        inside = coords[0] - t <= level
    else:
        inside = sum((c - t) ** 2 for c in coords) <= level
    result = np.where(inside, 1.0, 0.0)
    return float(result) if result.ndim == 0 else result


def leveque_yee_radius(t: float, offset: float, level: float = LEVEQUE_YEE_LEVEL,
                       dimension: int = 2) -> float:
    """Distance from the translated centre to the front along a cross-section row"""
    remaining = level - (dimension - 1) * (offset - t) ** 2
    if remaining < 0.0:
        raise SolverError(ErrorCodes.VALUE_OUT_OF_RANGE,
                          f"Cross-section at offset {offset} misses the front")
    return math.sqrt(remaining)


def leveque_yee_source(mu: float) -> SourceTerm:
    """S(U) = -mu U (U - 1) (U - 1/2); states 0 and 1 are stable equilibria"""
    return SourceTerm(
        'leveque-yee',
        lambda U, points: -mu * U * (U - 1.0) * (U - 0.5),
        lambda U, points: -mu * (3.0 * U * U - 3.0 * U + 0.5),
        admissible_range=(0.0, 1.0)
    )


def spekreijse_exact(x1, x2, theta: float):
    """
    Oblique step: 1 where sin(theta) x1 - cos(theta) x2 < 0.
    On the line itself the value is 0, except along x1 = 0 in the
    theta = pi/2 limit where inflow from the left face carries 1.
    """
    a, b = oblique_coefficients(theta)
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    s = b * x1 - a * x2
    on_line = (s == 0.0) & (a == 0.0) & (x2 > 0.0)
    result = np.where((s < 0.0) | on_line, 1.0, 0.0)
    return float(result) if result.ndim == 0 else result


def embid_initial(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.where(x <= EMBID_STEP, EMBID_INFLOW[0], -1.0)


def embid_source(mu: float) -> SourceTerm:
    """S(U, x) = mu (6x - 3) U"""
    return SourceTerm(
        'embid',
        lambda U, points: mu * (6.0 * points[0] - 3.0) * U,
        lambda U, points: mu * (6.0 * points[0] - 3.0) * np.ones_like(U),
    )


def embid_boundary() -> BoundarySpec:
    return BoundarySpec({'left': FaceCondition('inflow', EMBID_INFLOW[0], at_face=True),
                         'right': FaceCondition('inflow', EMBID_INFLOW[1], at_face=True)})


@dataclass
class EmbidReference:
    """Steady fine-grid solution of the Embid problem"""
    mu: float
    x: np.ndarray
    U: np.ndarray
    iterations: int
    residual: float
    resolution: int = field(init=False)

    def __post_init__(self):
        self.resolution = len(self.x)

    def restrict(self, x_coarse) -> np.ndarray:
        """Linear interpolation onto coarser nodes"""
        return np.interp(np.asarray(x_coarse, dtype=float), self.x, self.U)


def embid_reference(mu: float, resolution: int = 4001, tolerance: float = 1e-12,
                    max_iterations: int = 500000) -> EmbidReference:
    """
    Run the omega = 1 upwind scheme on a fine cell-centred grid until
    max |U^{n+1} - U^n| <= tolerance. The lattice speed follows the
    sub-characteristic bound; the steady state leaves [-1, 1] once mu > 1.2.
    """
    grid = Grid.cell_centered(resolution, 0.0, 1.0)
    solver = LatticeSolver(
        UpwindModel(1), [BurgersFlux()], grid, RelaxationMode('explicit', 1.0), 1.0,
        boundary=embid_boundary(), source=embid_source(mu), adaptive=True
    )
    x = grid.coordinates()[0]
    state = solver.initialize(embid_initial(x))

    change = math.inf
    for _ in range(max_iterations):
        previous = state.U
        solver.step(state)
        change = float(np.max(np.abs(state.U - previous)))
        if change <= tolerance:
            break
    else:
        raise SolverError(ErrorCodes.REFERENCE_NOT_CONVERGED,
                          f"Embid reference (mu={mu}) not steady after {max_iterations} iterations",
                          context={'mu': mu, 'resolution': resolution, 'last_change': change})

    logger.info(f"Embid reference mu={mu} converged in {state.n} iterations on {resolution} cells")
    return EmbidReference(mu, x, state.U.copy(), state.n, change)
