"""
Benchmark Problems Module
Grid, flux, initial data, boundary data, source and summary metrics of
each benchmark problem
"""

import logging
import math
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..diagnostics.metrics import discontinuity_location, level_crossings, l2_error, shock_location
from ..flux_models.fluxes import BurgersFlux, ScalarFlux, build_flux, oblique_coefficients
from ..references.exact_solutions import (
    BURGERS_SHOCK_TIME, LEVEQUE_YEE_LEVEL, burgers_moc, leveque_yee_exact, leveque_yee_radius, leveque_yee_source,
    spekreijse_exact, embid_initial, embid_source, embid_boundary, embid_reference
)
from ..solver.lattice_solver import BoundarySpec, FaceCondition, Grid, SolverState, SourceTerm
from ..solver.boundaries import FACE_NAMES
from ..utils.error_handler import ErrorCodes, ConfigurationError

logger = logging.getLogger(__name__)


class Problem:
    """Benchmark setup; subclasses fill in the problem data"""

    name = 'problem'
    dimension = 1
    models: Tuple[str, ...] = ('d1q2', 'd1q3', 'upwind-d1q3')
    default_model = 'upwind-d1q3'
    default_lambda: Optional[float] = 1.0
    default_adaptive = False
    default_nodes: List[int] = [100]
    default_final_time: Optional[float] = None
    default_iterations: Optional[int] = None
    required: Tuple[str, ...] = ()
    has_source = False
    periodic = False

    def grid(self, nodes: int) -> Grid:
        raise NotImplementedError

    def fluxes(self, config) -> List[ScalarFlux]:
        raise NotImplementedError

    def initial(self, grid: Grid, config) -> np.ndarray:
        raise NotImplementedError

    def boundary(self, config) -> BoundarySpec:
        return BoundarySpec.periodic()

    def source(self, config) -> Optional[SourceTerm]:
        return None

    def admissible_range(self) -> Optional[Tuple[float, float]]:
        return None

    def summarize(self, config, grid: Grid, state: SolverState) -> Dict[str, float]:
        return {}


class BurgersSineProblem(Problem):
    """Periodic Burgers with U0 = sin(2 pi x) on a vertex grid over [0, 1]"""

    name = 'burgers-sine'
    default_nodes = [41]
    default_final_time = 0.1 * BURGERS_SHOCK_TIME
    periodic = True

    def grid(self, nodes: int) -> Grid:
        return Grid.vertex(nodes, 0.0, 1.0, periodic=True)

    def fluxes(self, config) -> List[ScalarFlux]:
        return build_flux('burgers').fluxes

    def initial(self, grid: Grid, config) -> np.ndarray:
        return np.sin(2.0 * math.pi * grid.coordinates()[0])

    def l2(self, grid: Grid, state: SolverState) -> float:
        """Error on the closed node set against the characteristics solution at the reached time"""
        x = grid.coordinates(closed=True)[0]
        return l2_error(grid.closed_field(state.U), burgers_moc(x, state.t), grid.dx)

    def summarize(self, config, grid, state):
        return {'l2': self.l2(grid, state)}


class LevequeYeeProblem(Problem):
    """Unit advection with the stiff bistable source -mu U (U - 1)(U - 1/2)"""

    default_final_time = 0.3
    required = ('mu',)
    has_source = True

    def __init__(self, dimension: int):
        self.dimension = dimension
        self.name = f"ly-{dimension}d"
        if dimension == 1:
            self.default_nodes = [50]
            self.default_lambda = 1.0
        else:
            self.models = ('upwind-d2q5', 'd2q9') if dimension == 2 else ('upwind-d3q7',)
            self.default_model = self.models[0]
            self.default_nodes = [100]
            self.default_lambda = float(dimension)
            self.default_final_time = 0.1

    def grid(self, nodes: int) -> Grid:
        if self.dimension == 1:
            return Grid.cell_centered(nodes, 0.0, 1.0)
        return Grid.cell_centered(nodes, -1.0, 1.0, self.dimension)

    def fluxes(self, config):
        return build_flux('uniform', self.dimension).fluxes

    def initial(self, grid, config):
        return leveque_yee_exact(list(grid.mesh()), 0.0)

    def boundary(self, config):
        if self.dimension == 1:
            return BoundarySpec({'left': FaceCondition('inflow', 1.0),
                                 'right': FaceCondition('inflow', 0.0)})
        return BoundarySpec.uniform(self.dimension, 'inflow', 0.0)

    def source(self, config):
        return leveque_yee_source(config.mu)

    def admissible_range(self):
        return (0.0, 1.0)

    def summarize(self, config, grid, state):
        if self.dimension == 1:
            return self._summarize_line(grid, state)
        return self._summarize_cross_section(grid, state)

    def _summarize_line(self, grid, state):
        x = grid.coordinates()[0]
        front = LEVEQUE_YEE_LEVEL + state.t
        location = discontinuity_location(x, state.U)
        away = np.abs(x - front) > 2.0 * grid.dx
        plateau = np.max(np.abs(state.U[away] - leveque_yee_exact(x[away], state.t))) if away.any() else 0.0
        return {
            'discontinuity_x': location,
            'discontinuity_error': abs(location - front),
            'plateau_defect': float(plateau),
        }

    def _summarize_cross_section(self, grid, state):
        """Level-0.5 crossings along x1 through the node row nearest the translated centre"""
        coords = grid.coordinates()
        row = int(np.argmin(np.abs(coords[1] - state.t)))
        index = (slice(None),) + (row,) * (self.dimension - 1)
        crossings = level_crossings(coords[0], state.U[index], 0.5)
        radius = leveque_yee_radius(state.t, float(coords[1][row]), dimension=self.dimension)
        if len(crossings) < 2:
            return {'radius_error': math.inf, 'exact_radius': radius}
        left, right = crossings[0], crossings[-1]
        error = max(abs((state.t - left) - radius), abs((right - state.t) - radius))
        return {'radius_error': error, 'exact_radius': radius,
                'radius_left': state.t - left, 'radius_right': right - state.t}


class EmbidProblem(Problem):
    """Steady Burgers with source mu (6x - 3) U and inflow 1 / -0.1"""

    name = 'embid'
    default_lambda = None
    default_adaptive = True
    default_iterations = 500
    required = ('mu',)
    has_source = True

    def grid(self, nodes):
        return Grid.cell_centered(nodes, 0.0, 1.0)

    def fluxes(self, config):
        return [BurgersFlux()]

    def initial(self, grid, config):
        return embid_initial(grid.coordinates()[0])

    def boundary(self, config):
        return embid_boundary()

    def source(self, config):
        return embid_source(config.mu)

    def summarize(self, config, grid, state):
        x = grid.coordinates()[0]
        reference = embid_reference(config.mu, config.reference_resolution)
        reference_x = shock_location(reference.x, reference.U)
        location = shock_location(x, state.U)
        return {
            'discontinuity_x': location,
            'reference_x': reference_x,
            'discontinuity_error': abs(location - reference_x),
            'reference_iterations': float(reference.iterations),
        }


class SpekreijseProblem(Problem):
    """Oblique advection (cos theta, sin theta) of a step on the unit square"""

    name = 'spekreijse'
    dimension = 2
    models = ('d2q9', 'upwind-d2q5')
    default_model = 'd2q9'
    default_nodes = [50]
    default_iterations = 1000
    required = ('theta',)

    def grid(self, nodes):
        return Grid.vertex(nodes, 0.0, 1.0, dimension=2)

    def fluxes(self, config):
        return build_flux('oblique', 2, theta=config.theta).fluxes

    def initial(self, grid, config):
        return np.zeros(grid.shape)

    def boundary(self, config):
        theta = config.theta
        kind = 'd2q9' if config.model == 'd2q9' else 'inflow'

        def exact(points, t):
            return spekreijse_exact(points[0], points[1], theta)

        return BoundarySpec({face: FaceCondition(kind, exact) for pair in FACE_NAMES[:2] for face in pair})

    def summarize(self, config, grid, state):
        X1, X2 = grid.mesh()
        a, b = oblique_coefficients(config.theta)
        off_line = (b * X1 - a * X2) != 0.0
        deviation = np.abs(state.U - spekreijse_exact(X1, X2, config.theta))
        return {
            'max_offline_deviation': float(np.max(deviation[off_line])) if off_line.any() else 0.0,
            'max_deviation': float(np.max(deviation)),
        }


PROBLEMS: Dict[str, Problem] = {
    'burgers-sine': BurgersSineProblem(),
    'ly-1d': LevequeYeeProblem(1),
    'ly-2d': LevequeYeeProblem(2),
    'ly-3d': LevequeYeeProblem(3),
    'embid': EmbidProblem(),
    'spekreijse': SpekreijseProblem(),
}


def get_problem(name: str) -> Problem:
    try:
        return PROBLEMS[name]
    except KeyError:
        raise ConfigurationError(ErrorCodes.INVALID_VALUE, f"Unknown problem: {name}",
                                 context={'available': list(PROBLEMS)})
