"""
Lattice Solver Module
BGK collision, periodic streaming, boundary fills, source moment solve
and the time loop of the kinetic scheme
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..flux_models.fluxes import ScalarFlux
from ..lattice_models.equilibria import (
    LatticeModel, D2Q9Model, subcharacteristic_ok, required_lambda
)
from ..lattice_models.velocity_sets import lambda_vector, shift_field, LambdaLike
from ..macrofd.oracle import MacroHistory, DEFAULT_DEPTH_CAP
from ..utils.error_handler import ErrorCodes, ConfigurationError, SolverError
from .boundaries import (
    FACE_NAMES, face_slab, inbound_populations, apply_d2q9_boundaries
)

logger = logging.getLogger(__name__)

NEWTON_TOLERANCE = 1e-12
NEWTON_MAX_ITERATIONS = 50
BISECTION_MAX_ITERATIONS = 200
TIME_TOLERANCE = 1e-12


class RelaxationKind(Enum):
    EXPLICIT = "explicit"
    SEMI_IMPLICIT = "semi-implicit"


def semi_implicit_omega(omega_hat: float) -> float:
    """Semi-implicit omega whose effective factor omega/(1 + omega) equals omega_hat"""
    if not 0.0 < omega_hat < 1.0:
        raise ConfigurationError(ErrorCodes.INVALID_RELAXATION,
                                 f"Semi-implicit relaxation reaches only 0 < omega_hat < 1, got {omega_hat}")
    return omega_hat / (1.0 - omega_hat)


def effective_omega(mode: Union[str, RelaxationKind], omega: float) -> float:
    """Relaxation factor actually applied in the collision"""
    kind = RelaxationKind(mode)
    if kind is RelaxationKind.SEMI_IMPLICIT:
        return omega / (1.0 + omega)
    return float(omega)


class RelaxationMode:
    """Explicit BGK with omega_hat = omega, or semi-implicit with omega/(1+omega)"""

    def __init__(self, mode: Union[str, RelaxationKind] = RelaxationKind.EXPLICIT, omega: float = 1.0):
        try:
            self.kind = RelaxationKind(mode)
        except ValueError:
            raise ConfigurationError(ErrorCodes.INVALID_RELAXATION,
                                     f"Unknown relaxation mode: {mode}",
                                     context={'available': [k.value for k in RelaxationKind]})
        self.omega = float(omega)
        self.omega_hat = effective_omega(self.kind, self.omega)
        self.validate()

    def validate(self):
        if not math.isfinite(self.omega) or self.omega <= 0.0:
            raise ConfigurationError(ErrorCodes.INVALID_RELAXATION,
                                     f"Relaxation omega must be positive, got {self.omega}")
        if self.kind is RelaxationKind.EXPLICIT and not 0.0 < self.omega_hat < 2.0:
            raise ConfigurationError(ErrorCodes.INVALID_RELAXATION,
                                     f"Explicit relaxation needs 0 < omega < 2, got {self.omega}")

    def __repr__(self) -> str:
        return f"RelaxationMode({self.kind.value!r}, omega={self.omega})"


class Grid:
    """
    Uniform Cartesian grid with equal spacing in every direction.

    Cell-centred grids place N nodes at lower + (i + 1/2) dx. Vertex grids
    place N nodes at lower + i dx, dx = L/(N-1); a periodic vertex grid keeps
    N-1 unique nodes and reports the closed field with the first node repeated.
    """

    def __init__(self, shape: Sequence[int], lower: Sequence[float], dx: float,
                 offset: float = 0.0, closed_periodic: bool = False):
        self.shape = tuple(int(n) for n in shape)
        self.lower = tuple(float(v) for v in lower)
        self.dx = float(dx)
        self.offset = float(offset)
        self.closed_periodic = closed_periodic
        if len(self.shape) != len(self.lower):
            raise ConfigurationError(ErrorCodes.INCOMPATIBLE_DIMENSIONS,
                                     "Grid shape and lower corner differ in dimension")
        if any(n < 2 for n in self.shape) or not self.dx > 0.0:
            raise ConfigurationError(ErrorCodes.INVALID_VALUE,
                                     f"Grid needs at least two nodes per axis and dx > 0: {self.shape}, {self.dx}")

    @classmethod
    def cell_centered(cls, nodes: int, lower: float, upper: float, dimension: int = 1) -> 'Grid':
        dx = (upper - lower) / nodes
        return cls((nodes,) * dimension, (lower,) * dimension, dx, offset=0.5)

    @classmethod
    def vertex(cls, nodes: int, lower: float, upper: float, dimension: int = 1,
               periodic: bool = False) -> 'Grid':
        dx = (upper - lower) / (nodes - 1)
        unique = nodes - 1 if periodic else nodes
        return cls((unique,) * dimension, (lower,) * dimension, dx, closed_periodic=periodic)

    @property
    def dimension(self) -> int:
        return len(self.shape)

    @property
    def cell_volume(self) -> float:
        return self.dx ** self.dimension

    @property
    def reported_shape(self) -> Tuple[int, ...]:
        extra = 1 if self.closed_periodic else 0
        return tuple(n + extra for n in self.shape)

    def coordinates(self, closed: bool = False) -> List[np.ndarray]:
        """1D node coordinates per axis"""
        extra = 1 if closed and self.closed_periodic else 0
        return [lo + (np.arange(n + extra) + self.offset) * self.dx
                for lo, n in zip(self.lower, self.shape)]

    def mesh(self, closed: bool = False) -> List[np.ndarray]:
        """Coordinate arrays of full field shape (ij indexing)"""
        return np.meshgrid(*self.coordinates(closed), indexing='ij')

    def closed_field(self, U: np.ndarray) -> np.ndarray:
        """Field on the reported nodes; periodic vertex grids repeat the first node"""
        if not self.closed_periodic:
            return U
        for axis in range(U.ndim):
            first = np.take(U, [0], axis=axis)
            U = np.concatenate([U, first], axis=axis)
        return U


class FaceCondition:
    """
    Boundary treatment of one face: 'periodic', 'inflow' (equilibrium fill
    of the unknown populations) or 'd2q9' (characteristic closure).
    value is a constant or a callable (points, t) -> U_b. With at_face an
    inflow value on a cell-centred grid holds on the face itself: the ghost
    state is extrapolated half a cell outward with the interior slope.
    """

    KINDS = ('periodic', 'inflow', 'd2q9')

    def __init__(self, kind: str = 'periodic', value: Union[float, Callable, None] = None,
                 at_face: bool = False):
        if kind not in self.KINDS:
            raise ConfigurationError(ErrorCodes.INVALID_VALUE, f"Unknown boundary kind: {kind}",
                                     context={'available': list(self.KINDS)})
        self.kind = kind
        self.value = value
        self.at_face = at_face

    def values(self, points: Sequence[np.ndarray], t: float) -> np.ndarray:
        if self.value is None:
            raise SolverError(ErrorCodes.MISSING_BOUNDARY_DATA,
                              f"Face of kind {self.kind} has no boundary value")
        if callable(self.value):
            data = self.value(points, t)
        else:
            data = self.value
        return np.broadcast_to(np.asarray(data, dtype=float), points[0].shape).copy()


class BoundarySpec:
    """Face conditions keyed by face name (left/right, bottom/top, back/front)"""

    def __init__(self, faces: Optional[Dict[str, FaceCondition]] = None, corners: bool = True):
        self.faces = dict(faces or {})
        self.corners = corners

    @classmethod
    def periodic(cls) -> 'BoundarySpec':
        return cls({})

    @classmethod
    def uniform(cls, dimension: int, kind: str, value=None) -> 'BoundarySpec':
        return cls({face: FaceCondition(kind, value)
                    for pair in FACE_NAMES[:dimension] for face in pair})

    def condition(self, face: str) -> FaceCondition:
        return self.faces.get(face, FaceCondition('periodic'))

    def periodic_axes(self, dimension: int) -> List[bool]:
        flags = []
        for low, high in FACE_NAMES[:dimension]:
            low_periodic = self.condition(low).kind == 'periodic'
            high_periodic = self.condition(high).kind == 'periodic'
            if low_periodic != high_periodic:
                raise ConfigurationError(ErrorCodes.INVALID_VALUE,
                                         f"Faces {low}/{high} must both be periodic or both non-periodic")
            flags.append(low_periodic)
        return flags

    def validate(self, model: LatticeModel):
        unknown = set(self.faces) - {face for pair in FACE_NAMES[:model.dimension] for face in pair}
        if unknown:
            raise ConfigurationError(ErrorCodes.INCOMPATIBLE_DIMENSIONS,
                                     f"Faces {sorted(unknown)} do not exist in {model.dimension}-D")
        self.periodic_axes(model.dimension)
        kinds = {cond.kind for cond in self.faces.values()}
        if 'd2q9' in kinds:
            if not isinstance(model, D2Q9Model):
                raise SolverError(ErrorCodes.BOUNDARY_MODEL_MISMATCH,
                                  f"Characteristic D2Q9 closure used with model {model.name}")
            if 'inflow' in kinds:
                raise ConfigurationError(ErrorCodes.INVALID_VALUE,
                                         "D2Q9 closure cannot be mixed with inflow faces")
        for face, cond in self.faces.items():
            if cond.kind != 'periodic' and cond.value is None:
                raise SolverError(ErrorCodes.MISSING_BOUNDARY_DATA,
                                  f"Boundary face {face} has no boundary value")


class SourceTerm:
    """Source S(U, x) with its U-derivative, used by the implicit moment solve"""

    def __init__(self, name: str, value_fn: Callable, derivative_fn: Callable,
                 admissible_range: Optional[Tuple[float, float]] = None):
        self.name = name
        self.value_fn = value_fn
        self.derivative_fn = derivative_fn
        self.admissible_range = admissible_range

    def value(self, U, points=None) -> np.ndarray:
        return np.asarray(self.value_fn(U, points), dtype=float)

    def derivative(self, U, points=None) -> np.ndarray:
        return np.asarray(self.derivative_fn(U, points), dtype=float)

    def __repr__(self) -> str:
        return f"SourceTerm({self.name!r})"


class SolverState:
    """Populations and macroscopic field at time level n"""

    def __init__(self, f: np.ndarray, U: np.ndarray, lam: np.ndarray, dt: float,
                 t: float = 0.0, n: int = 0):
        self.f = f
        self.U = U
        self.lam = lam
        self.dt = dt
        self.t = t
        self.n = n
        self.F: Optional[np.ndarray] = None
        self.history: Optional[MacroHistory] = None
        self.subcharacteristic_margin: Optional[float] = None
        self.last_collision: Optional[Tuple[np.ndarray, np.ndarray, np.ndarray, float]] = None

    def copy(self) -> 'SolverState':
        clone = SolverState(self.f.copy(), self.U.copy(), self.lam.copy(), self.dt, self.t, self.n)
        clone.subcharacteristic_margin = self.subcharacteristic_margin
        return clone


def _collide_block(out: np.ndarray, f: np.ndarray, f_eq: np.ndarray, r: Optional[np.ndarray],
                   omega_hat: float, half_dt: float, block):
    out[block] = (1.0 - omega_hat) * f[block] + omega_hat * f_eq[block]
    if r is not None:
        out[block] += half_dt * r[block]


def collide(f: np.ndarray, f_eq: np.ndarray, mode: RelaxationMode, r: Optional[np.ndarray] = None,
            dt: float = 0.0, workers: int = 1) -> np.ndarray:
    """
    f* = (1 - omega_hat) f + omega_hat f^eq (+ dt/2 r).
    Nodes are independent, so workers > 1 splits the first spatial axis
    across threads with bit-identical results.
    """
    mode.validate()
    omega_hat = mode.omega_hat
    out = np.empty_like(f)
    half_dt = 0.5 * dt
    n_rows = f.shape[1]

    if workers <= 1 or n_rows < 2:
        _collide_block(out, f, f_eq, r, omega_hat, half_dt, (slice(None),))
        return out

    bounds = np.linspace(0, n_rows, min(workers, n_rows) + 1).astype(int)
    blocks = [(slice(None), slice(lo, hi)) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        futures = [executor.submit(_collide_block, out, f, f_eq, r, omega_hat, half_dt, block)
                   for block in blocks]
        for future in futures:
            future.result()
    return out


def stream(f_star: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    """f_q(x, t+dt) = f*_q(x - m_q dx); wraps periodically, boundaries are refilled afterwards"""
    return np.stack([shift_field(f_star[q], 1, offsets[q]) for q in range(f_star.shape[0])])


def moments(f: np.ndarray) -> np.ndarray:
    """U = sum_q f_q"""
    return np.sum(f, axis=0)


def select_timestep(grid: Grid, lam: LambdaLike) -> float:
    """dt = dx / lambda"""
    lam_vec = lambda_vector(lam, grid.dimension)
    return grid.dx / float(lam_vec[0])


def newton_moment_solve(F_sum, source: Callable, source_derivative: Callable, dt: float,
                        U_guess, bracket: Optional[Tuple[Any, Any]] = None,
                        tolerance: float = NEWTON_TOLERANCE,
                        max_iterations: int = NEWTON_MAX_ITERATIONS):
    """
    Solve U - dt/2 S(U) = sum_q F_q nodewise.

    Newton from U_guess; nodes that do not converge fall back to bisection
    on the bracket (default: range of U_guess widened by one).
    """
    F = np.asarray(F_sum, dtype=float)
    scalar = F.ndim == 0
    F = np.atleast_1d(F)
    U = np.array(np.broadcast_to(np.asarray(U_guess, dtype=float), F.shape), dtype=float)
    half = 0.5 * dt

    def residual(V):
        return V - half * np.asarray(source(V), dtype=float) - F

    with np.errstate(all='ignore'):
        g = residual(U)
        for _ in range(max_iterations):
            done = np.abs(g) <= tolerance
            if np.all(done):
                break
            slope = 1.0 - half * np.asarray(source_derivative(U), dtype=float)
            U = np.where(done, U, U - g / slope)
            g = residual(U)

    failed = ~(np.abs(g) <= tolerance)
    if np.any(failed):
        logger.debug(f"Newton moment solve left {int(np.count_nonzero(failed))} node(s); bisecting")
        U = _bisect_moment_solve(residual, U, failed, U_guess, bracket, tolerance)

    return float(U[0]) if scalar else U


def _bisect_moment_solve(residual: Callable, U: np.ndarray, failed: np.ndarray, U_guess,
                         bracket: Optional[Tuple[Any, Any]], tolerance: float) -> np.ndarray:
    if bracket is None:
        guess = np.asarray(U_guess, dtype=float)
        bracket = (float(np.min(guess)) - 1.0, float(np.max(guess)) + 1.0)
    low = np.where(failed, np.broadcast_to(np.asarray(bracket[0], dtype=float), U.shape), U)
    high = np.where(failed, np.broadcast_to(np.asarray(bracket[1], dtype=float), U.shape), U)
    g_low = residual(low)
    g_high = residual(high)

    no_sign_change = failed & (g_low * g_high > 0.0)
    if np.any(no_sign_change):
        node = tuple(int(i) for i in np.argwhere(no_sign_change)[0])
        raise SolverError(ErrorCodes.MOMENT_SOLVE_FAILED,
                          f"Moment equation has no root in the bracket at node {node}",
                          context={'node': node, 'bracket': (float(low[node]), float(high[node]))})

    middle = U
    for _ in range(BISECTION_MAX_ITERATIONS):
        middle = np.where(failed, 0.5 * (low + high), U)
        g_middle = residual(middle)
        if np.all(np.abs(g_middle[failed]) <= tolerance):
            break
        left = failed & (g_low * g_middle <= 0.0)
        right = failed & ~left
        high = np.where(left, middle, high)
        low = np.where(right, middle, low)
        g_low = np.where(right, g_middle, g_low)

    remaining = failed & ~(np.abs(residual(middle)) <= tolerance)
    if np.any(remaining):
        node = tuple(int(i) for i in np.argwhere(remaining)[0])
        raise SolverError(ErrorCodes.MOMENT_SOLVE_FAILED,
                          f"Moment equation did not converge at node {node}",
                          context={'node': node})
    return middle


class LatticeSolver:
    """
    Kinetic time stepping for a scalar conservation law.

    One step: equilibrium, collision, streaming, boundary fill and either the
    zeroth moment (no source) or the implicit moment solve with source.
    """

    def __init__(self, model: LatticeModel, fluxes: Sequence[ScalarFlux], grid: Grid,
                 relaxation: RelaxationMode, lam: LambdaLike,
                 boundary: Optional[BoundarySpec] = None,
                 source: Optional[SourceTerm] = None,
                 source_model: str = 'well-balanced',
                 adaptive: bool = False,
                 subcharacteristic: str = 'warn',
                 admissible_range: Optional[Tuple[float, float]] = None,
                 workers: int = 1,
                 oracle_depth: Optional[int] = None,
                 monitor_collisions: bool = False):
        self.model = model
        self.fluxes = list(fluxes)
        self.grid = grid
        self.relaxation = relaxation
        self.boundary = boundary or BoundarySpec.periodic()
        self.source = source
        self.naive_source = source_model == 'naive'
        self.adaptive = adaptive
        self.subcharacteristic = subcharacteristic
        self.admissible_range = admissible_range
        self.workers = max(1, int(workers))
        self.oracle_depth = oracle_depth
        self.monitor_collisions = monitor_collisions

        if source_model not in ('well-balanced', 'naive'):
            raise ConfigurationError(ErrorCodes.INVALID_VALUE, f"Unknown source model: {source_model}")
        if subcharacteristic not in ('warn', 'fail'):
            raise ConfigurationError(ErrorCodes.INVALID_VALUE,
                                     f"Sub-characteristic policy must be warn or fail, got {subcharacteristic}")
        if grid.dimension != model.dimension:
            raise ConfigurationError(ErrorCodes.INCOMPATIBLE_DIMENSIONS,
                                     f"{model.dimension}-D model on a {grid.dimension}-D grid")
        model.check_fluxes(self.fluxes)
        self.lam = lambda_vector(lam, model.dimension)
        self.boundary.validate(model)
        self.periodic = self.boundary.periodic_axes(model.dimension)
        self.points = grid.mesh()
        self._warned = False

        if adaptive and relaxation.omega_hat != 1.0:
            logger.warning("Adaptive lattice speed keeps the scheme consistent only for omega_hat = 1")

        logger.info(f"Lattice solver ready: {model.name}, {relaxation}, lambda={self.lam[0]}, "
                    f"grid={grid.shape}, workers={self.workers}")

    # -- setup --------------------------------------------------------------

    def initialize(self, U0) -> SolverState:
        """f^0 = f^eq(U^0)"""
        U0 = np.array(np.broadcast_to(np.asarray(U0, dtype=float), self.grid.shape), dtype=float)
        for flux in self.fluxes:
            flux.check_range(U0)
        lam = self.lam
        if self.adaptive:
            lam = lambda_vector(required_lambda(self.model, self.fluxes, U0, lam_floor=float(lam[0])),
                                self.model.dimension)
        f = self.model.equilibrium(U0, self.fluxes, lam)
        state = SolverState(f, U0, lam, select_timestep(self.grid, lam))
        if self.oracle_depth is not None:
            state.history = MacroHistory(self.model, self.fluxes, self.relaxation.omega_hat,
                                         self.grid.dx, self.oracle_depth or DEFAULT_DEPTH_CAP)
        return state

    def restart_window(self, state: SolverState):
        """Re-initialize f to equilibrium at the current U and drop the oracle history"""
        state.f = self.model.equilibrium(state.U, self.fluxes, state.lam)
        if state.history is not None:
            state.history.clear()
        logger.info(f"Oracle window restarted at step {state.n}")

    # -- one step -------------------------------------------------------------

    def _source_value(self, U) -> np.ndarray:
        return self.source.value(U, self.points)

    def _source_equilibrium(self, U, S, lam) -> np.ndarray:
        return self.model.source_equilibrium(U, S, self.fluxes, lam, naive=self.naive_source)

    def _check_subcharacteristic(self, state: SolverState):
        ok, margin = subcharacteristic_ok(self.model, state.lam, self.fluxes, state.U)
        state.subcharacteristic_margin = margin
        if ok:
            return
        message = (f"Sub-characteristic condition violated at step {state.n}: "
                   f"margin {margin:.3e} with lambda={state.lam[0]}")
        if self.subcharacteristic == 'fail':
            raise SolverError(ErrorCodes.SUBCHARACTERISTIC_VIOLATED, message,
                              context={'step': state.n, 'margin': margin})
        if not self._warned:
            logger.warning(message)
            self._warned = True

    def _apply_boundaries(self, f: np.ndarray, U: np.ndarray, t: float, lam: np.ndarray, dt: float):
        if all(self.periodic):
            return
        if any(cond.kind == 'd2q9' for cond in self.boundary.faces.values()):
            self._apply_d2q9(f, t, lam)
            return

        for axis, is_periodic in enumerate(self.periodic):
            if is_periodic:
                continue
            for face in FACE_NAMES[axis]:
                index = face_slab(face, self.model.dimension, self.periodic, exclude_corners=False)
                points = [P[index] for P in self.points]
                condition = self.boundary.condition(face)
                U_b = condition.values(points, t)
                if condition.at_face and self.grid.offset == 0.5:
                    U_b, points = self._face_ghost(U, U_b, points, axis, index)
                ghost = self.model.equilibrium(U_b, self.fluxes, lam)
                if self.source is not None:
                    S_b = self.source.value(U_b, points)
                    ghost = ghost + 0.5 * dt * self._source_equilibrium(U_b, S_b, lam)
                for q in inbound_populations(self.model.offsets, face):
                    f[(q,) + index] = ghost[q]

    def _face_ghost(self, U, U_b, points, axis, index):
        """Ghost state half a cell outside the face, from U_b and the interior slope"""
        low = index[axis] == 0
        inner = list(index)
        inner[axis] = 1 if low else -2
        U_ghost = U_b - 0.5 * (U[tuple(inner)] - U[index])
        points = list(points)
        points[axis] = points[axis] + (-1.0 if low else 1.0) * self.grid.dx
        return U_ghost, points

    def _apply_d2q9(self, f: np.ndarray, t: float, lam: np.ndarray):
        U_b = np.zeros(self.grid.shape)
        faces = []
        for axis, is_periodic in enumerate(self.periodic):
            if is_periodic:
                continue
            for face in FACE_NAMES[axis]:
                index = face_slab(face, 2, self.periodic, exclude_corners=False)
                U_b[index] = self.boundary.condition(face).values([P[index] for P in self.points], t)
                faces.append(face)
        f_eq = self.model.equilibrium(U_b, self.fluxes, lam)
        corners = self.boundary.corners and not any(self.periodic)
        apply_d2q9_boundaries(f, f_eq, faces, corners=corners, periodic=self.periodic)

    def step(self, state: SolverState) -> SolverState:
        """Advance the state by one time step in place"""
        lam = state.lam
        if self.adaptive:
            needed = required_lambda(self.model, self.fluxes, state.U, lam_floor=float(lam[0]))
            if needed > lam[0]:
                logger.debug(f"Lattice speed raised to {needed:.6g} at step {state.n}")
                lam = lambda_vector(needed, self.model.dimension)
                state.lam = lam
        dt = select_timestep(self.grid, lam)
        state.dt = dt
        self._check_subcharacteristic(state)

        if state.history is not None:
            if state.history.at_capacity:
                self.restart_window(state)
            state.history.record(state.U, lam, dt)

        U = state.U
        f_eq = self.model.equilibrium(U, self.fluxes, lam)
        r = None
        if self.source is not None:
            r = self._source_equilibrium(U, self._source_value(U), lam)
        f_star = collide(state.f, f_eq, self.relaxation, r, dt, self.workers)
        if self.monitor_collisions:
            state.last_collision = (state.f, f_eq, f_star, self.relaxation.omega_hat)

        f_new = stream(f_star, self.model.offsets)
        t_new = state.t + dt
        self._apply_boundaries(f_new, U, t_new, lam, dt)

        if self.source is None:
            U_new = moments(f_new)
        else:
            F = f_new
            bracket = None
            if self.admissible_range is not None:
                bracket = (self.admissible_range[0] - 1.0, self.admissible_range[1] + 1.0)
            U_new = newton_moment_solve(
                moments(F),
                self._source_value,
                lambda V: self.source.derivative(V, self.points),
                dt, U, bracket=bracket
            )
            f_new = F + 0.5 * dt * self._source_equilibrium(U_new, self._source_value(U_new), lam)
            state.F = F

        if not np.all(np.isfinite(U_new)):
            node = tuple(int(i) for i in np.argwhere(~np.isfinite(U_new))[0])
            raise SolverError(ErrorCodes.NON_FINITE_STATE,
                              f"Non-finite value at step {state.n + 1}, node {node}",
                              context={'step': state.n + 1, 'node': node})

        state.f = f_new
        state.U = U_new
        state.t = t_new
        state.n += 1
        return state

    # -- time loop ------------------------------------------------------------

    def run(self, state: SolverState, final_time: Optional[float] = None,
            iterations: Optional[int] = None,
            callback: Optional[Callable[[SolverState], None]] = None) -> SolverState:
        """
        Step until t >= final_time (up to a relative 1e-12) or for a fixed
        number of iterations.
        """
        if (final_time is None) == (iterations is None):
            raise ConfigurationError(ErrorCodes.MISSING_REQUIRED_FIELD,
                                     "Give exactly one of final_time or iterations")
        if iterations is not None:
            for _ in range(int(iterations)):
                self.step(state)
                if callback is not None:
                    callback(state)
        else:
            stop = final_time - TIME_TOLERANCE * max(1.0, abs(final_time))
            while state.t < stop:
                self.step(state)
                if callback is not None:
                    callback(state)
        logger.info(f"Run finished after {state.n} steps at t={state.t:.6g}")
        return state


def step(state: SolverState, solver: LatticeSolver) -> SolverState:
    """Advance one time step with the given solver"""
    return solver.step(state)
