"""
Equilibrium Models Module
Equilibrium and source-equilibrium constructors for every discrete-velocity
model, the D2Q9 flux partition and the sub-characteristic admissibility check
"""

import logging
import re
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from ..flux_models.fluxes import ScalarFlux, combine_fluxes
from ..utils.error_handler import ErrorCodes, ConfigurationError
from .velocity_sets import VelocitySet, get_velocity_set, lambda_vector, LambdaLike

logger = logging.getLogger(__name__)

SUBCHARACTERISTIC_TOLERANCE = 1e-12


class LatticeModel:
    """Velocity set plus equilibrium and source-equilibrium constructors"""

    name = 'lattice'

    def __init__(self, velocity_set: VelocitySet):
        self.velocity_set = velocity_set

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name!r})"

    @property
    def dimension(self) -> int:
        return self.velocity_set.D

    @property
    def Q(self) -> int:
        return self.velocity_set.Q

    @property
    def offsets(self) -> np.ndarray:
        return self.velocity_set.offsets

    @property
    def supports_split_form(self) -> bool:
        """True when the equilibrium is built from directional flux splits"""
        return False

    def check_fluxes(self, fluxes: Sequence[ScalarFlux]):
        if len(fluxes) != self.dimension:
            raise ConfigurationError(
                ErrorCodes.UNSUPPORTED_MODEL,
                f"Model {self.name} is {self.dimension}-D but {len(fluxes)} flux direction(s) were given"
            )

    def equilibrium(self, U, fluxes: Sequence[ScalarFlux], lam: LambdaLike) -> np.ndarray:
        raise NotImplementedError

    def source_equilibrium(self, U, S, fluxes: Sequence[ScalarFlux], lam: LambdaLike,
                           naive: bool = False) -> np.ndarray:
        raise NotImplementedError

    def _naive_source(self, S) -> np.ndarray:
        """Whole source on the rest population; first moment is not matched"""
        S = np.asarray(S, dtype=float)
        r = np.zeros((self.Q,) + S.shape)
        rest = self.velocity_set.rest_index
        if rest is None:
            r[:] = S / self.Q
        else:
            r[rest] = S
        return r

    def subcharacteristic_matrix(self, U, fluxes: Sequence[ScalarFlux],
                                 lam: LambdaLike) -> np.ndarray:
        """
        Chapman-Enskog matrix A_ij = d/dU(sum_q v^i v^j f^eq_q) - dG^i dG^j
        for every sampled U; shape (n, D, D).
        """
        U = np.atleast_1d(np.asarray(U, dtype=float)).ravel()
        velocities = self.velocity_set.velocities(lam)
        # equilibrium derivative equals the well-balanced source model at S = 1
        dfeq = self.source_equilibrium(U, np.ones_like(U), fluxes, lam)
        dG = np.stack([np.asarray(flux.jacobian(U), dtype=float) for flux in fluxes])
        second_moment = np.einsum('qi,qj,qn->nij', velocities, velocities, dfeq)
        return second_moment - np.einsum('in,jn->nij', dG, dG)


class ClassicalD1Q2Model(LatticeModel):
    """Two-velocity model f_q = U/2 -+ G/(2 lambda)"""

    name = 'd1q2'

    def __init__(self):
        super().__init__(get_velocity_set('d1q2'))

    def equilibrium(self, U, fluxes, lam):
        self.check_fluxes(fluxes)
        lam1 = lambda_vector(lam, 1)[0]
        U = np.asarray(U, dtype=float)
        G = np.asarray(fluxes[0].eval(U), dtype=float)
        return np.stack([0.5 * U + G / (2.0 * lam1), 0.5 * U - G / (2.0 * lam1)])

    def source_equilibrium(self, U, S, fluxes, lam, naive=False):
        if naive:
            return self._naive_source(S)
        self.check_fluxes(fluxes)
        lam1 = lambda_vector(lam, 1)[0]
        S = np.asarray(S, dtype=float)
        dGS = np.asarray(fluxes[0].jacobian(U), dtype=float) * S
        return np.stack([0.5 * S + dGS / (2.0 * lam1), 0.5 * S - dGS / (2.0 * lam1)])


class D1Q3Model(LatticeModel):
    """Three-velocity central model f_q = U/3 + (d_q1 - d_q3) G/(2 lambda)"""

    name = 'd1q3'

    def __init__(self):
        super().__init__(get_velocity_set('d1q3'))

    def equilibrium(self, U, fluxes, lam):
        self.check_fluxes(fluxes)
        lam1 = lambda_vector(lam, 1)[0]
        U = np.asarray(U, dtype=float)
        G = np.asarray(fluxes[0].eval(U), dtype=float)
        third = U / 3.0
        return np.stack([third + G / (2.0 * lam1), third, third - G / (2.0 * lam1)])

    def source_equilibrium(self, U, S, fluxes, lam, naive=False):
        if naive:
            return self._naive_source(S)
        self.check_fluxes(fluxes)
        lam1 = lambda_vector(lam, 1)[0]
        S = np.asarray(S, dtype=float)
        dGS = np.asarray(fluxes[0].jacobian(U), dtype=float) * S
        third = S / 3.0
        return np.stack([third + dGS / (2.0 * lam1), third, third - dGS / (2.0 * lam1)])


class SplitFluxModel(LatticeModel):
    """
    Models whose moving populations carry split flux components.

    Every component l travels along a lattice direction e_l: the population
    with offset +e_l holds G^{l+}/lambda, the one with offset -e_l holds
    G^{l-}/lambda and the rest population closes the zeroth moment.
    """

    @property
    def supports_split_form(self) -> bool:
        return True

    def components(self, fluxes: Sequence[ScalarFlux]) -> List[Tuple[Tuple[int, ...], ScalarFlux]]:
        raise NotImplementedError

    def _index_of(self, offset: Sequence[int]) -> int:
        match = np.flatnonzero((self.offsets == np.asarray(offset)).all(axis=1))
        return int(match[0])

    def component_speed(self, direction: Tuple[int, ...], lam_vec: np.ndarray) -> float:
        # lattice speed along a coordinate axis, or the uniform speed for diagonals
        axis = int(np.flatnonzero(direction)[0])
        return float(lam_vec[axis])

    def directional_splits(self, U, fluxes: Sequence[ScalarFlux]):
        """[(direction, G+, G-)] for each component at U"""
        self.check_fluxes(fluxes)
        U = np.asarray(U, dtype=float)
        splits = []
        for direction, flux in self.components(fluxes):
            G_plus, G_minus = flux.split(U)
            splits.append((direction, np.asarray(G_plus, dtype=float),
                           np.asarray(G_minus, dtype=float)))
        return splits

    def equilibrium(self, U, fluxes, lam):
        self.check_fluxes(fluxes)
        lam_vec = lambda_vector(lam, self.dimension)
        U = np.asarray(U, dtype=float)
        f = np.zeros((self.Q,) + U.shape)
        moving = np.zeros(U.shape)

        for direction, G_plus, G_minus in self.directional_splits(U, fluxes):
            speed = self.component_speed(direction, lam_vec)
            f[self._index_of(direction)] = G_plus / speed
            f[self._index_of(tuple(-d for d in direction))] = G_minus / speed
            moving = moving + (G_plus + G_minus) / speed

        f[self.velocity_set.rest_index] = U - moving
        return f

    def source_equilibrium(self, U, S, fluxes, lam, naive=False):
        if naive:
            return self._naive_source(S)
        self.check_fluxes(fluxes)
        lam_vec = lambda_vector(lam, self.dimension)
        U = np.asarray(U, dtype=float)
        S = np.broadcast_to(np.asarray(S, dtype=float), U.shape)
        r = np.zeros((self.Q,) + U.shape)
        moving = np.zeros(U.shape)

        for direction, flux in self.components(fluxes):
            speed = self.component_speed(direction, lam_vec)
            dG_plus, dG_minus = flux.split_jacobian(U)
            r[self._index_of(direction)] = dG_plus * S / speed
            r[self._index_of(tuple(-d for d in direction))] = dG_minus * S / speed
            moving = moving + (dG_plus + dG_minus) * S / speed

        r[self.velocity_set.rest_index] = S - moving
        return r


class UpwindModel(SplitFluxModel):
    """Upwind DdQ(2d+1): one split flux per coordinate direction"""

    def __init__(self, dimension: int):
        if dimension not in (1, 2, 3):
            raise ConfigurationError(ErrorCodes.UNSUPPORTED_MODEL,
                                     f"Upwind model needs dimension 1-3, got {dimension}")
        self.name = f"upwind-d{dimension}q{2 * dimension + 1}"
        super().__init__(get_velocity_set(self.name))

    def components(self, fluxes):
        self.check_fluxes(fluxes)
        unit = np.eye(self.dimension, dtype=int)
        return [(tuple(int(v) for v in unit[d]), fluxes[d]) for d in range(self.dimension)]


def parse_partition(partition: Union[str, float, None]) -> float:
    """Coordinate fraction phi: G^alpha = phi G^1, G^beta = phi G^2"""
    if partition is None:
        return 1.0
    if isinstance(partition, (int, float)):
        return float(partition)

    text = str(partition).strip().lower()
    if text == 'coordinate':
        return 1.0
    if text == 'diagonal':
        return 0.0
    match = re.fullmatch(r'custom\(\s*([-+0-9.eE]+)\s*\)', text)
    if match:
        return float(match.group(1))
    raise ConfigurationError(ErrorCodes.INVALID_VALUE,
                             f"Unknown D2Q9 partition: {partition}",
                             context={'accepted': ['coordinate', 'diagonal', 'custom(<fraction>)']})


def d2q9_partition(G1, G2, G_alpha, G_beta):
    """Diagonal components (G^gamma, G^zeta) left after the coordinate share"""
    G_gamma = (G2 + G1) / 2.0 - (G_beta + G_alpha) / 2.0
    G_zeta = (G2 - G1) / 2.0 - (G_beta - G_alpha) / 2.0
    return G_gamma, G_zeta


class D2Q9Model(SplitFluxModel):
    """Nine-velocity model with coordinate (alpha, beta) and diagonal (gamma, zeta) upwinding"""

    name = 'd2q9'

    # alpha along (1,0), beta along (0,1), gamma along (1,1), zeta along (-1,1)
    COMPONENT_DIRECTIONS = ((1, 0), (0, 1), (1, 1), (-1, 1))

    def __init__(self, partition: Union[str, float, None] = 'coordinate'):
        super().__init__(get_velocity_set('d2q9'))
        self.partition = partition if partition is not None else 'coordinate'
        self.coordinate_fraction = parse_partition(partition)

    def component_speed(self, direction, lam_vec):
        return float(lam_vec[0])

    def components(self, fluxes):
        self.check_fluxes(fluxes)
        phi = self.coordinate_fraction
        G1, G2 = fluxes
        half = (1.0 - phi) / 2.0
        alpha = combine_fluxes([G1], [phi], name='alpha')
        beta = combine_fluxes([G2], [phi], name='beta')
        gamma = combine_fluxes([G1, G2], [half, half], name='gamma')
        zeta = combine_fluxes([G1, G2], [-half, half], name='zeta')
        return list(zip(self.COMPONENT_DIRECTIONS, (alpha, beta, gamma, zeta)))


MODEL_NAMES = ('d1q2', 'd1q3', 'upwind-d1q3', 'upwind-d2q5', 'upwind-d3q7', 'd2q9')


def get_model(name: str, partition: Union[str, float, None] = None) -> LatticeModel:
    """Construct a model by its configuration name"""
    if name == 'd1q2':
        return ClassicalD1Q2Model()
    if name == 'd1q3':
        return D1Q3Model()
    if name == 'upwind-d1q3':
        return UpwindModel(1)
    if name == 'upwind-d2q5':
        return UpwindModel(2)
    if name == 'upwind-d3q7':
        return UpwindModel(3)
    if name == 'd2q9':
        return D2Q9Model(partition if partition is not None else 'coordinate')
    raise ConfigurationError(ErrorCodes.UNSUPPORTED_MODEL, f"Unknown lattice model: {name}",
                             context={'available': list(MODEL_NAMES)})


def model_dimension(name: str) -> int:
    """Spatial dimension of a named model"""
    return get_model(name).dimension


def equilibrium(model: LatticeModel, U, fluxes: Sequence[ScalarFlux], lam: LambdaLike) -> np.ndarray:
    """f^eq_q(U), shape (Q,) + shape(U)"""
    return model.equilibrium(U, fluxes, lam)


def source_equilibrium(model: LatticeModel, U, S, fluxes: Sequence[ScalarFlux],
                       lam: LambdaLike, naive: bool = False) -> np.ndarray:
    """r_q(U, S) with sum r = S and sum v r = dG S (unless naive)"""
    return model.source_equilibrium(U, S, fluxes, lam, naive=naive)


def subcharacteristic_margin(model: LatticeModel, lam: LambdaLike,
                             fluxes: Sequence[ScalarFlux], U) -> float:
    """Smallest eigenvalue of the Chapman-Enskog matrix over the sampled U"""
    A = model.subcharacteristic_matrix(U, fluxes, lam)
    if A.shape[0] == 0:
        return np.inf
    if model.dimension == 1:
        return float(np.min(A[:, 0, 0]))
    return float(np.min(np.linalg.eigvalsh(A)))


def subcharacteristic_ok(model: LatticeModel, lam: LambdaLike, fluxes: Sequence[ScalarFlux],
                         U, tolerance: float = SUBCHARACTERISTIC_TOLERANCE) -> Tuple[bool, float]:
    """
    Positivity of the numerical diffusion over the sampled U.
    Zero margin counts as admissible.
    """
    margin = subcharacteristic_margin(model, lam, fluxes, U)
    scale = max(1.0, float(np.max(lambda_vector(lam, model.dimension))) ** 2)
    return margin >= -tolerance * scale, margin


def numerical_diffusion(model: LatticeModel, U, fluxes: Sequence[ScalarFlux], lam: LambdaLike,
                        omega_hat: float, dt: float) -> np.ndarray:
    """Leading-order diffusion matrix dt (1/omega_hat - 1/2) A(U)"""
    return dt * (1.0 / omega_hat - 0.5) * model.subcharacteristic_matrix(U, fluxes, lam)


def required_lambda(model: LatticeModel, fluxes: Sequence[ScalarFlux], U,
                    lam_floor: float = 0.0, max_doublings: int = 80) -> float:
    """Smallest uniform lattice speed with a non-negative sub-characteristic margin"""

    def admissible(lam: float) -> bool:
        return subcharacteristic_ok(model, lam, fluxes, U)[0]

    if lam_floor > 0.0 and admissible(lam_floor):
        return lam_floor

    low, high = 0.0, max(lam_floor, 1.0)
    for _ in range(max_doublings):
        if admissible(high):
            break
        low, high = high, 2.0 * high
    else:
        raise ConfigurationError(ErrorCodes.SUBCHARACTERISTIC_VIOLATED,
                                 "No admissible lattice speed found",
                                 context={'model': model.name, 'last_tried': high})

    for _ in range(200):
        if high - low <= 1e-14 * high:
            break
        middle = 0.5 * (low + high)
        if admissible(middle):
            high = middle
        else:
            low = middle
    return max(high, lam_floor)
