"""
Velocity Sets Module
Discrete velocity layouts (integer lattice offsets times the lattice speed)
"""

from typing import List, Sequence, Tuple, Union

import numpy as np

from ..utils.error_handler import ErrorCodes, ConfigurationError

LambdaLike = Union[float, Sequence[float], np.ndarray]

# D2Q9 in the q = 1..9 order; index 4 is the rest population
D2Q9_OFFSETS = (
    (1, 0), (0, 1), (1, 1), (-1, 1), (0, 0), (-1, 0), (0, -1), (-1, -1), (1, -1)
)


def upwind_offsets(dimension: int) -> List[Tuple[int, ...]]:
    """+e_1..+e_D, rest, -e_1..-e_D"""
    unit = np.eye(dimension, dtype=int)
    layout = [tuple(int(v) for v in unit[d]) for d in range(dimension)]
    layout.append(tuple([0] * dimension))
    layout.extend(tuple(int(-v) for v in unit[d]) for d in range(dimension))
    return layout


def lambda_vector(lam: LambdaLike, dimension: int) -> np.ndarray:
    """Validate lattice speeds and broadcast them to one value per direction"""
    values = np.atleast_1d(np.asarray(lam, dtype=float))
    if values.size == 1:
        values = np.full(dimension, float(values[0]))
    if values.size != dimension:
        raise ConfigurationError(
            ErrorCodes.INVALID_LATTICE_SPEED,
            f"Expected {dimension} lattice speeds, got {values.size}"
        )
    if not np.all(np.isfinite(values)) or np.any(values <= 0.0):
        raise ConfigurationError(
            ErrorCodes.INVALID_LATTICE_SPEED,
            f"Lattice speed must be positive, got {values.tolist()}"
        )
    if dimension >= 2 and np.any(values != values[0]):
        raise ConfigurationError(
            ErrorCodes.INVALID_LATTICE_SPEED,
            "Lattice speed must be uniform across directions for D >= 2",
            context={'lambda': values.tolist()}
        )
    return values


class VelocitySet:
    """Discrete velocities v_q = m_q * lambda"""

    def __init__(self, name: str, offsets: Sequence[Sequence[int]]):
        self.name = name
        self.offsets = np.asarray(offsets, dtype=int)
        if self.offsets.ndim != 2:
            raise ConfigurationError(ErrorCodes.UNSUPPORTED_MODEL,
                                     f"Offsets of {name} must be a Q x D table")

    @property
    def Q(self) -> int:
        return self.offsets.shape[0]

    @property
    def D(self) -> int:
        return self.offsets.shape[1]

    @property
    def rest_index(self):
        """Index of the zero velocity, or None"""
        zero = np.flatnonzero(~self.offsets.any(axis=1))
        return int(zero[0]) if zero.size else None

    def opposite(self, q: int) -> int:
        """Index of the population travelling along -m_q"""
        matches = np.flatnonzero((self.offsets == -self.offsets[q]).all(axis=1))
        return int(matches[0])

    def velocities(self, lam: LambdaLike) -> np.ndarray:
        """Q x D array of physical velocities"""
        return self.offsets * lambda_vector(lam, self.D)[np.newaxis, :]


VELOCITY_SETS = {
    'd1q2': lambda: VelocitySet('D1Q2', [(1,), (-1,)]),
    'd1q3': lambda: VelocitySet('D1Q3', [(1,), (0,), (-1,)]),
    'upwind-d1q3': lambda: VelocitySet('D1Q3', upwind_offsets(1)),
    'upwind-d2q5': lambda: VelocitySet('D2Q5', upwind_offsets(2)),
    'upwind-d3q7': lambda: VelocitySet('D3Q7', upwind_offsets(3)),
    'd2q9': lambda: VelocitySet('D2Q9', D2Q9_OFFSETS),
}


def get_velocity_set(name: str) -> VelocitySet:
    """Built-in velocity set by model name"""
    try:
        return VELOCITY_SETS[name]()
    except KeyError:
        raise ConfigurationError(ErrorCodes.UNSUPPORTED_MODEL, f"Unknown velocity set: {name}",
                                 context={'available': sorted(VELOCITY_SETS)})


def shift_field(field: np.ndarray, steps: int, direction: Sequence[int]) -> np.ndarray:
    """Value at x - steps * direction for every node, wrapping periodically"""
    axes = [axis for axis, d in enumerate(direction) if d != 0]
    if not axes or steps == 0:
        return field
    return np.roll(field, shift=[steps * int(direction[axis]) for axis in axes], axis=axes)
