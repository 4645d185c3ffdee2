"""
Boundary Closures Module
Characteristic D2Q9 face and corner closures and inflow population fills
"""

import logging
from typing import Dict, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)

D2Q9_REST = 4

# face -> (unknown, opposite of each unknown, shared populations)
D2Q9_FACE_CLOSURES: Dict[str, Tuple[Tuple[int, ...], Tuple[int, ...], Tuple[int, ...]]] = {
    'left': ((0, 2, 8), (5, 7, 3), (1, 4, 6)),
    'right': ((3, 5, 7), (8, 0, 2), (1, 4, 6)),
    'bottom': ((2, 1, 3), (7, 6, 8), (0, 4, 5)),
    'top': ((8, 6, 7), (3, 1, 2), (0, 4, 5)),
}

# corner -> ((unknown, opposite) pairs, leftover pair sharing the rest defect)
D2Q9_CORNER_CLOSURES: Dict[str, Tuple[Tuple[Tuple[int, int], ...], Tuple[int, int]]] = {
    'bottom-left': (((0, 5), (2, 7), (1, 6)), (3, 8)),
    'bottom-right': (((1, 6), (3, 8), (5, 0)), (2, 7)),
    'top-left': (((0, 5), (8, 3), (6, 1)), (2, 7)),
    'top-right': (((5, 0), (6, 1), (7, 2)), (3, 8)),
}

D2Q9_CORNER_INDEX = {
    'bottom-left': (0, 0),
    'bottom-right': (-1, 0),
    'top-left': (0, -1),
    'top-right': (-1, -1),
}

FACE_AXES = {'left': (0, 0), 'right': (0, -1), 'bottom': (1, 0), 'top': (1, -1),
             'back': (2, 0), 'front': (2, -1)}

FACE_NAMES = (('left', 'right'), ('bottom', 'top'), ('back', 'front'))


def face_slab(face: str, dimension: int, periodic: Sequence[bool], exclude_corners: bool = True) -> tuple:
    """Index of the boundary nodes of one face"""
    axis, side = FACE_AXES[face]
    index = []
    for ax in range(dimension):
        if ax == axis:
            index.append(side)
        elif exclude_corners and not periodic[ax]:
            index.append(slice(1, -1))
        else:
            index.append(slice(None))
    return tuple(index)


def inbound_populations(offsets: np.ndarray, face: str) -> np.ndarray:
    """Populations that streaming leaves unresolved on a face"""
    axis, side = FACE_AXES[face]
    entering = 1 if side == 0 else -1
    return np.flatnonzero(np.asarray(offsets)[:, axis] == entering)


def unresolved_mask(offsets: np.ndarray, shape: Tuple[int, ...], periodic: Sequence[bool]) -> np.ndarray:
    """Boolean (Q,) + shape mask of populations streamed in through a non-periodic face"""
    offsets = np.asarray(offsets)
    mask = np.zeros((offsets.shape[0],) + tuple(shape), dtype=bool)
    for axis, is_periodic in enumerate(periodic):
        if is_periodic:
            continue
        for face in FACE_NAMES[axis]:
            _, side = FACE_AXES[face]
            index = [slice(None)] * len(shape)
            index[axis] = side
            for q in inbound_populations(offsets, face):
                mask[(q,) + tuple(index)] = True
    return mask


def apply_d2q9_boundaries(f: np.ndarray, f_eq: np.ndarray, faces: Sequence[str] = ('left', 'right', 'bottom', 'top'),
                          corners: bool = True, periodic: Sequence[bool] = (False, False)) -> np.ndarray:
    """
    Characteristic closure of the unknown D2Q9 populations, in place.

    Face nodes: f_q = f^eq_q - f^neq_opp(q) - (1/3) sum f^neq over the three
    populations tangent to the face. Corners reflect three non-equilibrium
    parts and give the leftover diagonal pair half the rest defect each.
    f_eq must hold the boundary-data equilibrium on every closed node.
    """
    for face in faces:
        unknown, opposite, shared = D2Q9_FACE_CLOSURES[face]
        idx = face_slab(face, 2, periodic, exclude_corners=corners)
        shared_term = sum(f[(q,) + idx] - f_eq[(q,) + idx] for q in shared) / 3.0
        for q, opp in zip(unknown, opposite):
            f[(q,) + idx] = f_eq[(q,) + idx] - (f[(opp,) + idx] - f_eq[(opp,) + idx]) - shared_term

    if corners:
        for corner, (pairs, leftover) in D2Q9_CORNER_CLOSURES.items():
            i, j = D2Q9_CORNER_INDEX[corner]
            for q, opp in pairs:
                f[q, i, j] = f_eq[q, i, j] - (f[opp, i, j] - f_eq[opp, i, j])
            rest_defect = f[D2Q9_REST, i, j] - f_eq[D2Q9_REST, i, j]
            for q in leftover:
                f[q, i, j] = f_eq[q, i, j] - 0.5 * rest_defect
    return f
