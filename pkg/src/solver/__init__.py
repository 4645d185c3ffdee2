# Solver Module
from .lattice_solver import (
    RelaxationKind,
    RelaxationMode,
    effective_omega,
    semi_implicit_omega,
    Grid,
    FaceCondition,
    BoundarySpec,
    SourceTerm,
    SolverState,
    LatticeSolver,
    collide,
    stream,
    moments,
    select_timestep,
    newton_moment_solve,
    step,
)
from .boundaries import (
    D2Q9_FACE_CLOSURES,
    D2Q9_CORNER_CLOSURES,
    apply_d2q9_boundaries,
    inbound_populations,
    unresolved_mask,
)

__all__ = [
    'RelaxationKind',
    'RelaxationMode',
    'effective_omega',
    'semi_implicit_omega',
    'Grid',
    'FaceCondition',
    'BoundarySpec',
    'SourceTerm',
    'SolverState',
    'LatticeSolver',
    'collide',
    'stream',
    'moments',
    'select_timestep',
    'newton_moment_solve',
    'step',
    'D2Q9_FACE_CLOSURES',
    'D2Q9_CORNER_CLOSURES',
    'apply_d2q9_boundaries',
    'inbound_populations',
    'unresolved_mask',
]
