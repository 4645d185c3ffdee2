# Lattice Models Module
from .velocity_sets import VelocitySet, get_velocity_set, lambda_vector, upwind_offsets, shift_field, D2Q9_OFFSETS
from .equilibria import (
    LatticeModel,
    ClassicalD1Q2Model,
    D1Q3Model,
    SplitFluxModel,
    UpwindModel,
    D2Q9Model,
    MODEL_NAMES,
    get_model,
    model_dimension,
    parse_partition,
    d2q9_partition,
    equilibrium,
    source_equilibrium,
    subcharacteristic_margin,
    subcharacteristic_ok,
    numerical_diffusion,
    required_lambda,
)

__all__ = [
    'VelocitySet',
    'get_velocity_set',
    'lambda_vector',
    'upwind_offsets',
    'shift_field',
    'D2Q9_OFFSETS',
    'LatticeModel',
    'ClassicalD1Q2Model',
    'D1Q3Model',
    'SplitFluxModel',
    'UpwindModel',
    'D2Q9Model',
    'MODEL_NAMES',
    'get_model',
    'model_dimension',
    'parse_partition',
    'd2q9_partition',
    'equilibrium',
    'source_equilibrium',
    'subcharacteristic_margin',
    'subcharacteristic_ok',
    'numerical_diffusion',
    'required_lambda',
]
