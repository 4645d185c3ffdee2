# Macroscopic Finite-Difference Oracle Module
from .oracle import (
    HistoryLevel,
    MacroHistory,
    MacroFDOracle,
    DEFAULT_DEPTH_CAP,
    underlying_field,
    underlying_update,
    reconstruction_weights,
    weight_sum,
    multistep_field,
    multistep_reconstruct,
    consistency_residual_field,
    consistency_residual,
    consistency_residual_norm,
    tv_bound_check,
    positivity_check,
)

__all__ = [
    'HistoryLevel',
    'MacroHistory',
    'MacroFDOracle',
    'DEFAULT_DEPTH_CAP',
    'underlying_field',
    'underlying_update',
    'reconstruction_weights',
    'weight_sum',
    'multistep_field',
    'multistep_reconstruct',
    'consistency_residual_field',
    'consistency_residual',
    'consistency_residual_norm',
    'tv_bound_check',
    'positivity_check',
]
