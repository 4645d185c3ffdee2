# Diagnostics Module
from .metrics import (
    NormReport,
    H_FUNCTIONS,
    total_variation,
    total_variation_by_axis,
    l2_error,
    convergence_order,
    conserved_sum,
    positivity_scan,
    h_monitor,
    discontinuity_location,
    level_crossings,
    shock_location,
)
from .recorder import DiagnosticsRecorder

__all__ = [
    'NormReport',
    'H_FUNCTIONS',
    'total_variation',
    'total_variation_by_axis',
    'l2_error',
    'convergence_order',
    'conserved_sum',
    'positivity_scan',
    'h_monitor',
    'discontinuity_location',
    'level_crossings',
    'shock_location',
    'DiagnosticsRecorder',
]
