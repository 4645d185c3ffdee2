# References Module
from .exact_solutions import (
    BURGERS_SHOCK_TIME,
    LEVEQUE_YEE_LEVEL,
    EmbidReference,
    burgers_moc,
    leveque_yee_exact,
    leveque_yee_radius,
    leveque_yee_source,
    spekreijse_exact,
    embid_initial,
    embid_source,
    embid_boundary,
    embid_reference,
)

__all__ = [
    'BURGERS_SHOCK_TIME',
    'LEVEQUE_YEE_LEVEL',
    'EmbidReference',
    'burgers_moc',
    'leveque_yee_exact',
    'leveque_yee_radius',
    'leveque_yee_source',
    'spekreijse_exact',
    'embid_initial',
    'embid_source',
    'embid_boundary',
    'embid_reference',
]
