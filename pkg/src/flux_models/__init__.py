# Flux Models Module
from .fluxes import (
    ScalarFlux,
    LinearFlux,
    BurgersFlux,
    ScaledFlux,
    FluxLibraryEntry,
    split_by_sign,
    verify_split_consistency,
    combine_fluxes,
    oblique_coefficients,
    build_flux,
    list_fluxes,
)

__all__ = [
    'ScalarFlux',
    'LinearFlux',
    'BurgersFlux',
    'ScaledFlux',
    'FluxLibraryEntry',
    'split_by_sign',
    'verify_split_consistency',
    'combine_fluxes',
    'oblique_coefficients',
    'build_flux',
    'list_fluxes',
]
