# Utils package
from .error_handler import (
    ErrorCodes,
    ErrorHandler,
    LatticeBoltzmannError,
    ConfigurationError,
    FluxDomainError,
    SolverError,
    AcceptanceError,
    log_error,
    setup_logging,
    check_system_health,
)

__all__ = [
    'ErrorCodes',
    'ErrorHandler',
    'LatticeBoltzmannError',
    'ConfigurationError',
    'FluxDomainError',
    'SolverError',
    'AcceptanceError',
    'log_error',
    'setup_logging',
    'check_system_health',
]
