"""
Error Handling Module
Provides error codes, the exception hierarchy, logging setup and diagnostics
shared by the solver library and the benchmark runner
"""

import os
import sys
import json
import logging
from datetime import datetime
from typing import Dict, Any, Optional, List
from enum import Enum
import traceback


class ErrorCodes(Enum):
    """Error codes for the kinetic lattice Boltzmann benchmark suite"""

    # Configuration Errors (1000-1999)
    CONFIG_FILE_MISSING = 1001
    CONFIG_PARSE_FAILED = 1002
    UNKNOWN_CONFIG_KEY = 1003
    MISSING_REQUIRED_FIELD = 1004
    INVALID_VALUE = 1005
    INCOMPATIBLE_DIMENSIONS = 1006
    UNSUPPORTED_MODEL = 1007
    INVALID_LATTICE_SPEED = 1008
    INVALID_RELAXATION = 1009
    FLUX_NOT_ZERO_AT_ORIGIN = 1010

    # Flux / Model Domain Errors (2000-2999)
    VALUE_OUT_OF_RANGE = 2001
    SHAPE_MISMATCH = 2002
    NON_MONOTONE_SPACING = 2003
    SUBCHARACTERISTIC_VIOLATED = 2004

    # Solver Runtime Errors (3000-3999)
    MOMENT_SOLVE_FAILED = 3001
    MISSING_BOUNDARY_DATA = 3002
    BOUNDARY_MODEL_MISMATCH = 3003
    NON_FINITE_STATE = 3004
    REFERENCE_NOT_CONVERGED = 3005
    CHARACTERISTICS_NOT_CONVERGED = 3006

    # Oracle / Diagnostics Errors (4000-4999)
    INSUFFICIENT_HISTORY = 4001
    ORACLE_UNSUPPORTED = 4002

    # File System Errors (7000-7999)
    FILE_NOT_FOUND = 7001
    FILE_READ_ERROR = 7002
    FILE_WRITE_ERROR = 7003
    DIRECTORY_CREATION_FAILED = 7004

    # Acceptance Errors (9000-9999)
    ACCEPTANCE_CHECK_FAILED = 9001
    EXPECTED_METRIC_MISSING = 9002


class LatticeBoltzmannError(Exception):
    """Base error carrying an error code and a context dictionary"""

    exit_code = 2

    def __init__(self, code: ErrorCodes, message: str,
                 context: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.code = code
        self.message = message
        self.context = context or {}

    def __str__(self) -> str:
        return f"[{self.code.name}] {self.message}"


class ConfigurationError(LatticeBoltzmannError):
    """Invalid configuration, unsupported model pairing or invalid parameter"""

    exit_code = 1

    def __init__(self, code: ErrorCodes, message: str,
                 context: Optional[Dict[str, Any]] = None,
                 problems: Optional[List[str]] = None):
        super().__init__(code, message, context)
        self.problems = problems or []

    def __str__(self) -> str:
        if not self.problems:
            return super().__str__()
        lines = "\n".join(f"  - {p}" for p in self.problems)
        return f"[{self.code.name}] {self.message}\n{lines}"


class FluxDomainError(LatticeBoltzmannError):
    """Input outside the admissible domain of an operation"""


class SolverError(LatticeBoltzmannError):
    """Failure while evolving or post-processing a kinetic state"""


class AcceptanceError(LatticeBoltzmannError):
    """A benchmark metric failed its expected-value comparison"""

    exit_code = 3


class ErrorHandler:
    """Error bookkeeping with logging and remediation suggestions"""

    LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

    def __init__(self):
        self.logger = logging.getLogger(__name__)
        self.error_count = 0
        self.error_history = []

    def setup_logging(self, log_file: Optional[str] = None, level: str = "INFO"):
        """Configure root logging once for the whole process"""
        handlers = [logging.StreamHandler(sys.stdout)]
        if log_file:
            directory = os.path.dirname(log_file)
            if directory:
                os.makedirs(directory, exist_ok=True)
            handlers.append(logging.FileHandler(log_file))

        logging.basicConfig(
            level=getattr(logging, str(level).upper(), logging.INFO),
            format=self.LOG_FORMAT,
            handlers=handlers,
            force=True
        )

    def handle_error(self, error_code: ErrorCodes, error_message: str,
                     exception: Optional[Exception] = None,
                     context: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        """Log an error and return its structured description"""

        error_info = {
            'error_code': error_code.value,
            'error_name': error_code.name,
            'message': error_message,
            'timestamp': datetime.now().isoformat(),
            'context': context or {},
            'traceback': None,
            'suggestions': self.get_error_suggestions(error_code)
        }

        if exception:
            error_info['exception_type'] = type(exception).__name__
            error_info['exception_message'] = str(exception)
            error_info['traceback'] = traceback.format_exc()

        self.logger.error(f"[{error_code.name}] {error_message}")
        if context:
            self.logger.error(f"Context: {json.dumps(context, indent=2, default=str)}")

        self.error_count += 1
        self.error_history.append(error_info)

        # Keep only last 100 errors
        if len(self.error_history) > 100:
            self.error_history = self.error_history[-100:]

        return error_info

    def get_error_suggestions(self, error_code: ErrorCodes) -> List[str]:
        """Get suggestions for resolving specific errors"""
        suggestions = {
            ErrorCodes.CONFIG_FILE_MISSING: [
                "Check the path passed on the command line",
                "Start from one of the presets in config/"
            ],
            ErrorCodes.UNKNOWN_CONFIG_KEY: [
                "Check the key spelling against the documented sections",
                "Remove keys that belong to a different problem"
            ],
            ErrorCodes.INCOMPATIBLE_DIMENSIONS: [
                "Pick a model whose dimension matches the problem",
                "spekreijse needs d2q9 or upwind-d2q5, ly-3d needs upwind-d3q7"
            ],
            ErrorCodes.INVALID_RELAXATION: [
                "Explicit relaxation needs 0 < omega < 2",
                "Use mode = semi-implicit for large omega"
            ],
            ErrorCodes.SUBCHARACTERISTIC_VIOLATED: [
                "Increase lambda or set lambda = auto",
                "Enable adaptive lambda for growing wave speeds"
            ],
            ErrorCodes.MOMENT_SOLVE_FAILED: [
                "Reduce the time step through a larger lambda",
                "Check the source term derivative for singular points"
            ],
            ErrorCodes.REFERENCE_NOT_CONVERGED: [
                "Raise the iteration cap of the reference solve",
                "Use a coarser reference resolution"
            ],
            ErrorCodes.FILE_WRITE_ERROR: [
                "Check permissions of the output directory",
                "Override the directory with LBM_OUTPUT_DIR"
            ]
        }

        return suggestions.get(error_code, ["Re-run with --verbose and inspect the log"])

    def get_error_type_distribution(self) -> Dict[str, int]:
        """Get distribution of error types"""
        distribution = {}
        for error in self.error_history:
            error_category = str(error['error_code'])[0] + "000-" + str(error['error_code'])[0] + "999"
            distribution[error_category] = distribution.get(error_category, 0) + 1
        return distribution


# Global error handler instance
error_handler = ErrorHandler()


def setup_logging(log_file: Optional[str] = None, level: Optional[str] = None):
    """Convenience function for configuring logging"""
    error_handler.setup_logging(log_file, level or os.getenv('LBM_LOG_LEVEL', 'INFO'))


def log_error(error_code: ErrorCodes, message: str, exception: Optional[Exception] = None,
              context: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """Convenience function for logging errors"""
    return error_handler.handle_error(error_code, message, exception, context)


def check_system_health(output_dir: Optional[str] = None) -> Dict[str, Any]:
    """Check numerical dependencies and the output directory"""
    health_status = {
        'status': 'healthy',
        'checks': {},
        'warnings': [],
        'errors': []
    }

    package_checks = [
        ('numpy', 'numpy'),
        ('scipy', 'scipy'),
        ('pandas', 'pandas'),
        ('python-dotenv', 'dotenv')
    ]

    for package_name, import_name in package_checks:
        try:
            __import__(import_name)
            health_status['checks'][f'package_{package_name}'] = True
        except ImportError:
            health_status['checks'][f'package_{package_name}'] = False
            health_status['errors'].append(f"Required package missing: {package_name}")

    if output_dir:
        try:
            os.makedirs(output_dir, exist_ok=True)
            writable = os.access(output_dir, os.W_OK)
        except OSError as e:
            writable = False
            health_status['errors'].append(f"Output directory unusable: {e}")
        health_status['checks']['output_dir'] = writable
        if not writable and not health_status['errors']:
            health_status['errors'].append(f"Output directory not writable: {output_dir}")

    if health_status['errors']:
        health_status['status'] = 'unhealthy'
    elif health_status['warnings']:
        health_status['status'] = 'warning'

    return health_status
