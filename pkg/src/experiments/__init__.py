# Experiments Module
from .config import ExperimentConfig, parse_config, parse_angle, SCHEMA
from .problems import Problem, PROBLEMS, get_problem
from .runner import ExperimentRunner, run_experiment, run_tag
from .csv_io import (
    write_field,
    read_field,
    write_table,
    write_summary,
    read_expected,
    check_expected,
    compare_metric,
)

__all__ = [
    'ExperimentConfig',
    'parse_config',
    'parse_angle',
    'SCHEMA',
    'Problem',
    'PROBLEMS',
    'get_problem',
    'ExperimentRunner',
    'run_experiment',
    'run_tag',
    'write_field',
    'read_field',
    'write_table',
    'write_summary',
    'read_expected',
    'check_expected',
    'compare_metric',
]
