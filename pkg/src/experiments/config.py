"""
Experiment Configuration Module
Strict INI-style experiment files: every problem in a file is collected and
reported at once, with the line it was found on
"""

import configparser
import logging
import math
import os
import re
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from ..lattice_models.equilibria import MODEL_NAMES, get_model, parse_partition
from ..solver.lattice_solver import RelaxationMode
from ..utils.error_handler import ErrorCodes, ConfigurationError, LatticeBoltzmannError
from .problems import PROBLEMS

logger = logging.getLogger(__name__)

SCHEMA: Dict[str, Tuple[str, ...]] = {
    'experiment': ('name', 'problem', 'model'),
    'relaxation': ('mode', 'omega'),
    'grid': ('nodes',),
    'lattice': ('lambda', 'adaptive', 'subcharacteristic'),
    'problem': ('mu', 'theta', 'partition', 'source_model', 'final_time', 'iterations',
                'reference_resolution'),
    'output': ('directory', 'oracle', 'oracle_depth', 'expected'),
}

DEFAULT_OUTPUT_DIR = 'results'
DEFAULT_REFERENCE_RESOLUTION = 4001
DEFAULT_ORACLE_DEPTH = 64

_SECTION = re.compile(r'^\s*\[([^\]]+)\]')
_KEY = re.compile(r'^([^\s=:#;\[][^=:]*?)\s*[=:]')
_ANGLE = re.compile(r'^(?:([0-9.]+)\s*\*?\s*)?pi(?:\s*/\s*([0-9.]+))?$')


@dataclass
class ExperimentConfig:
    """Validated experiment description"""
    name: str
    problem: str
    model: str
    relaxation_mode: str = 'explicit'
    omegas: List[float] = field(default_factory=lambda: [1.0])
    nodes: List[int] = field(default_factory=list)
    lam: Optional[float] = 1.0
    adaptive: bool = False
    subcharacteristic: str = 'warn'
    mu: Optional[float] = None
    theta: Optional[float] = None
    partition: str = 'coordinate'
    source_model: str = 'well-balanced'
    final_time: Optional[float] = None
    iterations: Optional[int] = None
    reference_resolution: int = DEFAULT_REFERENCE_RESOLUTION
    output_dir: str = DEFAULT_OUTPUT_DIR
    oracle: bool = False
    oracle_depth: int = DEFAULT_ORACLE_DEPTH
    expected: Optional[str] = None
    path: Optional[str] = None

    @property
    def output_path(self) -> str:
        return os.path.join(self.output_dir, self.name)

    def relaxation(self, omega: float) -> RelaxationMode:
        return RelaxationMode(self.relaxation_mode, omega)

    def to_dict(self) -> Dict[str, Any]:
        return {k: v for k, v in self.__dict__.items()}


def _key_lines(text: str) -> Dict[Tuple[str, Optional[str]], int]:
    """Line numbers of sections (key None) and of keys within them"""
    lines: Dict[Tuple[str, Optional[str]], int] = {}
    section = None
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped[0] in '#;':
            continue
        match = _SECTION.match(line)
        if match:
            section = match.group(1).strip()
            lines.setdefault((section, None), number)
            continue
        match = _KEY.match(line)
        if match and section is not None:
            lines.setdefault((section, match.group(1).strip().lower()), number)
    return lines


def parse_angle(text: str) -> float:
    """Plain number or a multiple/fraction of pi such as 'pi/4'"""
    text = text.strip().lower()
    match = _ANGLE.match(text)
    if match:
        factor = float(match.group(1)) if match.group(1) else 1.0
        divisor = float(match.group(2)) if match.group(2) else 1.0
        return factor * math.pi / divisor
    return float(text)


def _float_list(text: str) -> List[float]:
    return [float(part) for part in text.split(',') if part.strip()]


def _int_list(text: str) -> List[int]:
    return [int(part) for part in text.split(',') if part.strip()]


class _Collector:
    """Accumulates problems while reading typed values"""

    def __init__(self, parser: configparser.ConfigParser, lines: Dict, path: str):
        self.parser = parser
        self.lines = lines
        self.path = path
        self.problems: List[str] = []
        self.codes: List[ErrorCodes] = []

    def where(self, section: str, key: Optional[str] = None) -> str:
        line = self.lines.get((section, key))
        return f"line {line}" if line else os.path.basename(self.path)

    def add(self, section: str, key: Optional[str], message: str,
            code: ErrorCodes = ErrorCodes.INVALID_VALUE):
        self.problems.append(f"{self.where(section, key)}: {message}")
        self.codes.append(code)

    def fail(self, message: str):
        raise ConfigurationError(self.codes[0] if self.codes else ErrorCodes.INVALID_VALUE,
                                 message, context={"path": self.path}, problems=self.problems)

    def get(self, section: str, key: str, convert, default=None):
        if not self.parser.has_option(section, key):
            return default
        raw = self.parser.get(section, key)
        try:
            return convert(raw)
        except (ValueError, TypeError, LatticeBoltzmannError) as e:
            self.add(section, key, f"invalid value for [{section}] {key}: {raw!r} ({e})")
            return default

    def boolean(self, section: str, key: str, default: bool) -> bool:
        def convert(raw):
            value = raw.strip().lower()
            if value not in configparser.ConfigParser.BOOLEAN_STATES:
                raise ValueError("expected true/false")
            return configparser.ConfigParser.BOOLEAN_STATES[value]
        return self.get(section, key, convert, default)


def parse_config(path: str) -> ExperimentConfig:
    """Read and validate an experiment file; raises ConfigurationError with every problem found"""
    if not os.path.exists(path):
        raise ConfigurationError(ErrorCodes.CONFIG_FILE_MISSING, f"Configuration file not found: {path}")
    with open(path, 'r', encoding='utf-8') as handle:
        text = handle.read()

    parser = configparser.ConfigParser(interpolation=None, strict=True)
    try:
        parser.read_string(text, source=path)
    except configparser.Error as e:
        line = getattr(e, 'lineno', None)
        where = f"line {line}: " if line else ""
        raise ConfigurationError(ErrorCodes.CONFIG_PARSE_FAILED, f"{where}{e}",
                                 context={'path': path})

    lines = _key_lines(text)
    reader = _Collector(parser, lines, path)

    for section in parser.sections():
        if section not in SCHEMA:
            reader.add(section, None, f"unknown section [{section}]", ErrorCodes.UNKNOWN_CONFIG_KEY)
            continue
        for key in parser.options(section):
            if key not in SCHEMA[section]:
                reader.add(section, key, f"unknown key '{key}' in [{section}]", ErrorCodes.UNKNOWN_CONFIG_KEY)

    problem_name = reader.get('experiment', 'problem', str.strip)
    if problem_name is None:
        reader.add('experiment', None, "missing required field [experiment] problem",
                   ErrorCodes.MISSING_REQUIRED_FIELD)
        reader.fail(f"Invalid configuration {path}")
    if problem_name not in PROBLEMS:
        reader.add('experiment', 'problem',
                   f"unknown problem '{problem_name}' (available: {', '.join(PROBLEMS)})")
        reader.fail(f"Invalid configuration {path}")
    problem = PROBLEMS[problem_name]

    default_name = os.path.splitext(os.path.basename(path))[0]
    config = ExperimentConfig(
        name=reader.get('experiment', 'name', str.strip, default_name),
        problem=problem_name,
        model=reader.get('experiment', 'model', str.strip, problem.default_model),
        relaxation_mode=reader.get('relaxation', 'mode', str.strip, 'explicit'),
        omegas=reader.get('relaxation', 'omega', _float_list, [1.0]),
        nodes=reader.get('grid', 'nodes', _int_list, list(problem.default_nodes)),
        lam=reader.get('lattice', 'lambda',
                       lambda raw: None if raw.strip().lower() == 'auto' else float(raw),
                       problem.default_lambda),
        adaptive=reader.boolean('lattice', 'adaptive', problem.default_adaptive),
        subcharacteristic=reader.get('lattice', 'subcharacteristic', str.strip, 'warn'),
        mu=reader.get('problem', 'mu', float),
        theta=reader.get('problem', 'theta', parse_angle),
        partition=reader.get('problem', 'partition', str.strip, 'coordinate'),
        source_model=reader.get('problem', 'source_model', str.strip, 'well-balanced'),
        final_time=reader.get('problem', 'final_time', float),
        iterations=reader.get('problem', 'iterations', int),
        reference_resolution=reader.get('problem', 'reference_resolution', int,
                                        DEFAULT_REFERENCE_RESOLUTION),
        output_dir=reader.get('output', 'directory', str.strip, DEFAULT_OUTPUT_DIR),
        oracle=reader.boolean('output', 'oracle', False),
        oracle_depth=reader.get('output', 'oracle_depth', int, DEFAULT_ORACLE_DEPTH),
        expected=reader.get('output', 'expected', str.strip),
        path=os.path.abspath(path),
    )

    env_dir = os.getenv('LBM_OUTPUT_DIR')
    if env_dir:
        config.output_dir = env_dir
    if config.expected and not os.path.isabs(config.expected):
        config.expected = os.path.join(os.path.dirname(config.path), config.expected)
    if config.final_time is None and config.iterations is None:
        config.final_time = problem.default_final_time
        config.iterations = problem.default_iterations

    _validate(config, problem, reader)
    if reader.problems:
        reader.fail(f"Invalid configuration {path}")
    logger.info(f"Loaded experiment '{config.name}' ({config.problem}, {config.model}) from {path}")
    return config


def _validate(config: ExperimentConfig, problem, reader: _Collector):
    if config.model not in MODEL_NAMES:
        reader.add('experiment', 'model',
                   f"unknown model '{config.model}' (available: {', '.join(MODEL_NAMES)})",
                   ErrorCodes.UNSUPPORTED_MODEL)
    elif config.model not in problem.models:
        dimension = get_model(config.model).dimension
        reader.add('experiment', 'model',
                   f"model {config.model} ({dimension}-D) is incompatible with {config.problem} "
                   f"({problem.dimension}-D; allowed: {', '.join(problem.models)})",
                   ErrorCodes.INCOMPATIBLE_DIMENSIONS)

    for key in problem.required:
        if getattr(config, key) is None:
            reader.add('problem', None, f"missing required field [problem] {key} for {config.problem}",
                       ErrorCodes.MISSING_REQUIRED_FIELD)

    if not config.omegas:
        reader.add('relaxation', 'omega', "at least one omega is required")
    for omega in config.omegas:
        try:
            config.relaxation(omega)
        except ConfigurationError as e:
            reader.add('relaxation', 'omega', e.message)

    if not config.nodes or any(n < 3 for n in config.nodes):
        reader.add('grid', 'nodes', f"node counts must be at least 3, got {config.nodes}")
    elif problem.name != 'burgers-sine' and len(config.nodes) > 1:
        reader.add('grid', 'nodes', "several resolutions are only supported for burgers-sine")

    if config.lam is not None and not config.lam > 0.0:
        reader.add('lattice', 'lambda', f"lambda must be positive or auto, got {config.lam}")
    if config.subcharacteristic not in ('warn', 'fail'):
        reader.add('lattice', 'subcharacteristic', f"expected warn or fail, got {config.subcharacteristic!r}")
    if config.source_model not in ('well-balanced', 'naive'):
        reader.add('problem', 'source_model',
                   f"expected well-balanced or naive, got {config.source_model!r}")
    try:
        parse_partition(config.partition)
    except ConfigurationError as e:
        reader.add('problem', 'partition', e.message)

    if config.final_time is not None and config.iterations is not None:
        reader.add('problem', 'final_time', "give either final_time or iterations, not both")
    if config.final_time is not None and not config.final_time > 0.0:
        reader.add('problem', 'final_time', f"final_time must be positive, got {config.final_time}")
    if config.iterations is not None and config.iterations < 0:
        reader.add('problem', 'iterations', f"iterations must be non-negative, got {config.iterations}")
    if config.oracle and problem.has_source:
        reader.add('output', 'oracle', f"the finite-difference oracle does not cover source terms ({config.problem})",
                   ErrorCodes.ORACLE_UNSUPPORTED)
    if config.oracle and not problem.periodic:
        reader.add('output', 'oracle', f"the finite-difference oracle needs a periodic domain ({config.problem})",
                   ErrorCodes.ORACLE_UNSUPPORTED)
    if config.oracle_depth < 1:
        reader.add('output', 'oracle_depth', f"oracle_depth must be at least 1, got {config.oracle_depth}")
