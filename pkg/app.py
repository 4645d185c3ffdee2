#!/usr/bin/env python3
"""
🌊 Kinetic Benchmark Suite - Command Line Entry Point
Runs lattice Boltzmann benchmark experiments from configuration files
"""

import argparse
import os
import sys
from typing import List, Optional

from dotenv import load_dotenv

# Add src directory to Python path
sys.path.append(os.path.join(os.path.dirname(__file__), 'src'))

from src.utils.error_handler import (
    ErrorCodes, LatticeBoltzmannError, ConfigurationError, log_error, check_system_health, setup_logging
)
from src.experiments import ExperimentRunner, parse_config

# Load environment configuration
load_dotenv()


class KineticBenchmarkApp:
    """
    🚀 Main application controller for the benchmark suite
    Parses experiment files, runs them and reports results
    """

    def __init__(self, threads: int = 1, log_file: Optional[str] = None, verbose: bool = False):
        """Configure logging and worker count"""
        setup_logging(log_file, 'DEBUG' if verbose else None)
        if threads < 1:
            raise ConfigurationError(ErrorCodes.INVALID_VALUE, f"--threads must be at least 1, got {threads}")
        self.threads = threads

    def _check_system_startup(self, output_dir: str) -> dict:
        """Verify packages and the output directory before a run"""
        health = check_system_health(output_dir)
        if health['status'] == 'unhealthy':
            print(f"⚠️ System issues detected: {health['errors']}")
            for error in health['errors']:
                log_error(ErrorCodes.DIRECTORY_CREATION_FAILED, error)
        return health

    def _prepare(self, config_path: str) -> ExperimentRunner:
        config = parse_config(config_path)
        self._check_system_startup(config.output_dir)
        print(f"🔧 Experiment '{config.name}': {config.problem} with {config.model}")
        return ExperimentRunner(config, workers=self.threads)

    def run(self, config_path: str) -> int:
        """Execute an experiment and write its CSV artifacts"""
        runner = self._prepare(config_path)
        artifacts = runner.run()
        self._print_summary(artifacts)
        return 0

    def check(self, config_path: str) -> int:
        """Execute an experiment and compare it against its expected values"""
        runner = self._prepare(config_path)
        artifacts = runner.run()
        self._print_summary(artifacts)
        results = runner.check(artifacts)
        print(f"✅ {len(results)} acceptance check(s) passed")
        return 0

    def table(self, config_path: str) -> int:
        """Convergence study of the Burgers sine problem"""
        runner = self._prepare(config_path)
        if runner.config.problem != 'burgers-sine':
            raise ConfigurationError(ErrorCodes.INVALID_VALUE,
                                     f"table needs the burgers-sine problem, got {runner.config.problem}")
        artifacts = runner.run()
        self._print_table(artifacts['convergence'], runner.config.omegas)
        print(f"📄 Table written to {artifacts['files']['convergence']}")
        return 0

    def _print_summary(self, artifacts: dict):
        print("📊 Summary")
        for metric, value in artifacts['summary'].items():
            print(f"   {metric} = {value:.6g}")
        for kind, path in artifacts['files'].items():
            print(f"📄 {kind}: {path}")

    def _print_table(self, rows: List[dict], omegas: List[float]):
        header = f"{'N':>6} {'dx':>10}" + "".join(f"  {'L2 w=' + repr(w):>14} {'order':>7}" for w in omegas)
        print(header)
        print("-" * len(header))
        for row in rows:
            line = f"{row['N']:>6} {row['dx']:>10.6f}"
            for omega in omegas:
                l2 = row.get(f"L2_omega={omega!r}")
                order = row.get(f"order_omega={omega!r}")
                l2_text = f"{l2:.3e}" if l2 is not None else "-"
                order_text = f"{order:.3f}" if order is not None and order == order else "-"
                line += f"  {l2_text:>14} {order_text:>7}"
            print(line)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='app.py',
        description='Lattice Boltzmann benchmark experiments for scalar conservation laws'
    )
    parser.add_argument('--threads', type=int, default=1,
                        help='worker threads for the collision step (default: 1)')
    parser.add_argument('--log-file', default=None, help='also write log records to this file')
    parser.add_argument('--verbose', '-v', action='store_true', help='debug logging')

    commands = parser.add_subparsers(dest='command', required=True)
    for name, text in (('run', 'execute an experiment'),
                       ('check', 'execute and compare against the expected-values file'),
                       ('table', 'run the Burgers convergence study and print the table')):
        command = commands.add_parser(name, help=text)
        command.add_argument('config', help='experiment configuration file')
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        app = KineticBenchmarkApp(threads=args.threads, log_file=args.log_file, verbose=args.verbose)
        return getattr(app, args.command)(args.config)
    except LatticeBoltzmannError as e:
        log_error(e.code, e.message, e, e.context)
        print(f"❌ {e}")
        return e.exit_code


if __name__ == '__main__':
    sys.exit(main())
