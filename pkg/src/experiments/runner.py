"""
Experiment Runner Module
Builds solvers from an ExperimentConfig, runs them with per-step
diagnostics and writes the CSV artifacts of the experiment
"""

import logging
import os
from typing import Any, Dict, List, Tuple

import numpy as np
import pandas as pd

from ..diagnostics.metrics import NormReport, convergence_order
from ..diagnostics.recorder import DiagnosticsRecorder
from ..lattice_models.equilibria import get_model, required_lambda
from ..macrofd.oracle import MacroFDOracle
from ..solver.lattice_solver import LatticeSolver, SolverState, Grid
from ..utils.error_handler import ErrorCodes, ConfigurationError
from .config import ExperimentConfig
from .csv_io import write_field, write_frame, write_summary, write_table, read_expected, check_expected
from .problems import get_problem

logger = logging.getLogger(__name__)


def run_tag(omega: float, nodes: int) -> str:
    return f"omega={omega!r},N={nodes}"


class ExperimentRunner:
    """
    Runs every (omega, N) combination of an experiment.

    Outputs under <output_dir>/<name>/: diagnostics.csv, field.csv,
    summary.csv and, for the Burgers study, convergence.csv.
    """

    def __init__(self, config: ExperimentConfig, workers: int = 1):
        self.config = config
        self.workers = max(1, int(workers))
        self.problem = get_problem(config.problem)

    def build_solver(self, omega: float, nodes: int) -> Tuple[LatticeSolver, SolverState, Grid]:
        """Solver and initial state of one run"""
        config = self.config
        problem = self.problem
        grid = problem.grid(nodes)
        partition = config.partition if config.model == 'd2q9' else None
        model = get_model(config.model, partition)
        fluxes = problem.fluxes(config)
        U0 = problem.initial(grid, config)

        lam = config.lam
        if lam is None:
            lam = required_lambda(model, fluxes, U0)
            logger.info(f"Lattice speed from the sub-characteristic bound: {lam:.6g}")

        solver = LatticeSolver(
            model, fluxes, grid, config.relaxation(omega), lam,
            boundary=problem.boundary(config),
            source=problem.source(config),
            source_model=config.source_model,
            adaptive=config.adaptive,
            subcharacteristic=config.subcharacteristic,
            admissible_range=problem.admissible_range(),
            workers=self.workers,
            oracle_depth=config.oracle_depth if config.oracle else None,
            monitor_collisions=True,
        )
        return solver, solver.initialize(U0), grid

    def run_single(self, omega: float, nodes: int,
                   recorder: DiagnosticsRecorder) -> Tuple[SolverState, Grid, Dict[str, float]]:
        """One run; diagnostics rows go to the recorder"""
        solver, state, grid = self.build_solver(omega, nodes)
        oracle = MacroFDOracle(state.history) if state.history is not None else None

        def after_step(current: SolverState):
            extra = {}
            if oracle is not None:
                extra['oracle_defect'] = oracle.defect(current.U)
            recorder.record_state(current, extra)

        recorder.record_state(state)
        solver.run(state, final_time=self.config.final_time,
                   iterations=self.config.iterations, callback=after_step)

        summary = dict(self.problem.summarize(self.config, grid, state))
        summary['final_time'] = state.t
        summary['steps'] = float(state.n)
        if oracle is not None:
            summary['oracle_max_defect'] = oracle.max_defect
        return state, grid, summary

    def run(self) -> Dict[str, Any]:
        """Execute all runs and write the artifacts"""
        config = self.config
        out_dir = config.output_path
        os.makedirs(out_dir, exist_ok=True)
        runs = [(omega, nodes) for omega in config.omegas for nodes in config.nodes]
        multi = len(runs) > 1

        logger.info(f"Running '{config.name}': {len(runs)} run(s) into {out_dir}")
        frames = []
        summary: Dict[str, float] = {}
        reports: Dict[float, List[NormReport]] = {}
        state, grid = None, None

        for omega, nodes in runs:
            recorder = DiagnosticsRecorder(periodic=self.problem.periodic,
                                           cell_volume=self.problem.grid(nodes).cell_volume)
            state, grid, run_summary = self.run_single(omega, nodes, recorder)
            tag = run_tag(omega, nodes)
            frame = recorder.to_frame()
            if multi:
                frame['metric'] = frame['metric'] + f"[{tag}]"
            frames.append(frame)
            for metric, value in run_summary.items():
                summary[f"{metric}[{tag}]" if multi else metric] = value
            if 'l2' in run_summary:
                reports.setdefault(omega, []).append(NormReport(nodes, grid.dx, run_summary['l2']))
            logger.info(f"Run {tag} finished: " +
                        ", ".join(f"{k}={v:.6g}" for k, v in run_summary.items()))

        files = {}
        diagnostics = frames[0] if len(frames) == 1 else pd.concat(frames, ignore_index=True)
        files['diagnostics'] = write_frame(os.path.join(out_dir, 'diagnostics.csv'), diagnostics)
        closed_mesh = grid.mesh(closed=True)
        files['field'] = write_field(os.path.join(out_dir, 'field.csv'), closed_mesh,
                                     grid.closed_field(state.U))

        table = None
        if reports:
            table = self._convergence_rows(reports, summary)
            columns = ['N', 'dx'] + [f"{name}_omega={omega!r}" for omega in config.omegas
                                     for name in ('L2', 'order')]
            files['convergence'] = write_table(os.path.join(out_dir, 'convergence.csv'), table, columns)

        files['summary'] = write_summary(os.path.join(out_dir, 'summary.csv'), summary)
        return {'config': config, 'summary': summary, 'files': files, 'convergence': table,
                'state': state, 'grid': grid}

    def _convergence_rows(self, reports: Dict[float, List[NormReport]],
                          summary: Dict[str, float]) -> List[Dict[str, Any]]:
        """One row per N with L2 and order columns per omega"""
        rows: Dict[int, Dict[str, Any]] = {}
        for omega, omega_reports in reports.items():
            omega_reports.sort(key=lambda r: -r.dx)
            if len(omega_reports) > 1:
                convergence_order(omega_reports)
            for report in omega_reports:
                row = rows.setdefault(report.N, {'N': report.N, 'dx': report.dx})
                row[f"L2_omega={omega!r}"] = report.l2
                row[f"order_omega={omega!r}"] = report.order if report.order is not None else np.nan
                if report.order is not None:
                    summary[f"order[{run_tag(omega, report.N)}]"] = report.order
        return [rows[n] for n in sorted(rows)]

    def check(self, artifacts: Dict[str, Any]) -> List[Dict[str, Any]]:
        """Compare the summary against the expected-values file"""
        if not self.config.expected:
            raise ConfigurationError(ErrorCodes.MISSING_REQUIRED_FIELD,
                                     "check needs [output] expected in the configuration")
        expected = read_expected(self.config.expected)
        results = check_expected(artifacts['summary'], expected, self.config.expected)
        logger.info(f"All {len(results)} acceptance check(s) passed for '{self.config.name}'")
        return results


def run_experiment(config: ExperimentConfig, workers: int = 1) -> Dict[str, Any]:
    """Run an experiment and write its CSV artifacts"""
    return ExperimentRunner(config, workers).run()
