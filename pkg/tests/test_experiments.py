"""
Tests for experiment configuration, CSV artifacts, the runner and the
command line entry point
"""

import math
import os
import shutil
import sys
import tempfile
import textwrap
import unittest
from unittest import mock

import numpy as np
import pandas as pd
from numpy.testing import assert_array_equal

sys.path.append(os.path.join(os.path.dirname(__file__), '..'))

from src.experiments import (
    ExperimentRunner, check_expected, parse_angle, parse_config, read_expected, read_field,
    write_field, write_summary
)
from src.utils.error_handler import ErrorCodes, AcceptanceError, ConfigurationError

BURGERS = """
[experiment]
name = burgers_small
problem = burgers-sine

[relaxation]
omega = 1.4

[grid]
nodes = 41
"""


class WorkspaceTestCase(unittest.TestCase):
    """Temporary directory with LBM_OUTPUT_DIR pointing inside it"""

    def setUp(self):
        self.workspace = tempfile.mkdtemp()
        self.output_dir = os.path.join(self.workspace, 'results')
        patcher = mock.patch.dict(os.environ, {'LBM_OUTPUT_DIR': self.output_dir})
        patcher.start()
        self.addCleanup(patcher.stop)
        self.addCleanup(shutil.rmtree, self.workspace, True)

    def write(self, name, text):
        path = os.path.join(self.workspace, name)
        with open(path, 'w', encoding='utf-8') as handle:
            handle.write(textwrap.dedent(text).lstrip('\n'))
        return path


class TestConfigParsing(WorkspaceTestCase):
    def test_defaults_are_filled_in(self):
        config = parse_config(self.write('burgers.ini', BURGERS))
        self.assertEqual(config.name, 'burgers_small')
        self.assertEqual(config.model, 'upwind-d1q3')
        self.assertEqual(config.omegas, [1.4])
        self.assertEqual(config.nodes, [41])
        self.assertEqual(config.lam, 1.0)
        self.assertAlmostEqual(config.final_time, 0.1 / (2.0 * math.pi))
        self.assertIsNone(config.iterations)
        self.assertEqual(config.output_dir, self.output_dir)

    def test_problem_specific_values(self):
        config = parse_config(self.write('spek.ini', """
            [experiment]
            problem = spekreijse

            [problem]
            theta = pi/4
            partition = diagonal
            iterations = 10

            [lattice]
            lambda = auto
        """))
        self.assertEqual(config.name, 'spek')
        self.assertEqual(config.model, 'd2q9')
        self.assertAlmostEqual(config.theta, math.pi / 4.0)
        self.assertIsNone(config.lam)
        self.assertEqual(config.iterations, 10)
        self.assertIsNone(config.final_time)

    def test_missing_file(self):
        with self.assertRaises(ConfigurationError) as ctx:
            parse_config(os.path.join(self.workspace, 'absent.ini'))
        self.assertEqual(ctx.exception.code, ErrorCodes.CONFIG_FILE_MISSING)

    def test_unknown_key_reports_line(self):
        path = self.write('typo.ini', BURGERS + "\n[lattice]\nlambdaa = 2\n")
        with self.assertRaises(ConfigurationError) as ctx:
            parse_config(path)
        self.assertEqual(ctx.exception.code, ErrorCodes.UNKNOWN_CONFIG_KEY)
        self.assertIn("unknown key 'lambdaa' in [lattice]", str(ctx.exception))
        self.assertIn('line 12', str(ctx.exception))

    def test_missing_required_field(self):
        path = self.write('ly.ini', """
            [experiment]
            problem = ly-2d
        """)
        with self.assertRaises(ConfigurationError) as ctx:
            parse_config(path)
        self.assertEqual(ctx.exception.code, ErrorCodes.MISSING_REQUIRED_FIELD)
        self.assertIn('missing required field [problem] mu for ly-2d', str(ctx.exception))

    def test_incompatible_model(self):
        path = self.write('bad_model.ini', """
            [experiment]
            problem = spekreijse
            model = d1q3

            [problem]
            theta = 0
        """)
        with self.assertRaises(ConfigurationError) as ctx:
            parse_config(path)
        self.assertEqual(ctx.exception.code, ErrorCodes.INCOMPATIBLE_DIMENSIONS)
        self.assertIn('model d1q3 (1-D) is incompatible with spekreijse', str(ctx.exception))

    def test_all_problems_are_collected(self):
        path = self.write('many.ini', """
            [experiment]
            problem = burgers-sine

            [relaxation]
            omega = 2.5

            [grid]
            nodes = 2

            [lattice]
            subcharacteristic = ignore
        """)
        with self.assertRaises(ConfigurationError) as ctx:
            parse_config(path)
        self.assertGreaterEqual(len(ctx.exception.problems), 3)

    def test_syntax_error(self):
        path = self.write('broken.ini', "problem = burgers-sine\n")
        with self.assertRaises(ConfigurationError) as ctx:
            parse_config(path)
        self.assertEqual(ctx.exception.code, ErrorCodes.CONFIG_PARSE_FAILED)

    def test_oracle_needs_periodic_problem(self):
        path = self.write('oracle.ini', """
            [experiment]
            problem = ly-1d

            [problem]
            mu = 10

            [output]
            oracle = true
        """)
        with self.assertRaises(ConfigurationError) as ctx:
            parse_config(path)
        self.assertEqual(ctx.exception.code, ErrorCodes.ORACLE_UNSUPPORTED)
        self.assertEqual(len(ctx.exception.problems), 2)
        self.assertEqual(ctx.exception.exit_code, 1)

    def test_angles(self):
        self.assertAlmostEqual(parse_angle('pi/2'), math.pi / 2.0)
        self.assertAlmostEqual(parse_angle('2*pi'), 2.0 * math.pi)
        self.assertAlmostEqual(parse_angle('0.5'), 0.5)

    def test_presets_parse(self):
        config_dir = os.path.join(os.path.dirname(__file__), '..', 'config')
        for name in sorted(os.listdir(config_dir)):
            if name.endswith('.ini'):
                with self.subTest(preset=name):
                    config = parse_config(os.path.join(config_dir, name))
                    if config.expected:
                        self.assertTrue(os.path.exists(config.expected), config.expected)


class TestCsvArtifacts(WorkspaceTestCase):
    def test_field_round_trip(self):
        X, Y = np.meshgrid(np.linspace(0.0, 1.0, 3), np.linspace(0.0, 0.5, 2), indexing='ij')
        U = np.sin(X + 0.1) * np.exp(Y)
        path = write_field(os.path.join(self.workspace, 'field.csv'), [X, Y], U)
        coordinates, values = read_field(path)
        self.assertEqual(len(coordinates), 2)
        assert_array_equal(values, U.ravel())
        assert_array_equal(coordinates[1], Y.ravel())
        with open(path, encoding='utf-8') as handle:
            self.assertEqual(handle.readline().strip(), 'x1,x2,U')

    def test_expected_comparison(self):
        expected = pd.DataFrame({'metric': ['l2', 'error'], 'expected': [1.0e-3, 0.02],
                                 'tolerance': [0.1, 0.0], 'kind': ['rel', 'max']})
        results = check_expected({'l2': 1.05e-3, 'error': 0.01}, expected)
        self.assertTrue(all(r['passed'] for r in results))
        with self.assertRaises(AcceptanceError) as ctx:
            check_expected({'l2': 1.2e-3, 'error': 0.01}, expected)
        self.assertEqual(ctx.exception.code, ErrorCodes.ACCEPTANCE_CHECK_FAILED)
        self.assertEqual(ctx.exception.exit_code, 3)
        with self.assertRaises(AcceptanceError) as ctx:
            check_expected({}, expected)
        self.assertEqual(ctx.exception.code, ErrorCodes.EXPECTED_METRIC_MISSING)

    def test_expected_file_validation(self):
        path = self.write('expected.csv', "metric,expected,tolerance,kind\nl2,1.0,0.1,percent\n")
        with self.assertRaises(ConfigurationError):
            read_expected(path)

    def test_summary_file(self):
        path = write_summary(os.path.join(self.workspace, 'summary.csv'), {'l2': 0.1, 'order': 2.0})
        frame = pd.read_csv(path)
        self.assertEqual(list(frame['metric']), ['l2', 'order'])


class TestRunner(WorkspaceTestCase):
    def test_single_run_artifacts(self):
        config = parse_config(self.write('burgers.ini', BURGERS))
        artifacts = ExperimentRunner(config).run()
        self.assertIn('l2', artifacts['summary'])
        self.assertEqual(artifacts['summary']['steps'], 1.0)
        for kind in ('diagnostics', 'field', 'summary'):
            self.assertTrue(os.path.exists(artifacts['files'][kind]))
        field = pd.read_csv(artifacts['files']['field'])
        self.assertEqual(len(field), 41)
        diagnostics = pd.read_csv(artifacts['files']['diagnostics'])
        self.assertIn('h_violation', set(diagnostics['metric']))

    def test_convergence_table(self):
        config = parse_config(self.write('study.ini', BURGERS.replace('nodes = 41', 'nodes = 41, 81')
                                          .replace('omega = 1.4', 'omega = 1.4, 1.0')))
        artifacts = ExperimentRunner(config).run()
        summary = artifacts['summary']
        self.assertIn('l2[omega=1.4,N=81]', summary)
        self.assertIn('order[omega=1.0,N=81]', summary)
        table = pd.read_csv(artifacts['files']['convergence'])
        self.assertEqual(list(table.columns),
                         ['N', 'dx', 'L2_omega=1.4', 'order_omega=1.4', 'L2_omega=1.0', 'order_omega=1.0'])
        self.assertEqual(list(table['N']), [41, 81])

    def test_reruns_are_byte_identical(self):
        path = self.write('burgers.ini', BURGERS)
        first = ExperimentRunner(parse_config(path)).run()
        with open(first['files']['summary'], 'rb') as handle:
            summary_bytes = handle.read()
        with open(first['files']['field'], 'rb') as handle:
            field_bytes = handle.read()
        second = ExperimentRunner(parse_config(path), workers=3).run()
        with open(second['files']['summary'], 'rb') as handle:
            self.assertEqual(handle.read(), summary_bytes)
        with open(second['files']['field'], 'rb') as handle:
            self.assertEqual(handle.read(), field_bytes)

    def test_oracle_defect_is_recorded(self):
        config = parse_config(self.write('oracle.ini', BURGERS + "\n[output]\noracle = true\n"))
        artifacts = ExperimentRunner(config).run()
        self.assertLess(artifacts['summary']['oracle_max_defect'], 1e-12)


class TestCommandLine(WorkspaceTestCase):
    def setUp(self):
        super().setUp()
        import app
        self.app = app

    def test_run_command(self):
        path = self.write('burgers.ini', BURGERS)
        self.assertEqual(self.app.main(['run', path]), 0)
        self.assertTrue(os.path.exists(os.path.join(self.output_dir, 'burgers_small', 'summary.csv')))

    def test_check_command_exit_codes(self):
        self.write('good.csv', "metric,expected,tolerance,kind\nsteps,1,0,abs\n")
        self.write('bad.csv', "metric,expected,tolerance,kind\nl2,0.0,0.0,max\n")
        good = self.write('good.ini', BURGERS + "\n[output]\nexpected = good.csv\n")
        bad = self.write('bad.ini', BURGERS + "\n[output]\nexpected = bad.csv\n")
        self.assertEqual(self.app.main(['check', good]), 0)
        self.assertEqual(self.app.main(['check', bad]), 3)

    def test_configuration_errors_exit_with_one(self):
        self.assertEqual(self.app.main(['run', os.path.join(self.workspace, 'absent.ini')]), 1)

    def test_table_needs_burgers(self):
        path = self.write('ly.ini', """
            [experiment]
            problem = ly-1d

            [problem]
            mu = 10
            iterations = 2
        """)
        self.assertEqual(self.app.main(['table', path]), 1)


if __name__ == '__main__':
    unittest.main()
