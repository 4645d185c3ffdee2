"""
End-to-end benchmark runs on small grids
"""

import os
import shutil
import sys
import tempfile
import textwrap
import unittest
from unittest import mock

import numpy as np

sys.path.append(os.path.join(os.path.dirname(__file__), '..'))

from src.experiments import ExperimentRunner, parse_config


CONFIG_DIR = os.path.join(os.path.dirname(__file__), '..', 'config')


class BenchmarkTestCase(unittest.TestCase):
    def setUp(self):
        self.workspace = tempfile.mkdtemp()
        patcher = mock.patch.dict(os.environ, {'LBM_OUTPUT_DIR': os.path.join(self.workspace, 'results')})
        patcher.start()
        self.addCleanup(patcher.stop)
        self.addCleanup(shutil.rmtree, self.workspace, True)

    def run_config(self, text, name='experiment.ini'):
        path = os.path.join(self.workspace, name)
        with open(path, 'w', encoding='utf-8') as handle:
            handle.write(textwrap.dedent(text).lstrip('\n'))
        return ExperimentRunner(parse_config(path)).run()

    def check_preset(self, name):
        runner = ExperimentRunner(parse_config(os.path.join(CONFIG_DIR, name)))
        return runner.check(runner.run())


class TestBurgersSine(BenchmarkTestCase):
    omegas = (1.9, 1.4, 1.0, 0.6, 0.1)

    def study(self):
        return self.run_config("""
            [experiment]
            problem = burgers-sine

            [relaxation]
            omega = 1.9, 1.4, 1.0, 0.6, 0.1

            [grid]
            nodes = 41, 81, 161, 321
        """)['summary']

    def test_coarsest_grid_is_independent_of_omega(self):
        summary = self.study()
        values = [summary[f'l2[omega={omega!r},N=41]'] for omega in self.omegas]
        for value in values[1:]:
            self.assertAlmostEqual(value / values[0], 1.0, places=10)
        self.assertAlmostEqual(values[0] / 0.000597, 1.0, delta=0.05)

    def test_over_relaxed_errors_and_orders(self):
        summary = self.study()
        for nodes, l2, order in ((81, 9.68e-5, 2.626), (161, 2.14e-5, 2.175), (321, 3.20e-6, 2.744)):
            with self.subTest(N=nodes):
                self.assertAlmostEqual(summary[f'l2[omega=1.9,N={nodes}]'] / l2, 1.0, delta=0.1)
                self.assertAlmostEqual(summary[f'order[omega=1.9,N={nodes}]'], order, delta=0.25)

    def test_error_grows_as_omega_decreases(self):
        summary = self.study()
        for nodes in (81, 161, 321):
            with self.subTest(N=nodes):
                errors = [summary[f'l2[omega={omega!r},N={nodes}]'] for omega in self.omegas]
                for smaller, larger in zip(errors, errors[1:]):
                    self.assertLess(smaller, larger)

    def test_refinement_reduces_error(self):
        summary = self.study()
        for omega in self.omegas:
            with self.subTest(omega=omega):
                for coarse, fine in ((81, 161), (161, 321)):
                    self.assertLess(summary[f'l2[omega={omega!r},N={fine}]'],
                                    summary[f'l2[omega={omega!r},N={coarse}]'])

    def test_presets_meet_expected_tables(self):
        for name, count in (('burgers_table1.ini', 15), ('burgers_table2.ini', 14)):
            with self.subTest(preset=name):
                self.assertEqual(len(self.check_preset(name)), count)


class TestStiffSource(BenchmarkTestCase):
    def test_front_moves_at_unit_speed(self):
        for mu in (1, 10, 100, 1000):
            with self.subTest(mu=mu):
                summary = self.run_config(f"""
                    [experiment]
                    problem = ly-1d

                    [grid]
                    nodes = 50

                    [problem]
                    mu = {mu}
                    final_time = 0.3
                """, name=f'ly1d_{mu}.ini')['summary']
                self.assertAlmostEqual(summary['final_time'], 0.3)
                self.assertLess(summary['discontinuity_error'], 0.02)
                if mu >= 100:
                    self.assertLess(summary['plateau_defect'], 1e-6)

    def test_circular_front_keeps_its_radius(self):
        for mu in (1, 100, 500):
            with self.subTest(mu=mu):
                artifacts = self.run_config(f"""
                    [experiment]
                    problem = ly-2d
                    model = upwind-d2q5

                    [grid]
                    nodes = 100

                    [lattice]
                    lambda = 2

                    [problem]
                    mu = {mu}
                    final_time = 0.1
                """, name=f'ly2d_{mu}.ini')
                self.assertEqual(artifacts['state'].U.shape, (100, 100))
                self.assertLess(artifacts['summary']['radius_error'], 0.02)

    def test_two_dimensional_run_stays_bounded(self):
        artifacts = self.run_config("""
            [experiment]
            problem = ly-2d

            [grid]
            nodes = 20

            [problem]
            mu = 10
            iterations = 10
        """)
        U = artifacts['state'].U
        self.assertEqual(U.shape, (20, 20))
        self.assertGreaterEqual(U.min(), -1e-12)
        self.assertLessEqual(U.max(), 1.0 + 1e-12)
        self.assertIn('exact_radius', artifacts['summary'])


class TestSpekreijse(BenchmarkTestCase):
    def spekreijse(self, theta, partition='coordinate', iterations=60):
        return self.run_config(f"""
            [experiment]
            problem = spekreijse

            [grid]
            nodes = 21

            [problem]
            theta = {theta}
            partition = {partition}
            iterations = {iterations}
        """)['summary']

    def test_horizontal_advection_is_exact_off_the_line(self):
        self.assertLess(self.spekreijse('0')['max_offline_deviation'], 1e-12)

    def test_vertical_advection_is_exact_off_the_line(self):
        self.assertLess(self.spekreijse('pi/2')['max_offline_deviation'], 1e-12)

    def test_diagonal_partition_resolves_the_diagonal_step(self):
        summary = self.spekreijse('pi/4', partition='diagonal', iterations=300)
        self.assertLess(summary['max_offline_deviation'], 1e-9)


class TestEmbid(BenchmarkTestCase):
    def test_shock_within_one_cell_of_fine_reference(self):
        dx = 1.0 / 100
        for mu in range(1, 9):
            with self.subTest(mu=mu):
                summary = self.run_config(f"""
                    [experiment]
                    problem = embid

                    [grid]
                    nodes = 100

                    [problem]
                    mu = {mu}
                    iterations = 500
                    reference_resolution = 1001
                """, name=f'embid_{mu}.ini')['summary']
                self.assertLessEqual(summary['discontinuity_error'], dx)
                self.assertEqual(summary['steps'], 500)

    def test_reference_shock_follows_rankine_hugoniot(self):
        summary = self.run_config("""
            [experiment]
            problem = embid

            [grid]
            nodes = 51

            [problem]
            mu = 1
            iterations = 500
            reference_resolution = 1001
        """)['summary']
        # U_L + U_R = 0 between 1 + 3x^2 - 3x and -0.1 + 3x^2 - 3x
        shock = (6.0 - np.sqrt(36.0 - 21.6)) / 12.0
        self.assertLess(abs(summary['reference_x'] - shock), 2e-3)
        self.assertTrue(np.isfinite(summary['reference_iterations']))


if __name__ == '__main__':
    unittest.main()
