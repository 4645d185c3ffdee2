"""
Tests for diagnostics metrics and the per-step recorder
"""

import math
import os
import sys
import unittest
from types import SimpleNamespace

import numpy as np

sys.path.append(os.path.join(os.path.dirname(__file__), '..'))

from src.diagnostics import (
    DiagnosticsRecorder, NormReport, conserved_sum, convergence_order, discontinuity_location,
    h_monitor, l2_error, level_crossings, positivity_scan, shock_location, total_variation,
    total_variation_by_axis
)
from src.utils.error_handler import ErrorCodes, FluxDomainError


class TestTotalVariation(unittest.TestCase):
    def test_open_and_periodic(self):
        U = np.array([0.0, 1.0, 0.0, 2.0])
        self.assertEqual(total_variation(U), 4.0)
        self.assertEqual(total_variation(U, periodic=True), 6.0)

    def test_per_axis(self):
        U = np.array([[0.0, 1.0], [2.0, 2.0]])
        self.assertEqual(total_variation_by_axis(U), [3.0, 1.0])
        self.assertEqual(total_variation(U), 4.0)


class TestNorms(unittest.TestCase):
    def test_count_normalized_l2(self):
        self.assertAlmostEqual(l2_error([1.0, 1.0], [0.0, 0.0]), math.sqrt(2.0) / 2.0)
        # sqrt(sum e^2) / n, not sqrt(sum e^2 / n)
        self.assertAlmostEqual(l2_error(np.ones(4), np.zeros(4)), 0.5)
        self.assertAlmostEqual(l2_error(np.full((2, 2), 3.0), np.zeros((2, 2))), 1.5)

    def test_l2_triangle_inequality(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            a, b, c = rng.normal(size=(3, 41))
            self.assertLessEqual(l2_error(a, c), l2_error(a, b) + l2_error(b, c) + 1e-13)

    def test_dx_weighted_l2(self):
        self.assertAlmostEqual(l2_error([1.0, 1.0], [0.0, 0.0], dx=0.5, normalization='dx'), 1.0)

    def test_shape_mismatch(self):
        with self.assertRaises(FluxDomainError) as ctx:
            l2_error(np.zeros(3), np.zeros(4))
        self.assertEqual(ctx.exception.code, ErrorCodes.SHAPE_MISMATCH)

    def test_convergence_order(self):
        reports = [NormReport(41, 0.1, 0.04), NormReport(81, 0.05, 0.01), NormReport(161, 0.025, 0.005)]
        orders = convergence_order(reports)
        self.assertAlmostEqual(orders[0], 2.0)
        self.assertAlmostEqual(orders[1], 1.0)
        self.assertIsNone(reports[0].order)
        self.assertAlmostEqual(reports[2].order, 1.0)

    def test_spacing_must_decrease(self):
        with self.assertRaises(FluxDomainError) as ctx:
            convergence_order([NormReport(81, 0.05, 0.01), NormReport(41, 0.1, 0.04)])
        self.assertEqual(ctx.exception.code, ErrorCodes.NON_MONOTONE_SPACING)


class TestScans(unittest.TestCase):
    def test_conserved_sum(self):
        self.assertAlmostEqual(conserved_sum(np.ones((4, 4)), 0.25), 4.0)

    def test_positivity_scan(self):
        report = positivity_scan(np.array([0.2, 0.0, -0.1, -0.3]))
        self.assertFalse(report['passed'])
        self.assertEqual(report['first_violation'], 2)
        self.assertEqual(report['violation_count'], 2)
        self.assertEqual(report['min_value'], -0.3)
        self.assertTrue(positivity_scan(np.zeros((2, 2)))['passed'])

    def test_h_monitor_convex_combination(self):
        rng = np.random.default_rng(1)
        f = rng.normal(size=(3, 20))
        f_eq = rng.normal(size=(3, 20))
        omega_hat = 0.6
        f_star = (1.0 - omega_hat) * f + omega_hat * f_eq
        report = h_monitor(f, f_eq, f_star, omega_hat)
        self.assertTrue(report['theorem_applies'])
        self.assertEqual(report['violations'], 0)
        self.assertFalse(h_monitor(f, f_eq, f_star, 1.7, 'abs')['theorem_applies'])

    def test_discontinuity_and_crossings(self):
        x = np.linspace(0.0, 1.0, 11)
        U = np.where(x < 0.45, 1.0, 0.0)
        self.assertAlmostEqual(discontinuity_location(x, U), 0.45)
        crossings = level_crossings(x, np.abs(x - 0.5), 0.25)
        self.assertEqual(len(crossings), 2)
        self.assertAlmostEqual(crossings[0], 0.25)
        self.assertAlmostEqual(crossings[1], 0.75)

    def test_shock_with_intermediate_node(self):
        x = np.linspace(0.0, 1.0, 11)
        U = np.where(x < 0.35, 1.0, -1.0)
        U[4] = 0.0
        self.assertAlmostEqual(discontinuity_location(x, U), 0.35)
        self.assertAlmostEqual(shock_location(x, U), 0.4)
        U[4] = 0.5
        self.assertAlmostEqual(shock_location(x, U), 0.4 + 0.1 / 3.0)
        self.assertAlmostEqual(shock_location(x, np.where(x < 0.45, 1.0, 0.0)), 0.45)


class TestRecorder(unittest.TestCase):
    def test_rows_in_insertion_order(self):
        recorder = DiagnosticsRecorder(periodic=True, cell_volume=0.5)
        state = SimpleNamespace(U=np.array([0.0, 1.0, 0.0]), n=3, t=0.25,
                                subcharacteristic_margin=0.1, last_collision=None)
        recorder.record_state(state, {'oracle_defect': 1e-15})
        frame = recorder.to_frame()
        self.assertEqual(list(frame.columns), ['step', 'time', 'metric', 'value'])
        self.assertEqual(list(frame['metric']),
                         ['total_variation', 'mass', 'min_U', 'max_U', 'subcharacteristic_margin', 'oracle_defect'])
        self.assertEqual(recorder.latest('total_variation'), 2.0)
        self.assertEqual(recorder.latest('mass'), 0.5)
        self.assertIsNone(recorder.latest('h_violation'))

    def test_two_dimensional_states_report_each_axis(self):
        recorder = DiagnosticsRecorder()
        state = SimpleNamespace(U=np.eye(3), n=0, t=0.0, subcharacteristic_margin=None, last_collision=None)
        recorder.record_state(state)
        metrics = list(recorder.to_frame()['metric'])
        self.assertIn('total_variation_axis1', metrics)
        self.assertIn('total_variation_axis2', metrics)


if __name__ == '__main__':
    unittest.main()
