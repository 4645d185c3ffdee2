"""
Tests for the reference solutions of the benchmark problems
"""

import math
import os
import sys
import unittest

import numpy as np
from numpy.testing import assert_allclose, assert_array_equal
from scipy.optimize import brentq

sys.path.append(os.path.join(os.path.dirname(__file__), '..'))

from src.references import (
    BURGERS_SHOCK_TIME, EmbidReference, burgers_moc, embid_initial, embid_reference, embid_source,
    leveque_yee_exact, leveque_yee_radius, leveque_yee_source, spekreijse_exact
)
from src.diagnostics import shock_location
from src.utils.error_handler import ErrorCodes, SolverError


class TestBurgersCharacteristics(unittest.TestCase):
    def test_initial_time_is_the_sine(self):
        x = np.linspace(0.0, 1.0, 11)
        assert_allclose(burgers_moc(x, 0.0), np.sin(2.0 * math.pi * x), atol=1e-15)

    def test_matches_bracketing_root_finder(self):
        t = 0.1 * BURGERS_SHOCK_TIME
        for x in (0.0, 0.13, 0.25, 0.5, 0.77, 0.9):
            expected = brentq(lambda u: u - math.sin(2.0 * math.pi * (x - u * t)), -1.0, 1.0, xtol=1e-15)
            self.assertAlmostEqual(burgers_moc(x, t), expected, places=13)

    def test_close_to_the_shock_time(self):
        t = 0.99 * BURGERS_SHOCK_TIME
        x = np.linspace(0.0, 1.0, 201)
        u = burgers_moc(x, t)
        residual = u - np.sin(2.0 * math.pi * (x - u * t))
        self.assertLess(np.max(np.abs(residual)), 1e-13)

    def test_scalar_input(self):
        self.assertIsInstance(burgers_moc(0.3, 0.01), float)

    def test_no_solution_after_shock(self):
        with self.assertRaises(SolverError) as ctx:
            burgers_moc(0.5, BURGERS_SHOCK_TIME)
        self.assertEqual(ctx.exception.code, ErrorCodes.CHARACTERISTICS_NOT_CONVERGED)


class TestStiffSourceReferences(unittest.TestCase):
    def test_one_dimensional_step(self):
        x = np.array([0.1, 0.3, 0.5, 0.61])
        assert_array_equal(leveque_yee_exact(x, 0.0), [1.0, 1.0, 0.0, 0.0])
        assert_array_equal(leveque_yee_exact(x, 0.3), [1.0, 1.0, 1.0, 0.0])

    def test_disc_is_translated(self):
        inside = leveque_yee_exact([np.array([0.1]), np.array([0.1])], 0.1)
        outside = leveque_yee_exact([np.array([0.7]), np.array([0.1])], 0.1)
        self.assertEqual(inside[0], 1.0)
        self.assertEqual(outside[0], 0.0)

    def test_cross_section_radius(self):
        self.assertAlmostEqual(leveque_yee_radius(0.1, 0.1), math.sqrt(0.3))
        self.assertAlmostEqual(leveque_yee_radius(0.1, 0.2, dimension=3), math.sqrt(0.3 - 2.0 * 0.01))
        with self.assertRaises(SolverError):
            leveque_yee_radius(0.0, 0.9)

    def test_source_equilibria(self):
        source = leveque_yee_source(1000.0)
        assert_allclose(source.value(np.array([0.0, 0.5, 1.0])), 0.0)
        self.assertGreater(float(source.value(np.array(0.7))), 0.0)
        self.assertEqual(source.admissible_range, (0.0, 1.0))


class TestSpekreijse(unittest.TestCase):
    def test_horizontal_step(self):
        self.assertEqual(spekreijse_exact(0.5, 0.5, 0.0), 1.0)
        self.assertEqual(spekreijse_exact(0.5, 0.0, 0.0), 0.0)

    def test_vertical_limit_keeps_left_edge(self):
        self.assertEqual(spekreijse_exact(0.0, 0.5, math.pi / 2.0), 1.0)
        self.assertEqual(spekreijse_exact(0.2, 0.5, math.pi / 2.0), 0.0)
        self.assertEqual(spekreijse_exact(0.0, 0.0, math.pi / 2.0), 0.0)

    def test_diagonal(self):
        x1 = np.array([0.2, 0.5, 0.8])
        assert_array_equal(spekreijse_exact(x1, np.full(3, 0.5), math.pi / 4.0), [1.0, 0.0, 0.0])


class TestEmbidReference(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.reference = embid_reference(1.0, resolution=201, tolerance=1e-10)

    def test_converges(self):
        self.assertIsInstance(self.reference, EmbidReference)
        self.assertEqual(self.reference.resolution, 201)
        self.assertLessEqual(self.reference.residual, 1e-10)

    def test_shock_position(self):
        # Rankine-Hugoniot between 1 + 3x^2 - 3x and -0.1 + 3x^2 - 3x
        shock = (6.0 - math.sqrt(36.0 - 21.6)) / 12.0
        location = shock_location(self.reference.x, self.reference.U)
        self.assertLess(abs(location - shock), 0.01)

    def test_smooth_branches(self):
        x = np.array([0.05, 0.6, 0.9])
        expected = np.array([1.0 + 3.0 * 0.05 ** 2 - 3.0 * 0.05,
                             -0.1 + 3.0 * 0.6 ** 2 - 3.0 * 0.6,
                             -0.1 + 3.0 * 0.9 ** 2 - 3.0 * 0.9])
        assert_allclose(self.reference.restrict(x), expected, atol=0.03)

    def test_initial_state_and_source(self):
        assert_array_equal(embid_initial([0.05, 0.1, 0.5]), [1.0, 1.0, -1.0])
        source = embid_source(2.0)
        assert_allclose(source.value(np.array([1.0, 1.0]), [np.array([0.0, 1.0])]), [-6.0, 6.0])


if __name__ == '__main__':
    unittest.main()
