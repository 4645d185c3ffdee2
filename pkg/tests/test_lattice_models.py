"""
Tests for velocity sets, equilibria, source equilibria and the
sub-characteristic check
"""

import math
import os
import sys
import unittest

import numpy as np
from numpy.testing import assert_allclose, assert_array_equal

sys.path.append(os.path.join(os.path.dirname(__file__), '..'))

from src.flux_models import BurgersFlux, LinearFlux, build_flux
from src.lattice_models import (
    D2Q9Model, get_model, get_velocity_set, lambda_vector, parse_partition, required_lambda,
    shift_field, source_equilibrium, subcharacteristic_ok, equilibrium, numerical_diffusion
)
from src.utils.error_handler import ErrorCodes, ConfigurationError


def first_moment(model, f, lam):
    velocities = model.velocity_set.velocities(lam)
    return np.einsum('qd,q...->d...', velocities, f)


class TestVelocitySets(unittest.TestCase):
    def test_d2q9_layout(self):
        vs = get_velocity_set('d2q9')
        self.assertEqual(vs.Q, 9)
        self.assertEqual(vs.rest_index, 4)
        self.assertEqual(vs.opposite(0), 5)
        self.assertEqual(vs.opposite(2), 7)
        self.assertEqual(vs.opposite(3), 8)

    def test_upwind_layout(self):
        vs = get_velocity_set('upwind-d3q7')
        assert_array_equal(vs.offsets[0], [1, 0, 0])
        self.assertEqual(vs.rest_index, 3)
        assert_array_equal(vs.offsets[6], [0, 0, -1])

    def test_lambda_validation(self):
        assert_allclose(lambda_vector(2.0, 3), [2.0, 2.0, 2.0])
        with self.assertRaises(ConfigurationError) as ctx:
            lambda_vector(-1.0, 1)
        self.assertEqual(ctx.exception.code, ErrorCodes.INVALID_LATTICE_SPEED)
        with self.assertRaises(ConfigurationError):
            lambda_vector([1.0, 2.0], 2)

    def test_shift_field_wraps(self):
        assert_array_equal(shift_field(np.arange(5), 1, (1,)), [4, 0, 1, 2, 3])
        grid = np.arange(12).reshape(3, 4)
        assert_array_equal(shift_field(grid, 1, (0, -1)), np.roll(grid, -1, axis=1))


class TestEquilibria(unittest.TestCase):
    def setUp(self):
        self.U = np.linspace(-1.0, 1.0, 7)
        self.lam = 1.5

    def check_moments(self, model, fluxes, U, lam):
        f = equilibrium(model, U, fluxes, lam)
        self.assertEqual(f.shape, (model.Q,) + U.shape)
        assert_allclose(f.sum(axis=0), U, atol=1e-12)
        expected = np.stack([np.asarray(flux.eval(U)) for flux in fluxes])
        assert_allclose(first_moment(model, f, lam), expected, atol=1e-10)

    def test_one_dimensional_models(self):
        for name in ('d1q2', 'd1q3', 'upwind-d1q3'):
            with self.subTest(model=name):
                self.check_moments(get_model(name), [BurgersFlux()], self.U, self.lam)

    def test_upwind_multi_dimensional_models(self):
        U2 = np.outer(self.U, np.linspace(0.0, 1.0, 4))
        self.check_moments(get_model('upwind-d2q5'), build_flux('uniform', 2).fluxes, U2, 2.0)
        U3 = np.random.default_rng(3).uniform(-1.0, 1.0, (3, 4, 5))
        self.check_moments(get_model('upwind-d3q7'), [BurgersFlux(), LinearFlux(-0.5), BurgersFlux()], U3, 3.0)

    def test_d2q9_partitions(self):
        U = np.random.default_rng(7).uniform(-1.0, 1.0, (3, 3))
        for partition in ('coordinate', 'diagonal', 'custom(0.25)'):
            with self.subTest(partition=partition):
                self.check_moments(D2Q9Model(partition), [BurgersFlux(), BurgersFlux()], U, 2.0)

    def test_upwind_burgers_populations(self):
        f = equilibrium(get_model('upwind-d1q3'), np.array([0.5, -0.5]), [BurgersFlux()], 1.0)
        assert_allclose(f[:, 0], [0.125, 0.375, 0.0])
        assert_allclose(f[:, 1], [0.0, -0.375, -0.125])

    def test_partition_parsing(self):
        self.assertEqual(parse_partition('coordinate'), 1.0)
        self.assertEqual(parse_partition('diagonal'), 0.0)
        self.assertEqual(parse_partition('custom(0.25)'), 0.25)
        with self.assertRaises(ConfigurationError):
            parse_partition('spiral')

    def test_unknown_model(self):
        with self.assertRaises(ConfigurationError) as ctx:
            get_model('d3q19')
        self.assertEqual(ctx.exception.code, ErrorCodes.UNSUPPORTED_MODEL)

    def test_flux_count_must_match_dimension(self):
        with self.assertRaises(ConfigurationError):
            equilibrium(get_model('upwind-d2q5'), np.zeros((3, 3)), [BurgersFlux()], 1.0)


class TestSourceEquilibria(unittest.TestCase):
    def test_well_balanced_moments(self):
        U = np.linspace(-1.0, 1.0, 9)
        S = np.cos(U)
        for name in ('d1q2', 'd1q3', 'upwind-d1q3'):
            with self.subTest(model=name):
                model = get_model(name)
                r = source_equilibrium(model, U, S, [BurgersFlux()], 1.5)
                assert_allclose(r.sum(axis=0), S, atol=1e-12)
                assert_allclose(first_moment(model, r, 1.5)[0], U * S, atol=1e-12)

    def test_well_balanced_d2q9(self):
        U = np.random.default_rng(11).uniform(-1.0, 1.0, (4, 4))
        S = U * (1.0 - U)
        model = D2Q9Model('diagonal')
        fluxes = [BurgersFlux(), LinearFlux(0.5)]
        r = source_equilibrium(model, U, S, fluxes, 2.0)
        assert_allclose(r.sum(axis=0), S, atol=1e-12)
        moment = first_moment(model, r, 2.0)
        assert_allclose(moment[0], U * S, atol=1e-12)
        assert_allclose(moment[1], 0.5 * S, atol=1e-12)

    def test_naive_source_sits_on_rest_population(self):
        model = get_model('upwind-d1q3')
        S = np.array([0.2, -0.4])
        r = source_equilibrium(model, np.array([0.5, 0.5]), S, [BurgersFlux()], 1.0, naive=True)
        assert_allclose(r[1], S)
        assert_allclose(r[0], 0.0)
        assert_allclose(r[2], 0.0)


class TestSubcharacteristic(unittest.TestCase):
    def setUp(self):
        self.U = np.linspace(-1.0, 1.0, 21)

    def test_required_lambda_for_burgers(self):
        burgers = [BurgersFlux()]
        self.assertAlmostEqual(required_lambda(get_model('d1q2'), burgers, self.U), 1.0, places=9)
        self.assertAlmostEqual(required_lambda(get_model('upwind-d1q3'), burgers, self.U), 1.0, places=9)
        self.assertAlmostEqual(required_lambda(get_model('d1q3'), burgers, self.U), math.sqrt(1.5), places=9)

    def test_lambda_floor_is_kept_when_admissible(self):
        self.assertEqual(required_lambda(get_model('upwind-d1q3'), [BurgersFlux()], self.U, lam_floor=3.0), 3.0)

    def test_zero_margin_is_admissible(self):
        fluxes = build_flux('uniform', 2).fluxes
        ok, margin = subcharacteristic_ok(get_model('upwind-d2q5'), 2.0, fluxes, np.zeros(3))
        self.assertTrue(ok)
        self.assertAlmostEqual(margin, 0.0, places=12)
        ok, margin = subcharacteristic_ok(get_model('upwind-d2q5'), 1.5, fluxes, np.zeros(3))
        self.assertFalse(ok)
        self.assertAlmostEqual(margin, -0.5, places=12)

    def test_three_dimensional_bound(self):
        fluxes = build_flux('uniform', 3).fluxes
        self.assertTrue(subcharacteristic_ok(get_model('upwind-d3q7'), 3.0, fluxes, np.zeros(2))[0])
        self.assertFalse(subcharacteristic_ok(get_model('upwind-d3q7'), 2.5, fluxes, np.zeros(2))[0])

    def test_numerical_diffusion_vanishes_at_omega_two(self):
        D = numerical_diffusion(get_model('d1q3'), self.U, [BurgersFlux()], 2.0, 2.0, 0.01)
        assert_allclose(D, 0.0, atol=1e-15)


if __name__ == '__main__':
    unittest.main()
