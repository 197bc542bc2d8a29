import math
from fractions import Fraction

import numpy as np
from django.test import SimpleTestCase

from waveletgrid.diagnostics import (
    boundary_amplification, fit_order, lebesgue_ratio, lebesgue_ratio_bc, scaling_function_samples,
)
from waveletgrid.exceptions import ConfigurationError, NonPositiveValue
from waveletgrid.fields import sine_field
from waveletgrid.geometry import ImmersedGrid, empty_levelset, star_levelset
from waveletgrid.wavelet1d import WaveletSpec
from waveletgrid.wavelet2d import fwt2d


class LebesgueRatioTests(SimpleTestCase):

    def test_exact_values(self):
        self.assertEqual(lebesgue_ratio(2), 3)
        self.assertEqual(lebesgue_ratio(4), Fraction(105, 9))
        self.assertEqual(lebesgue_ratio(6), Fraction(10395, 225))
        self.assertIsInstance(lebesgue_ratio(4), Fraction)

    def test_exponential_growth(self):
        for N in (2, 4):
            self.assertGreater(lebesgue_ratio(N + 2) / lebesgue_ratio(N), 2)

    def test_boundary_values_reduce_the_ratio(self):
        self.assertEqual(lebesgue_ratio_bc(2, 1), 1)
        self.assertEqual(lebesgue_ratio_bc(4, Fraction(1, 2)), Fraction(15, 18))
        self.assertAlmostEqual(lebesgue_ratio_bc(4, 0.5), 0.5 * 15 / 9)
        for N in (2, 4, 6):
            self.assertLess(lebesgue_ratio_bc(N, 1), lebesgue_ratio(N))
            self.assertLess(lebesgue_ratio_bc(N, 0.25), lebesgue_ratio_bc(N, 0.75))

    def test_invalid_arguments(self):
        with self.assertRaises(ConfigurationError):
            lebesgue_ratio(3)
        with self.assertRaises(ConfigurationError):
            lebesgue_ratio_bc(4, 0.0)
        with self.assertRaises(ConfigurationError):
            lebesgue_ratio_bc(4, 1.5)


class FitOrderTests(SimpleTestCase):

    def test_exact_power_laws(self):
        h = [2.0 ** -k for k in range(4, 8)]
        fit = fit_order([(x, x ** 2) for x in h])
        self.assertAlmostEqual(fit.slope, 2.0, delta=1e-10)
        fit = fit_order([(x, 3 * x ** 6) for x in h])
        self.assertAlmostEqual(fit.slope, 6.0, delta=1e-10)
        self.assertAlmostEqual(fit.intercept, math.log(3), delta=1e-8)
        self.assertLess(fit.residual, 1e-15)

    def test_pairs_are_sorted_coarse_first(self):
        fit = fit_order([(0.125, 1.0), (0.5, 16.0), (0.25, 4.0)])
        self.assertEqual(fit.h, (0.5, 0.25, 0.125))
        self.assertAlmostEqual(fit.order, 2.0)

    def test_rejections(self):
        with self.assertRaises(ConfigurationError):
            fit_order([(0.5, 1.0), (0.25, 0.5)])
        with self.assertRaises(NonPositiveValue) as ctx:
            fit_order([(0.5, 1.0), (0.25, 0.0), (0.125, 0.1)])
        self.assertEqual(ctx.exception.operation, 'fit_order')
        with self.assertRaises(ConfigurationError):
            fit_order([(0.5, 1.0), (0.2, 0.5), (0.1, 0.1)])


class AmplificationTests(SimpleTestCase):

    def test_near_boundary_ratio_is_bounded_by_the_lebesgue_ratio(self):
        field = sine_field()
        for order in (2, 4, 6):
            grid = ImmersedGrid.build(star_levelset(), 7, order=order)
            bound = 2 * float(lebesgue_ratio(order))
            for provider in (None, field):
                coeffs = fwt2d(grid.sample(field), grid, WaveletSpec(order, 0), provider=provider)
                ratio = boundary_amplification(coeffs)
                with self.subTest(order=order, boundary_values=provider is not None):
                    self.assertGreater(ratio, 0.0)
                    self.assertLessEqual(ratio, bound)

    def test_free_space_has_no_boundary_details(self):
        grid = ImmersedGrid.build(empty_levelset(), 5)
        coeffs = fwt2d(grid.sample(sine_field()), grid, WaveletSpec(4, 0))
        self.assertEqual(boundary_amplification(coeffs), 0.0)


class ScalingFunctionTests(SimpleTestCase):

    def test_hat_function(self):
        curve = scaling_function_samples(WaveletSpec(2), 3)
        self.assertAlmostEqual(curve.value_at(0.0), 1.0)
        self.assertAlmostEqual(curve.value_at(0.5), 0.5)
        self.assertAlmostEqual(curve.value_at(-0.25), 0.75)
        self.assertAlmostEqual(curve.value_at(1.0), 0.0)

    def test_four_point_function(self):
        curve = scaling_function_samples(WaveletSpec(4), 4)
        self.assertAlmostEqual(curve.value_at(0.5), 9 / 16)
        for k in (-3, -2, -1, 1, 2, 3):
            self.assertAlmostEqual(curve.value_at(float(k)), 0.0, places=14)
        self.assertEqual(len(curve.x), 16 * 16)

    def test_type1_curve_near_the_boundary(self):
        curve = scaling_function_samples(WaveletSpec(6), 1, context='type1')
        self.assertEqual(curve.x[0], 0.0)
        self.assertAlmostEqual(curve.value_at(0.0), 1.0)
        # value at 1/2 of the degree-5 Lagrange basis polynomial on 0..5
        self.assertAlmostEqual(curve.value_at(0.5), 0.24609375)
        self.assertIsNone(curve.boundary_position)

    def test_type2_curve_records_the_boundary(self):
        curve = scaling_function_samples(WaveletSpec(4), 3, context='type2', offset=0.5)
        self.assertAlmostEqual(curve.value_at(0.0), 1.0)
        self.assertLess(curve.boundary_position, curve.x[0])
        self.assertTrue(np.isfinite(curve.values).all())

    def test_invalid_context(self):
        with self.assertRaises(ConfigurationError):
            scaling_function_samples(WaveletSpec(4), 2, context='corner')
        with self.assertRaises(ConfigurationError):
            scaling_function_samples(WaveletSpec(4), 11)
