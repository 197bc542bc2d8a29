import numpy as np
from django.test import SimpleTestCase

from waveletgrid.adaptation import AdaptationState
from waveletgrid.diagnostics import fit_order
from waveletgrid.exceptions import ConfigurationError, UnstableStep
from waveletgrid.fields import random_field
from waveletgrid.geometry import ImmersedGrid, circle_levelset, empty_levelset, star_levelset
from waveletgrid.solver import (
    DiffusionProblem, assemble_laplacian, compare_fields, free_decay_problem, laplacian, mollifier, run_adaptive,
    run_fixed, star_diffusion_problem, step_rk3,
)
from waveletgrid.wavelet1d import WaveletSpec
from waveletgrid.wavelet2d import fwt2d


def zero(x, y, t=0.0):
    return np.zeros(np.broadcast(np.asarray(x), np.asarray(y)).shape)


def manufactured(x, y, t=0.0):
    """Eigenfunction of the Laplacian: lap(w) = -8 pi^2 w."""
    return np.sin(2 * np.pi * x) * np.cos(2 * np.pi * y) + 0.5 * np.cos(2 * np.pi * (x - y))


class MollifierTests(SimpleTestCase):

    def test_values(self):
        self.assertEqual(mollifier(-1.0), 0.0)
        self.assertEqual(mollifier(0.0), 0.0)
        self.assertEqual(mollifier(1.0), 1.0)
        self.assertAlmostEqual(mollifier(0.5), 0.5)
        values = mollifier(np.linspace(0, 1, 21))
        self.assertTrue(np.all(np.diff(values) >= 0))

    def test_star_problem_starts_quiescent(self):
        problem = star_diffusion_problem(final_time=1.0, levelset=star_levelset())
        self.assertEqual(problem.boundary(0.8, 0.5, 0.0), 0.0)
        self.assertAlmostEqual(problem.boundary(0.8, 0.51, 1.0), 0.0)
        self.assertEqual(problem.initial(0.2, 0.3), 0.0)


class LaplacianTests(SimpleTestCase):

    def test_quadratics_near_a_body(self):
        grid = ImmersedGrid.build(circle_levelset((0.5, 0.5), 0.2), 6)

        def u(x, y, t=0.0):
            return (x - 0.5) ** 2 + 2.0 * (y - 0.5) ** 2 + (x - 0.5) * (y - 0.5)

        result = laplacian(grid.sample(u), grid, u)
        x, y = grid.coordinates()
        region = grid.mask & (np.hypot(x - 0.5, y - 0.5) < 0.35)
        np.testing.assert_allclose(result[region], 6.0, atol=1e-6)

    def test_free_space_symbol(self):
        grid = ImmersedGrid.build(empty_levelset(), 4)
        operator = assemble_laplacian(grid)
        self.assertEqual(operator.B.shape, (256, 0))
        u = grid.sample(lambda x, y: np.sin(2 * np.pi * x) * np.sin(2 * np.pi * y))
        theta = 2 * np.pi * grid.h
        symbol = (-2 * np.cos(2 * theta) + 32 * np.cos(theta) - 30) / (12 * grid.h ** 2)
        result = operator.unflatten(operator.apply(operator.flatten(u), operator.boundary_vector(zero, 0.0)))
        np.testing.assert_allclose(result, 2 * symbol * u, atol=1e-9)

    def test_boundary_columns(self):
        grid = ImmersedGrid.build(star_levelset(), 5)
        operator = assemble_laplacian(grid)
        self.assertEqual(operator.A.shape, (grid.inside_count, grid.inside_count))
        self.assertEqual(operator.B.shape, (grid.inside_count, len(grid.control_points_all())))
        # constants have zero Laplacian when the boundary value matches
        ones = np.ones(grid.inside_count)
        g = np.ones(operator.B.shape[1])
        np.testing.assert_allclose(operator.apply(ones, g), 0.0, atol=1e-6)

    def test_order_near_the_boundary(self):
        pairs = []
        for level in (6, 7, 8):
            grid = ImmersedGrid.build(star_levelset(), level)
            result = laplacian(grid.sample(manufactured), grid, manufactured)
            x, y = grid.coordinates()
            near = grid.mask & grid.near_boundary_mask(3.0)
            error = np.abs(result + 8 * np.pi ** 2 * manufactured(x, y))[near]
            pairs.append((grid.h, error.max()))
        self.assertGreaterEqual(fit_order(pairs).slope, 3.0)


class TimeSteppingTests(SimpleTestCase):

    def test_zero_data_stays_zero(self):
        problem = DiffusionProblem(
            levelset=star_levelset(), boundary=zero, initial=zero, final_time=20 * 0.2 / 32 ** 2,
        )
        record = run_fixed(problem, WaveletSpec(6, 2), 5)
        self.assertEqual(len(record.series), 20)
        self.assertTrue(np.all(record.values[record.grid.mask] == 0.0))

    def test_free_decay_matches_the_exact_solution(self):
        problem = free_decay_problem(final_time=0.01)
        record = run_fixed(problem, WaveletSpec(6, 2), 8)
        x, y = record.grid.coordinates()
        exact = problem.boundary(x, y, record.final_time)
        self.assertAlmostEqual(record.final_time, 0.01)
        self.assertLess(np.max(np.abs(record.values - exact)), 1e-6)

    def test_third_order_in_time(self):
        problem = free_decay_problem()
        grid = ImmersedGrid.build(empty_levelset(), 4)
        operator = assemble_laplacian(grid)
        theta = 2 * np.pi * grid.h
        symbol = 2 * (-2 * np.cos(2 * theta) + 32 * np.cos(theta) - 30) / (12 * grid.h ** 2)
        u0 = operator.flatten(grid.sample(problem.initial))
        final_time = 0.002
        pairs = []
        for steps in (10, 20, 40):
            dt = final_time / steps
            u = u0
            for k in range(steps):
                u = step_rk3(u, k * dt, dt, problem, operator)
            pairs.append((dt, np.max(np.abs(u - np.exp(symbol * final_time) * u0))))
        self.assertAlmostEqual(fit_order(pairs).slope, 3.0, delta=0.3)

    def test_fourth_order_in_space(self):
        problem = free_decay_problem(final_time=0.005)
        pairs = []
        for level in (4, 5, 6):
            h = 2.0 ** -level
            record = run_fixed(problem, WaveletSpec(6, 2), level, dt=0.05 * h * h)
            x, y = record.grid.coordinates()
            pairs.append((h, np.max(np.abs(record.values - problem.boundary(x, y, record.final_time)))))
        self.assertAlmostEqual(fit_order(pairs).slope, 4.0, delta=0.35)

    def test_unstable_steps_are_reported(self):
        problem = DiffusionProblem(
            levelset=empty_levelset(), boundary=zero,
            initial=lambda x, y: random_field(seed=5)(x, y), final_time=1.0,
        )
        with self.assertRaises(UnstableStep) as ctx:
            run_fixed(problem, WaveletSpec(4, 0), 4, dt=1.0)
        self.assertEqual(ctx.exception.operation, 'step_rk3')


class RunTests(SimpleTestCase):

    def test_adaptive_run_of_a_quiescent_problem(self):
        problem = DiffusionProblem(
            levelset=star_levelset(), boundary=zero, initial=zero, final_time=10 * 0.2 / 32 ** 2,
        )
        state = AdaptationState.from_ratio(5, 1e-3, order=6, ratio=100, k=2, cadence=5, min_level=5)
        record = run_adaptive(problem, WaveletSpec(6, 2), state)
        self.assertEqual(len(record.events), 2)
        self.assertTrue(all(event.level_after == 5 for event in record.events))
        self.assertEqual(record.grid.level, 5)

    def test_mismatched_order_warns(self):
        problem = DiffusionProblem(
            levelset=empty_levelset(), boundary=zero, initial=zero, final_time=0.2 / 16 ** 2,
        )
        state = AdaptationState.from_ratio(4, 1e-3, order=4, ratio=100, k=0, cadence=5, min_level=4)
        with self.assertLogs('waveletgrid.solver', 'WARNING'):
            run_adaptive(problem, WaveletSpec(6, 0), state)

    def test_compare_fields(self):
        problem = free_decay_problem(final_time=1e-4)
        coarse = run_fixed(problem, WaveletSpec(4, 0), 4, dt=1e-5)
        fine = run_fixed(problem, WaveletSpec(4, 0), 5, dt=1e-5)
        errors = compare_fields(coarse, fine)
        self.assertEqual(errors['points'], 256)
        self.assertLess(errors['linf'], 1e-3)
        self.assertLessEqual(errors['l2'], errors['linf'])
        with self.assertRaises(ConfigurationError):
            compare_fields(fine, coarse)


class ThresholdSweepTests(SimpleTestCase):
    """
    Steady manufactured solution on the star: u_t = lap(u) + 8 pi^2 w with
    u = w on the body. Each eps_r sits between the scaled details of two
    consecutive levels, so the runs settle at levels 5, 6 and 7.
    """

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        spec = WaveletSpec(6, 2)
        levelset = star_levelset()
        scaled = {}
        for level in (5, 6, 7):
            grid = ImmersedGrid.build(levelset, level, order=spec.order)
            coeffs = fwt2d(grid.sample(manufactured), grid, spec, provider=manufactured)
            scaled[level] = coeffs.max_detail * 4.0 ** (level - 5)
        cls.eps_values = [4 * scaled[5], np.sqrt(scaled[5] * scaled[6]), np.sqrt(scaled[6] * scaled[7])]
        problem = DiffusionProblem(
            levelset=levelset,
            boundary=manufactured,
            initial=manufactured,
            source=lambda x, y, t: 8 * np.pi ** 2 * manufactured(x, y),
            final_time=0.05,
        )
        cls.records = []
        for eps_r in cls.eps_values:
            state = AdaptationState.from_ratio(
                5, eps_r, order=6, ratio=100, k=2, cadence=5, min_level=5, max_level=7,
            )
            cls.records.append(run_adaptive(problem, spec, state))

    def test_runs_settle_one_level_apart(self):
        self.assertEqual([record.grid.level for record in self.records], [5, 6, 7])

    def test_error_is_proportional_to_the_refinement_threshold(self):
        linf, l2 = [], []
        for record in self.records:
            x, y = record.grid.coordinates()
            diff = (record.values - manufactured(x, y))[record.grid.mask]
            linf.append(np.max(np.abs(diff)))
            l2.append(np.sqrt(np.mean(diff ** 2)))
        for norm, errors in (('linf', linf), ('l2', l2)):
            slope = np.polyfit(np.log(self.eps_values), np.log(errors), 1)[0]
            with self.subTest(norm=norm):
                self.assertAlmostEqual(slope, 1.0, delta=0.3)

    def test_max_detail_stays_in_the_threshold_band(self):
        events = [event for record in self.records for event in record.events]
        inside = [event.coarsen_threshold <= event.max_detail <= event.refine_threshold for event in events]
        self.assertGreaterEqual(np.mean(inside), 0.95)
