import numpy as np
from django.test import SimpleTestCase

from waveletgrid.exceptions import ConfigurationError, DegenerateGradient
from waveletgrid.geometry import (
    Axis, ImmersedGrid, IntervalKind, LevelSet, Side, circle_levelset, classify_points, compute_normal,
    discs_levelset, empty_levelset, levelset_from_config, star_levelset,
)


def band_levelset(center=0.75, half_width=0.2):
    """Periodic band |x - center| < half_width along x (the body is the rest)."""
    def func(x, y):
        d = np.mod(x - center + 0.5, 1.0) - 0.5
        return half_width - np.abs(d) + 0.0 * y
    return LevelSet(func=func, name='band')


class ClassifyPointsTests(SimpleTestCase):

    def test_mask_follows_level_set_sign(self):
        levelset = circle_levelset((0.5, 0.5), 0.25)
        grid = classify_points(levelset, 5)
        x, y = grid.coordinates()
        expected = np.hypot(x - 0.5, y - 0.5) - 0.25 >= grid.snap_tolerance * grid.h
        np.testing.assert_array_equal(grid.mask, expected)
        self.assertEqual(grid.dims, (32, 32))

    def test_points_closer_than_snap_tolerance_are_outside(self):
        # phi vanishes exactly on the grid point x = 0.25
        levelset = LevelSet(func=lambda x, y: np.abs(x - 0.5) - 0.25 + 0.0 * y)
        grid = classify_points(levelset, 4, snap_tolerance=1e-3)
        self.assertFalse(grid.mask[4, 0])
        self.assertTrue(grid.mask[3, 0])

    def test_rejects_tiny_levels(self):
        with self.assertRaises(ConfigurationError):
            classify_points(empty_levelset(), 1)

    def test_unknown_geometry_kind(self):
        with self.assertRaises(ConfigurationError):
            levelset_from_config({'kind': 'hexagon'})

    def test_discs_from_config(self):
        levelset = levelset_from_config({'kind': 'discs', 'centers': [[0.3, 0.3], [0.7, 0.7]], 'r': 0.1})
        self.assertEqual(levelset.name, 'discs')
        self.assertAlmostEqual(float(levelset(0.3, 0.5)), 0.1)
        self.assertAlmostEqual(float(levelset(0.7, 0.7)), -0.1)
        np.testing.assert_allclose(levelset.gradient(np.array([0.75]), np.array([0.7])), [[1.0], [0.0]])


class ControlPointTests(SimpleTestCase):

    def test_roots_on_a_band(self):
        grid = ImmersedGrid.build(band_levelset(), 5)
        points = grid.control_points[Axis.X]
        self.assertEqual(len(points), 2 * 32)
        self.assertEqual(grid.control_points[Axis.Y], [])
        for cp in points:
            self.assertAlmostEqual(cp.position[0], 0.55 if cp.side is Side.LEFT else 0.95, delta=1e-10)
            self.assertAlmostEqual(cp.psi, 0.4, delta=1e-8)
        left = [cp for cp in points if cp.side is Side.LEFT]
        self.assertTrue(all(cp.adjacent_inside_index == 18 and cp.outside_index == 17 for cp in left))
        self.assertAlmostEqual(left[0].line_coordinate, 17.6, delta=1e-8)

    def test_normals_point_into_the_domain(self):
        levelset = star_levelset()
        grid = ImmersedGrid.build(levelset, 6)
        for cp in grid.control_points_all():
            self.assertAlmostEqual(np.hypot(*cp.normal), 1.0, places=12)
            ahead = np.array(cp.position) + 1e-3 * np.array(cp.normal)
            self.assertGreater(levelset(ahead[0], ahead[1]), 0.0)

    def test_control_points_are_sorted(self):
        grid = ImmersedGrid.build(star_levelset(), 6)
        for axis in Axis:
            keys = [(cp.line_index, cp.position[int(axis)]) for cp in grid.control_points[axis]]
            self.assertEqual(keys, sorted(keys))

    def test_compute_normal_on_circle(self):
        normal = compute_normal(circle_levelset((0.5, 0.5), 0.25), (0.75, 0.5))
        np.testing.assert_allclose(normal, [1.0, 0.0], atol=1e-12)

    def test_degenerate_gradient(self):
        flat = LevelSet(func=lambda x, y: 0.0 * x, gradient=lambda x, y: (0.0 * x, 0.0 * y))
        with self.assertRaises(DegenerateGradient):
            compute_normal(flat, (0.3, 0.3))


class IntervalTests(SimpleTestCase):

    def test_band_intervals(self):
        grid = ImmersedGrid.build(band_levelset(), 5, order=6)
        row = grid.line_intervals(Axis.X, 3)
        self.assertEqual(len(row), 1)
        interval = row[0]
        self.assertEqual((interval.start_index, interval.end_index), (18, 30))
        self.assertIs(interval.kind, IntervalKind.WIDE)
        self.assertEqual(interval.left.side, Side.LEFT)
        self.assertEqual(interval.right.adjacent_inside_index, 30)
        self.assertIs(grid.line_intervals(Axis.Y, 20)[0].kind, IntervalKind.FULL_PERIODIC_LINE)
        self.assertEqual(grid.line_intervals(Axis.Y, 5), [])

    def test_interval_across_the_seam(self):
        grid = ImmersedGrid.build(band_levelset(center=0.0), 5, order=6)
        interval = grid.line_intervals(Axis.X, 0)[0]
        self.assertEqual((interval.start_index, interval.end_index), (26, 38))
        self.assertEqual(list(interval.indices(32)[:7]), [26, 27, 28, 29, 30, 31, 0])

    def test_narrow_classification_depends_on_order(self):
        levelset = band_levelset(half_width=0.15)
        wide = ImmersedGrid.build(levelset, 5, order=4).line_intervals(Axis.X, 0)[0]
        narrow = ImmersedGrid.build(levelset, 5, order=6).line_intervals(Axis.X, 0)[0]
        self.assertEqual(wide.length, 9)
        self.assertIs(wide.kind, IntervalKind.WIDE)
        self.assertIs(narrow.kind, IntervalKind.NARROW)

    def test_empty_levelset_has_only_full_lines(self):
        grid = ImmersedGrid.build(empty_levelset(), 4)
        self.assertEqual(grid.control_points_all(), [])
        for axis in Axis:
            self.assertTrue(all(line[0].kind is IntervalKind.FULL_PERIODIC_LINE for line in grid.intervals[axis]))
        self.assertFalse(grid.near_boundary_mask().any())

    def test_coarsen_subsamples_the_mask(self):
        grid = ImmersedGrid.build(star_levelset(), 7)
        coarse = grid.coarsen()
        self.assertEqual(coarse.level, 6)
        np.testing.assert_array_equal(coarse.mask, grid.mask[::2, ::2])
