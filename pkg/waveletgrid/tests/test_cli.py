import tempfile
from io import StringIO
from pathlib import Path

import numpy as np
import pandas as pd
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from waveletgrid.cli import main
from waveletgrid.geometry import ImmersedGrid, empty_levelset
from waveletgrid.management.commands.scaling_function import Command as ScalingFunctionCommand
from waveletgrid.serializers import read_field, write_csv

FREE_SPACE = '{"kind": "none"}'


class CommandTestCase(SimpleTestCase):

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()

    def call(self, name, **options):
        out = StringIO()
        call_command(name, stdout=out, stderr=StringIO(), **options)
        return out.getvalue()


class LebesgueCommandTests(CommandTestCase):

    def test_table(self):
        output = self.call('lebesgue')
        self.assertIn('35/3', output)
        self.assertIn('231/5', output)
        self.assertEqual(len(output.strip().splitlines()), 4)

    def test_single_order(self):
        output = self.call('lebesgue', N=4, psi=0.5)
        self.assertIn('0.833333', output)

    def test_start_and_finish_are_logged(self):
        with self.assertLogs('waveletgrid.management.base', 'INFO') as logs:
            self.call('lebesgue', N=2)
        self.assertIn('Starting lebesgue', logs.output[0])
        self.assertIn('Finished lebesgue', logs.output[-1])

    def test_failures_are_logged(self):
        with self.assertLogs('waveletgrid.management.base', 'ERROR') as logs:
            with self.assertRaises(CommandError):
                self.call('lebesgue', N=4, psi=2.0)
        self.assertIn('lebesgue failed', logs.output[0])


class CompressCommandTests(CommandTestCase):

    def test_report(self):
        out = self.tmp / 'compress.csv'
        output = self.call(
            'compress', geometry=FREE_SPACE, wavelet='4.0', level=5, levels=2,
            eps=[0.0, 1e-2], out=str(out),
        )
        self.assertIn('eps=0.000e+00', output)
        frame = pd.read_csv(out)
        self.assertEqual(
            list(frame.columns),
            ['eps', 'Einf', 'active_points', 'compression_ratio', 'max_detail_L5', 'max_detail_L4'],
        )
        self.assertLess(frame['Einf'][0], 1e-9)
        self.assertEqual(frame['compression_ratio'][0], 1.0)

    def test_run_config(self):
        config = self.tmp / 'run.yaml'
        out = self.tmp / 'sweep.csv'
        config.write_text(
            'geometry: {kind: none}\n'
            'wavelet: "2.0"\n'
            'compress: {level: 4, levels: 1, sweep: {start: 0.001, stop: 0.1, count: 3}}\n'
            f'output: {{csv: "{out}"}}\n'
        )
        self.call('compress', config=str(config))
        frame = pd.read_csv(out)
        np.testing.assert_allclose(frame['eps'], [1e-3, 1e-2, 1e-1])

    def test_invalid_config_exits_with_two(self):
        config = self.tmp / 'bad.yaml'
        config.write_text('compress: {level: 1}\n')
        with self.assertRaises(CommandError) as ctx:
            self.call('compress', config=str(config))
        self.assertEqual(ctx.exception.returncode, 2)


class TransformCommandTests(CommandTestCase):

    def test_forward_then_inverse(self):
        coeffs = self.tmp / 'coeffs.iwf1'
        restored = self.tmp / 'restored.iwf1'
        output = self.call('transform', geometry=FREE_SPACE, wavelet='6.2', field='sine', level=5, out=str(coeffs))
        self.assertIn('max|gx|', output)
        self.call('transform', geometry=FREE_SPACE, wavelet='6.2', input=str(coeffs), inverse=True, out=str(restored))

        grid = ImmersedGrid.build(empty_levelset(), 5)
        x, y = grid.coordinates()
        values = read_field(restored, grid).values
        np.testing.assert_allclose(values, 100 * np.sin(4 * np.pi * x) * np.sin(4 * np.pi * y), atol=1e-9)

    def test_missing_input(self):
        with self.assertRaises(CommandError) as ctx:
            self.call('transform', geometry=FREE_SPACE, inverse=True)
        self.assertEqual(ctx.exception.returncode, 2)


class DiffuseCommandTests(CommandTestCase):

    def test_flip_flop_guard_exits_with_two(self):
        with self.assertRaises(CommandError) as ctx:
            self.call('diffuse', wavelet='6.2', eps_ratio=10.0, level=5, tfinal=0.001)
        self.assertEqual(ctx.exception.returncode, 2)
        self.assertIn('Flip-flop', str(ctx.exception))

    def test_adaptive_run_outputs(self):
        prefix = self.tmp / 'star'
        self.call('diffuse', wavelet='6.2', level=5, tfinal=0.001, cadence=2, eps_r=1e-3, out_prefix=str(prefix))
        run = pd.read_csv(f'{prefix}_run.csv')
        self.assertEqual(list(run.columns), ['step', 't', 'level', 'max_detail', 'dt'])
        self.assertAlmostEqual(run['t'].iloc[-1], 0.001)
        events = pd.read_csv(f'{prefix}_events.csv')
        self.assertTrue((events['level_after'] == 5).all())
        self.assertEqual(read_field(f'{prefix}_final.iwf1').level, 5)
        self.assertTrue(Path(f'{prefix}_timing.csv').exists())


class ConvergenceCommandTests(CommandTestCase):

    def test_slope(self):
        path = self.tmp / 'errors.csv'
        plot = self.tmp / 'errors.svg'
        write_csv([{'h': 2.0 ** -k, 'value': 5 * 2.0 ** (-4 * k)} for k in range(3, 7)], path)
        output = self.call('convergence', input=str(path), plot=str(plot))
        self.assertIn('slope=4.000000', output)
        self.assertTrue(plot.exists())

    def test_non_positive_values_exit_with_three(self):
        path = self.tmp / 'errors.csv'
        write_csv([{'h': 0.5, 'value': 1.0}, {'h': 0.25, 'value': 0.0}, {'h': 0.125, 'value': 0.1}], path)
        with self.assertRaises(CommandError) as ctx:
            self.call('convergence', input=str(path))
        self.assertEqual(ctx.exception.returncode, 3)
        self.assertIn('fit_order', str(ctx.exception))


class ScalingFunctionCommandTests(CommandTestCase):

    def test_samples(self):
        out = self.tmp / 'phi.csv'
        output = self.call('scaling_function', wavelet='4.0', refinements=3, out=str(out))
        self.assertIn('samples', output)
        self.assertEqual(list(pd.read_csv(out).columns), ['x', 'value'])

    def test_help_names_the_fixed_offset(self):
        help_text = ScalingFunctionCommand().create_parser('manage.py', 'scaling_function').format_help()
        self.assertIn('psi is held fixed', ' '.join(help_text.split()))


class EntryPointTests(CommandTestCase):

    def test_exit_codes(self):
        self.assertEqual(main(['waveletgrid', 'lebesgue', '--N', '2']), 0)
        self.assertEqual(main(['waveletgrid', 'scaling-function', '--wavelet', '2.0', '--refinements', '2']), 0)
        self.assertEqual(main(['waveletgrid', 'lebesgue', '--bogus']), 2)
        self.assertEqual(main(['waveletgrid', 'lebesgue', '--N', '3']), 2)
