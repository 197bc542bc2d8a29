from waveletgrid.exceptions import ConfigurationError
from waveletgrid.fields import field_from_config
from waveletgrid.geometry import ImmersedGrid
from waveletgrid.management.base import WaveletCommand
from waveletgrid.serializers import read_field, write_field
from waveletgrid.wavelet2d import CoefficientField, fwt2d, iwt2d


class Command(WaveletCommand):
    help = 'Apply one forward (or inverse) 2D transform level to an IWF1 field'

    def add_command_arguments(self, parser):
        parser.add_argument('--input', help='IWF1 field (or coefficients with --inverse)')
        parser.add_argument('--field', choices=['sine', 'random', 'polynomial', 'constant'],
                            help='Sample a builtin field instead of reading --input')
        parser.add_argument('--level', type=int, help='Grid level when sampling --field (default 8)')
        parser.add_argument('--inverse', action='store_true', help='Inverse transform')
        parser.add_argument('--out', help='IWF1 output path')

    def run(self, options):
        spec = self.wavelet_spec(options)
        levelset = self.levelset(options)
        threads = self.threads(options)

        if options.get('input'):
            stored = read_field(options['input'])
            grid = ImmersedGrid.build(levelset, stored.level, order=spec.order)
            values = read_field(options['input'], grid).values
        elif options.get('field') and not options.get('inverse'):
            grid = ImmersedGrid.build(levelset, options.get('level') or 8, order=spec.order)
            values = grid.sample(field_from_config({'name': options['field']}))
        else:
            raise ConfigurationError('Give --input, or --field for a forward transform')

        if options.get('inverse'):
            result = iwt2d(CoefficientField(data=values, grid=grid, spec=spec), threads=threads, radii=self.radii())
            self.echo(f'Inverse transform at level {grid.level}: {grid.inside_count} inside points')
        else:
            coeffs = fwt2d(values, grid, spec, threads=threads, radii=self.radii())
            result = coeffs.data
            maxima = coeffs.max_details()
            self.echo(
                f'Forward transform at level {grid.level}: '
                + ' '.join(f'max|{name}|={value:.6e}' for name, value in maxima.items())
            )

        out = self.output(options, 'out', 'field')
        if out:
            write_field(out, result, grid)
            self.echo(f'Wrote {out}')
