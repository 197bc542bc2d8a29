from waveletgrid.adaptation import compress_sweep
from waveletgrid.fields import field_from_config
from waveletgrid.geometry import ImmersedGrid
from waveletgrid.management.base import WaveletCommand
from waveletgrid.serializers import emit_loglog_plot, write_csv
from waveletgrid.utils import geometric_sequence


class Command(WaveletCommand):
    help = 'Compress a field over several transform levels and report Einf against eps'

    def add_command_arguments(self, parser):
        parser.add_argument('--level', type=int, help='Finest level L_max (default 9)')
        parser.add_argument('--levels', type=int, help='Number of forward transforms (default 4)')
        parser.add_argument('--eps', type=float, nargs='+', help='Compression thresholds')
        parser.add_argument('--sweep', type=float, nargs=3, metavar=('START', 'STOP', 'COUNT'),
                            help='Geometric eps sequence')
        parser.add_argument('--field', choices=['sine', 'random', 'polynomial', 'constant'],
                            help='Builtin field (default sine: 100 sin(4 pi x) sin(4 pi y))')
        parser.add_argument('--seed', type=int, help='Seed of the random field')
        parser.add_argument('--boundary-values', action='store_true',
                            help='Use the field itself as Dirichlet data (Type II closures)')
        parser.add_argument('--out', help='CSV report path')
        parser.add_argument('--plot', help='SVG path for the Einf(eps) plot')

    def eps_values(self, options):
        section = self.config.section('compress')
        if options.get('sweep'):
            start, stop, count = options['sweep']
            return geometric_sequence(start, stop, int(count))
        if options.get('eps') is not None:
            return options['eps']
        if 'sweep' in section:
            sweep = section['sweep']
            return geometric_sequence(sweep['start'], sweep['stop'], sweep['count'])
        return section.get('eps', [0.0])

    def run(self, options):
        spec = self.wavelet_spec(options)
        levelset = self.levelset(options)
        level = self.option(options, 'level', 'compress', default=9)
        levels = self.option(options, 'levels', 'compress', default=4)
        field_config = self.config.section('field')
        if options.get('field'):
            field_config['name'] = options['field']
        if options.get('seed') is not None:
            field_config['seed'] = options['seed']
        field = field_from_config(field_config)

        grid = ImmersedGrid.build(levelset, level, order=spec.order)
        values = grid.sample(field)
        provider = field if options.get('boundary_values') else None
        results = compress_sweep(
            values, grid, spec, levels, self.eps_values(options), provider, self.threads(options), self.radii(),
        )

        rows = []
        for result in results:
            row = {
                'eps': result.eps,
                'Einf': result.einf,
                'active_points': result.active_points,
                'compression_ratio': result.compression_ratio,
            }
            for offset, detail in enumerate(result.max_details):
                row[f'max_detail_L{level - offset}'] = detail
            rows.append(row)
            self.echo(
                f'eps={result.eps:.3e} Einf={result.einf:.6e} active={result.active_points}/{result.total_points}'
            )

        out = self.output(options, 'out', 'csv')
        if out:
            write_csv(rows, out)
            self.echo(f'Wrote {out}')
        plot = self.output(options, 'plot', 'plot')
        if plot:
            positive = [r for r in results if r.eps > 0 and r.einf > 0]
            if not positive:
                self.stderr.write('No positive (eps, Einf) pairs, plot skipped')
                return
            emit_loglog_plot(
                {'Einf': ([r.eps for r in positive], [r.einf for r in positive])},
                plot, guide_slope=1.0, xlabel='eps', ylabel='Einf', title=f'wavelet {spec}',
            )
            self.echo(f'Wrote {plot}')
