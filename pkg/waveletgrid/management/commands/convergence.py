from waveletgrid.diagnostics import fit_order
from waveletgrid.management.base import WaveletCommand
from waveletgrid.serializers import emit_loglog_plot, read_pairs


class Command(WaveletCommand):
    help = 'Fit the convergence order of (h, value) pairs from a CSV file'

    def add_command_arguments(self, parser):
        parser.add_argument('--input', required=True, help='CSV with a header row')
        parser.add_argument('--x', default='h', help='Grid-spacing column (default h)')
        parser.add_argument('--y', default='value', help='Error column (default value)')
        parser.add_argument('--plot', help='SVG path for the fitted data')

    def run(self, options):
        pairs = read_pairs(options['input'], options['x'], options['y'])
        fit = fit_order(pairs)
        self.echo(f'slope={fit.slope:.6f} intercept={fit.intercept:.6f} residual={fit.residual:.3e}')
        if options.get('plot'):
            emit_loglog_plot(
                {options['y']: (fit.h, fit.values)}, options['plot'],
                guide_slope=round(fit.slope), xlabel=options['x'], ylabel=options['y'],
            )
            self.echo(f"Wrote {options['plot']}")
