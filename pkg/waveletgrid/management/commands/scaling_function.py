from waveletgrid.diagnostics import scaling_function_samples
from waveletgrid.management.base import WaveletCommand
from waveletgrid.serializers import write_csv


class Command(WaveletCommand):
    help = 'Sample a scaling function by cascading a unit coefficient (free space or near a boundary)'

    def add_command_arguments(self, parser):
        parser.add_argument('--context', choices=['free', 'type1', 'type2'], default='free',
                            help='Periodic line, Type I end or Type II end (default free)')
        parser.add_argument('--refinements', type=int, default=6)
        parser.add_argument('--offset', type=float, default=1.0,
                            help='Boundary distance fraction psi for the type2 context. psi is held fixed '
                                 'at every refinement, so the boundary shifts relative to the curve '
                                 'as the cascade proceeds')
        parser.add_argument('--out', help='CSV path (x, value)')

    def run(self, options):
        spec = self.wavelet_spec(options)
        curve = scaling_function_samples(spec, options['refinements'], options['context'], options['offset'])
        self.echo(
            f'{spec} {curve.context}: {len(curve.x)} samples, '
            f'max {curve.values.max():.6f}, min {curve.values.min():.6f}'
        )
        if options.get('out'):
            write_csv([{'x': x, 'value': v} for x, v in zip(curve.x, curve.values)], options['out'])
            self.echo(f"Wrote {options['out']}")
