from waveletgrid.diagnostics import lebesgue_ratio, lebesgue_ratio_bc
from waveletgrid.management.base import WaveletCommand


class Command(WaveletCommand):
    help = 'Print near-boundary Lebesgue ratios with and without boundary values'

    def add_command_arguments(self, parser):
        parser.add_argument('--N', type=int, dest='N', help='Wavelet order (default: 2, 4 and 6)')
        parser.add_argument('--psi', type=float, default=1.0, help='Boundary distance fraction in (0, 1]')

    def run(self, options):
        orders = [options['N']] if options.get('N') else [2, 4, 6]
        psi = options['psi']
        self.echo(f"{'N':>3} {'rho(N)':>14} {'exact':>12} {f'rho(N, {psi:g})':>16}")
        for N in orders:
            ratio = lebesgue_ratio(N)
            with_bc = lebesgue_ratio_bc(N, psi)
            self.echo(f'{N:>3} {float(ratio):>14.6f} {str(ratio):>12} {float(with_bc):>16.6f}')
