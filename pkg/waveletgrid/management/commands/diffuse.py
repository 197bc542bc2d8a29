import attrs

from waveletgrid.adaptation import AdaptationState
from waveletgrid.conf import wavelet_settings
from waveletgrid.geometry import ImmersedGrid
from waveletgrid.management.base import WaveletCommand
from waveletgrid.serializers import emit_loglog_plot, read_field, write_csv, write_field
from waveletgrid.solver import RunRecord, compare_fields, run_adaptive, run_fixed, star_diffusion_problem
from waveletgrid.utils import geometric_sequence


class Command(WaveletCommand):
    help = 'Run the immersed diffusion problem with temporal grid adaptation'

    def add_command_arguments(self, parser):
        parser.add_argument('--level', type=int, help='Initial level L0 (default 7)')
        parser.add_argument('--eps-r', type=float, help='Refinement threshold')
        parser.add_argument('--eps-ratio', type=float, help='eps_r / eps_c (default 100)')
        parser.add_argument('--k', type=int, help='Level-dependence exponent (default 2)')
        parser.add_argument('--cadence', type=int, help='Steps between adaptation checks (default 10)')
        parser.add_argument('--tfinal', type=float, help='Final time (default 5)')
        parser.add_argument('--ref-level', type=int, help='Level of a fixed-grid reference run')
        parser.add_argument('--reference', help='IWF1 final field of a reference run')
        parser.add_argument('--fixed', action='store_true', help='Run at --level without adaptation')
        parser.add_argument('--sweep', type=float, nargs=3, metavar=('START', 'STOP', 'COUNT'),
                            help='Geometric eps_r sequence')
        parser.add_argument('--out-prefix', help='Prefix of the output files')

    def run(self, options):
        spec = self.wavelet_spec(options)
        levelset = self.levelset(options)
        threads = self.threads(options)
        adaptation = wavelet_settings.ADAPTATION
        level = self.option(options, 'level', 'solver', default=7)
        tfinal = self.option(options, 'tfinal', 'solver', default=5.0)
        prefix = options.get('out_prefix') or self.config.section('output').get('prefix') or 'diffuse'
        problem = star_diffusion_problem(final_time=tfinal, levelset=levelset)
        fourier = self.config.section('solver').get('fourier')
        if fourier is not None:
            problem = attrs.evolve(problem, fourier=fourier)

        if options.get('fixed'):
            record = run_fixed(problem, spec, level)
            self.write_record(record, prefix)
            return

        reference = self.reference(options, problem, spec, levelset)
        if options.get('sweep'):
            start, stop, count = options['sweep']
            eps_values = geometric_sequence(start, stop, int(count))
        else:
            eps_values = [self.option(options, 'eps_r', 'adaptation', default=1e-3)]

        summary = []
        for eps_r in eps_values:
            state = AdaptationState.from_ratio(
                level=level,
                eps_r=eps_r,
                order=spec.order,
                ratio=self.option(options, 'eps_ratio', 'adaptation', default=adaptation['EPS_RATIO']),
                k=self.option(options, 'k', 'adaptation', default=adaptation['K']),
                cadence=self.option(options, 'cadence', 'adaptation', default=adaptation['CADENCE']),
                min_level=self.config.section('adaptation').get('min_level', adaptation['MIN_LEVEL']),
                max_level=self.config.section('adaptation').get('max_level', adaptation['MAX_LEVEL']),
            )
            record = run_adaptive(problem, spec, state, threads=threads)
            run_prefix = prefix if len(eps_values) == 1 else f'{prefix}_eps{eps_r:.3e}'
            self.write_record(record, run_prefix)
            row = {'eps_r': eps_r, 'eps_c': state.eps_c, 'final_level': record.grid.level}
            if reference is not None:
                row.update(compare_fields(record, reference))
                self.echo(f"eps_r={eps_r:.3e}: Linf={row['linf']:.6e} L2={row['l2']:.6e}")
            summary.append(row)

        if reference is None:
            if len(summary) > 1:
                write_csv(summary, f'{prefix}_sweep.csv')
                self.echo(f'Wrote {prefix}_sweep.csv')
        else:
            write_csv(summary, f'{prefix}_errors.csv')
            self.echo(f'Wrote {prefix}_errors.csv')
            if len(summary) > 1 and all(r['linf'] > 0 and r['l2'] > 0 for r in summary):
                eps = [r['eps_r'] for r in summary]
                emit_loglog_plot(
                    {'Linf': (eps, [r['linf'] for r in summary]), 'L2': (eps, [r['l2'] for r in summary])},
                    f'{prefix}_errors.svg', guide_slope=1.0, xlabel='eps_r', ylabel='error',
                )

    def reference(self, options, problem, spec, levelset):
        if options.get('reference'):
            stored = read_field(options['reference'])
            grid = ImmersedGrid.build(levelset, stored.level, order=spec.order)
            values = read_field(options['reference'], grid).values
            return RunRecord(series=[], events=[], values=values, grid=grid, wall_time=0.0)
        ref_level = self.option(options, 'ref_level', 'solver', default=None)
        if ref_level is None:
            return None
        self.echo(f'Computing reference at level {ref_level}')
        return run_fixed(problem, spec, ref_level)

    def write_record(self, record, prefix):
        write_csv(
            [{'step': p.step, 't': p.time, 'level': p.level, 'max_detail': p.max_detail, 'dt': p.dt}
             for p in record.series],
            f'{prefix}_run.csv',
        )
        write_csv(
            [{'t': e.time, 'decision': e.decision.value, 'max_detail': e.max_detail,
              'level_before': e.level_before, 'level_after': e.level_after,
              'coarsen_threshold': e.coarsen_threshold, 'refine_threshold': e.refine_threshold}
             for e in record.events],
            f'{prefix}_events.csv',
        )
        write_field(f'{prefix}_final.iwf1', record.values, record.grid)
        write_csv([{'wall_time': record.wall_time}], f'{prefix}_timing.csv')
        self.echo(f'Wrote {prefix}_run.csv, {prefix}_events.csv, {prefix}_final.iwf1')
