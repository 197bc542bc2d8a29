import logging
import time

from django.core.management.base import BaseCommand

from waveletgrid.conf import wavelet_settings
from waveletgrid.exceptions import ConfigurationError, WaveletGridError
from waveletgrid.geometry import levelset_from_config
from waveletgrid.serializers import RunConfig, load_run_config, parse_geometry
from waveletgrid.utils import command_error_from
from waveletgrid.wavelet1d import WaveletSpec

logger = logging.getLogger(__name__)


class WaveletCommand(BaseCommand):
    """
    Shared options of the numerical commands.

    Values resolve as command-line flag > run config > WAVELETGRID setting;
    library exceptions leave through command_error_from with exit code 2
    (configuration) or 3 (numerical failure).
    """

    def add_arguments(self, parser):
        parser.add_argument('--config', help='YAML or JSON run config')
        parser.add_argument('--threads', type=int, help='Worker threads per transform pass')
        parser.add_argument('--wavelet', help='Wavelet "N.Ntilde", e.g. 6.2')
        parser.add_argument('--geometry', help='Level-set JSON (inline or file path)')
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def handle(self, *args, **options):
        name = self.__module__.rsplit('.', 1)[-1]
        started = time.perf_counter()
        logger.info('Starting %s', name)
        try:
            self.config = load_run_config(options['config']) if options.get('config') else RunConfig()
            result = self.run(options)
        except WaveletGridError as exc:
            logger.error('%s failed: %s', name, exc)
            raise command_error_from(exc) from exc
        logger.info('Finished %s in %.2fs', name, time.perf_counter() - started)
        return result

    def run(self, options):
        raise NotImplementedError

    def option(self, options, flag, section=None, key=None, default=None):
        """Flag value, else run-config value, else ``default``."""
        value = options.get(flag)
        if value is not None:
            return value
        if section is not None:
            value = self.config.section(section).get(key or flag)
            if value is not None:
                return value
        return default

    def wavelet_spec(self, options):
        text = options.get('wavelet') or self.config.wavelet or wavelet_settings.WAVELET
        return WaveletSpec.parse(text)

    def levelset(self, options):
        if options.get('geometry'):
            description = parse_geometry(options['geometry'])
        else:
            description = self.config.geometry or wavelet_settings.GEOMETRY
        return levelset_from_config(description)

    def threads(self, options):
        threads = options.get('threads') or self.config.get('threads') or wavelet_settings.THREADS
        if threads < 1:
            raise ConfigurationError(f'--threads must be at least 1, got {threads}')
        return threads

    def radii(self):
        """(rn, rt) of the transform stencils from the run config, or None for the defaults."""
        stencil = self.config.section('stencil')
        if not stencil:
            return None
        return stencil.get('rn'), stencil.get('rt')

    def output(self, options, flag, key):
        return options.get(flag) or self.config.section('output').get(key)

    def echo(self, message):
        self.stdout.write(message)
