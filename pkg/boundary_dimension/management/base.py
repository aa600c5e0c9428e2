import logging
import math
from typing import Any, Dict, Optional

import numpy as np
from django.core.management.base import BaseCommand, CommandError

from boundary_dimension.boxdim import dyadic_deltas
from boundary_dimension.config import RunConfig
from boundary_dimension.exceptions import BoundaryDimensionError, ConfigError
from boundary_dimension.hyperbolic import BoundaryPoint, ParabolicGroupSpec
from boundary_dimension.interval_partition import IntervalPartition, build_partition
from boundary_dimension.reports import Provenance, ReportWriter


logger = logging.getLogger(__name__)


VERBOSITY_LEVELS = {0: logging.WARNING, 1: logging.INFO, 2: logging.INFO, 3: logging.DEBUG}


class AssertionFailed(Exception):
    pass


class ComputationCommand(BaseCommand):
    """Shared flags, config loading and exit codes of the computation subcommands.

    Subclasses implement ``run(config)``; they record truncations in ``self.truncations`` and
    write their tables through ``self.writer``.
    """

    subcommand: str = ''
    requires_config = True

    def add_arguments(self, parser):
        parser.add_argument('--config', help='YAML run configuration')
        parser.add_argument('--out', default='out', help='Output directory')
        parser.add_argument('--threads', type=int, help='Worker threads (results do not depend on it)')
        parser.add_argument('--tol', type=float, help='Tolerance, overrides the config')
        parser.add_argument('--truncation', type=int, help='Truncation M, overrides the config')

    def handle(self, *args, **options):
        logging.getLogger().setLevel(VERBOSITY_LEVELS.get(options.get('verbosity', 1), logging.DEBUG))
        self.out_dir = options['out']
        self.truncations: Dict[str, Any] = {}
        try:
            config = self.load_config(options)
            self.config = config
            summary = self.run(config)
        except AssertionFailed as exc:
            raise CommandError(str(exc), returncode=1) from exc
        except BoundaryDimensionError as exc:
            logger.error(f'{self.subcommand}: {exc}')
            raise CommandError(str(exc), returncode=2) from exc
        if summary:
            self.stdout.write(summary)

    def load_config(self, options) -> RunConfig:
        path = options.get('config')
        if path:
            config = RunConfig.load(path)
        elif self.requires_config:
            raise ConfigError(f'{self.subcommand} needs --config')
        else:
            config = RunConfig()
        return config.override(options.get('tol'), options.get('truncation'), options.get('threads'))

    def run(self, config: RunConfig) -> Optional[str]:
        raise NotImplementedError

    @property
    def writer(self) -> ReportWriter:
        provenance = Provenance(
            subcommand=self.subcommand,
            config_hash=self.config.hash,
            truncations=dict(self.truncations),
            tolerances={'tolerance': self.config.tolerance},
        )
        return ReportWriter(self.out_dir, provenance)

    def partition(self, config: RunConfig, key: str = 'partition') -> IntervalPartition:
        spec, truncation = config.partition_spec(key)
        partition = build_partition(spec, truncation)
        self.truncations[key] = partition.truncation
        return partition

    def group(self, config: RunConfig) -> ParabolicGroupSpec:
        dimension = config.integer('group.dimension', minimum=2)
        vectors = config.get('group.vectors')
        if not isinstance(vectors, list) or not vectors:
            config.fail('Expected a list of translation vectors', 'group.vectors')
        vectors = tuple(config.vector(f'group.vectors.{index}', length=dimension - 1)
                        for index in range(len(vectors)))
        return ParabolicGroupSpec(dimension, vectors)

    def boundary_point(self, config: RunConfig, group: ParabolicGroupSpec, key: str = 'orbit.xi') -> BoundaryPoint:
        value = config.get(key)
        if value == 'infinity':
            return BoundaryPoint.infinity(group.dimension)
        return BoundaryPoint.plane(*config.vector(key, length=group.dimension - 1))

    def deltas(self, config: RunConfig, section: str, j_min: int = 6, j_max: int = 18) -> np.ndarray:
        return dyadic_deltas(config.integer(f'{section}.j_min', j_min, minimum=0),
                             config.integer(f'{section}.j_max', j_max, minimum=1))

    def t_grid(self, config: RunConfig, section: str, start: float, stop: float, step: float) -> np.ndarray:
        start = config.number(f'{section}.t_min', start)
        stop = config.number(f'{section}.t_max', stop)
        step = config.number(f'{section}.t_step', step, positive=True)
        if stop < start:
            config.fail('t_max must not be below t_min', f'{section}.t_max')
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return np.round(start + step * np.arange(count), 12)
