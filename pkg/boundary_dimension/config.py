"""Run configuration: one YAML file per run.

Values are read through typed getters that take dotted keys (``pressure.t_min``); a bad value
raises :class:`~boundary_dimension.exceptions.ConfigError` carrying the file name and the line
the key was written on.
"""
import hashlib
import json
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import yaml

from boundary_dimension.exceptions import ConfigError
from boundary_dimension.interval_partition import GeneratorSpec


logger = logging.getLogger(__name__)


SECTIONS = (
    'partition', 'partitions', 'pressure', 's_infinity', 'bowen', 'boxdim', 'gaps', 'group', 'orbit',
    'poincare', 'dichotomy', 'counting', 'verify', 'selftest', 'tolerance', 'threads', 'seed',
)

DEFAULT_TOLERANCE = 1e-3

MAX_TRUNCATION = 10 ** 8

_MISSING = object()


def _line_marks(node, prefix: str = '', marks: Optional[Dict[str, int]] = None) -> Dict[str, int]:
    """Map every dotted key of a composed YAML document to its 1-based line."""
    marks = {} if marks is None else marks
    if isinstance(node, yaml.MappingNode):
        for key_node, value_node in node.value:
            key = f'{prefix}.{key_node.value}' if prefix else str(key_node.value)
            marks[key] = key_node.start_mark.line + 1
            _line_marks(value_node, key, marks)
    elif isinstance(node, yaml.SequenceNode):
        for index, item in enumerate(node.value):
            key = f'{prefix}.{index}'
            marks[key] = item.start_mark.line + 1
            _line_marks(item, key, marks)
    return marks


def _canonical(value):
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, Mapping):
        return {str(key): _canonical(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_canonical(item) for item in value]
    return value


@dataclass
class RunConfig:
    data: Dict[str, Any] = field(default_factory=dict)
    path: Optional[str] = None
    marks: Dict[str, int] = field(default_factory=dict)
    truncation_override: Optional[int] = None

    @classmethod
    def load(cls, path: str) -> 'RunConfig':
        try:
            with open(path, encoding='utf-8') as stream:
                text = stream.read()
        except OSError as exc:
            raise ConfigError(f'Cannot read config: {exc.strerror}', path=path) from exc
        return cls.from_text(text, path)

    @classmethod
    def from_text(cls, text: str, path: Optional[str] = None) -> 'RunConfig':
        try:
            node = yaml.compose(text, Loader=yaml.SafeLoader)
            data = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            mark = getattr(exc, 'problem_mark', None)
            problem = getattr(exc, 'problem', None) or str(exc)
            raise ConfigError(f'Invalid YAML: {problem}', path=path,
                              line=mark.line + 1 if mark is not None else None) from exc
        if data is None:
            data = {}
        if not isinstance(data, dict):
            raise ConfigError('The config must be a mapping of sections', path=path, line=1)
        config = cls(data=data, path=path, marks=_line_marks(node) if node is not None else {})
        config.validate()
        logger.info(f'Loaded config {path or "<inline>"} with sections {sorted(data)}')
        return config

    def validate(self):
        for key in self.data:
            if key not in SECTIONS:
                self.fail(f'Unknown section (expected one of {", ".join(SECTIONS)})', key)
        for key in SECTIONS[:-3]:
            value = self.data.get(key)
            if key == 'partition' and isinstance(value, str):
                continue
            if value is not None and key != 'partitions' and not isinstance(value, dict):
                self.fail('Section must be a mapping', key)
        if 'partitions' in self.data and not isinstance(self.data['partitions'], list):
            self.fail('Section must be a list of partitions', 'partitions')
        if 'tolerance' in self.data:
            self.number('tolerance', positive=True)
        if 'threads' in self.data:
            self.integer('threads', minimum=1)
        if 'seed' in self.data:
            self.integer('seed', minimum=0)

    def fail(self, message: str, key: str):
        line = self.marks.get(key)
        if line is None and '.' in key:
            line = self.marks.get(key.rsplit('.', 1)[0])
        raise ConfigError(message, path=self.path, line=line, key=key)

    def override(self, tolerance: Optional[float] = None, truncation: Optional[int] = None,
                 threads: Optional[int] = None) -> 'RunConfig':
        if tolerance is not None:
            if not tolerance > 0:
                raise ConfigError(f'--tol must be positive, got {tolerance}', key='tolerance')
            self.data['tolerance'] = float(tolerance)
        if truncation is not None:
            if not 1 <= truncation <= MAX_TRUNCATION:
                raise ConfigError(f'--truncation must lie in [1, {MAX_TRUNCATION}], got {truncation}',
                                  key='truncation')
            self.truncation_override = int(truncation)
        if threads is not None:
            if threads < 1:
                raise ConfigError(f'--threads must be at least 1, got {threads}', key='threads')
            self.data['threads'] = int(threads)
        return self

    def get(self, key: str, default: Any = _MISSING) -> Any:
        value = self.data
        for part in key.split('.'):
            if isinstance(value, list) and part.isdigit() and int(part) < len(value):
                value = value[int(part)]
            elif isinstance(value, dict) and part in value:
                value = value[part]
            else:
                if default is _MISSING:
                    self.fail('Missing required key', key)
                return default
        return value

    def section(self, name: str) -> Dict[str, Any]:
        return self.data.get(name) or {}

    def number(self, key: str, default: Any = _MISSING, positive: bool = False,
               minimum: Optional[float] = None, maximum: Optional[float] = None) -> float:
        value = self.get(key, default)
        if value is None and default is None:
            return None
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            self.fail(f'Expected a number, got {value!r}', key)
        value = float(value)
        if math.isnan(value) or (positive and value <= 0):
            self.fail(f'Expected a positive number, got {value!r}', key)
        if minimum is not None and value < minimum:
            self.fail(f'Must be at least {minimum}, got {value!r}', key)
        if maximum is not None and value > maximum:
            self.fail(f'Must be at most {maximum}, got {value!r}', key)
        return value

    def integer(self, key: str, default: Any = _MISSING, minimum: Optional[int] = None,
                maximum: Optional[int] = None) -> int:
        value = self.get(key, default)
        if value is None and default is None:
            return None
        if isinstance(value, bool) or not isinstance(value, int):
            self.fail(f'Expected an integer, got {value!r}', key)
        if minimum is not None and value < minimum:
            self.fail(f'Must be at least {minimum}, got {value!r}', key)
        if maximum is not None and value > maximum:
            self.fail(f'Must be at most {maximum}, got {value!r}', key)
        return value

    def choice(self, key: str, choices: Sequence[str], default: Any = _MISSING) -> str:
        value = self.get(key, default)
        if value not in choices:
            self.fail(f'Expected one of {", ".join(choices)}, got {value!r}', key)
        return value

    def vector(self, key: str, default: Any = _MISSING, length: Optional[int] = None) -> Tuple[float, ...]:
        value = self.get(key, default)
        if not isinstance(value, (list, tuple)) or not all(
                isinstance(item, (int, float)) and not isinstance(item, bool) for item in value):
            self.fail(f'Expected a list of numbers, got {value!r}', key)
        if length is not None and len(value) != length:
            self.fail(f'Expected {length} numbers, got {len(value)}', key)
        return tuple(float(item) for item in value)

    @property
    def tolerance(self) -> float:
        return float(self.data.get('tolerance', DEFAULT_TOLERANCE))

    @property
    def threads(self) -> int:
        return int(self.data.get('threads', 1))

    @property
    def seed(self) -> int:
        return int(self.data.get('seed', 0))

    def partition_spec(self, key: str = 'partition', default_truncation: int = 10 ** 4
                       ) -> Tuple[GeneratorSpec, int]:
        """The generator and truncation of a partition block; ``--truncation`` wins over the file."""
        block = self.get(key)
        if isinstance(block, str):
            block = {'generator': block}
        if not isinstance(block, dict):
            self.fail('Expected a mapping with a generator', key)
        if not isinstance(block.get('generator'), str):
            self.fail('Missing generator name', f'{key}.generator')
        if self.truncation_override is not None:
            truncation = self.truncation_override
        else:
            truncation = self.integer(f'{key}.truncation', default_truncation, minimum=1, maximum=MAX_TRUNCATION)
        params = {name: value for name, value in block.items()
                  if name not in ('generator', 'truncation', 'label', 'perturbation')}
        return GeneratorSpec.parse({'name': block['generator'], **params}), truncation

    def partition_keys(self) -> List[str]:
        """Dotted keys of every partition block, ``partitions`` entries first."""
        keys = [f'partitions.{index}' for index in range(len(self.data.get('partitions') or []))]
        if 'partition' in self.data:
            keys.append('partition')
        return keys

    def effective(self) -> Dict[str, Any]:
        """The configuration the run actually used. Thread count is left out: it never changes results."""
        effective = {key: value for key, value in self.data.items() if key != 'threads'}
        effective['tolerance'] = self.tolerance
        if self.truncation_override is not None:
            effective['truncation'] = self.truncation_override
        return _canonical(effective)

    @property
    def hash(self) -> str:
        text = json.dumps(self.effective(), sort_keys=True, separators=(',', ':'))
        return hashlib.sha256(text.encode('utf-8')).hexdigest()
