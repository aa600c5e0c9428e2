"""CSV tables and JSON reports with provenance.

Both formats are byte-for-byte reproducible: keys are sorted, floats are written with ``repr``
and non-finite values as the strings ``inf``, ``-inf`` and ``nan``. Provenance holds what changes
results (config hash, truncations, tolerances) and nothing that does not (threads, clock).
"""
import csv
import dataclasses
import enum
import json
import logging
import math
import os
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence

import numpy as np

from boundary_dimension.version import __version__


logger = logging.getLogger(__name__)


class Verdict(str, enum.Enum):
    PASS = 'PASS'
    FAIL = 'FAIL'
    INCONCLUSIVE = 'INCONCLUSIVE'
    SKIPPED = 'SKIPPED'


def overall_verdict(verdicts: Iterable[Verdict]) -> Verdict:
    """FAIL beats INCONCLUSIVE beats PASS; SKIPPED assertions do not count."""
    verdicts = [verdict for verdict in verdicts if verdict != Verdict.SKIPPED]
    if Verdict.FAIL in verdicts:
        return Verdict.FAIL
    if Verdict.INCONCLUSIVE in verdicts:
        return Verdict.INCONCLUSIVE
    return Verdict.PASS if verdicts else Verdict.SKIPPED


@dataclass(frozen=True)
class Provenance:
    subcommand: str
    config_hash: str
    truncations: Dict[str, Any] = field(default_factory=dict)
    tolerances: Dict[str, Any] = field(default_factory=dict)
    version: str = str(__version__)

    def as_dict(self) -> Dict[str, Any]:
        return to_jsonable(dataclasses.asdict(self))


def format_value(value: Any) -> str:
    if isinstance(value, enum.Enum):
        return str(value.value)
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return 'nan'
        if math.isinf(value):
            return 'inf' if value > 0 else '-inf'
        return repr(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if value is None:
        return ''
    return str(value)


def to_jsonable(value: Any) -> Any:
    if isinstance(value, enum.Enum):
        return value.value
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return to_jsonable(dataclasses.asdict(value))
    if isinstance(value, Mapping):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, np.ndarray):
        return [to_jsonable(item) for item in value.tolist()]
    if isinstance(value, (list, tuple)):
        return [to_jsonable(item) for item in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else format_value(value)
    return value


def dumps(report: Mapping[str, Any]) -> str:
    return json.dumps(to_jsonable(report), sort_keys=True, indent=2, allow_nan=False) + '\n'


class ReportWriter:
    """Writes the tables and the report of one run into ``out_dir``."""

    def __init__(self, out_dir: str, provenance: Provenance):
        self.out_dir = out_dir
        self.provenance = provenance
        self.written: List[str] = []

    def path(self, name: str) -> str:
        return os.path.join(self.out_dir, name)

    def write_csv(self, name: str, rows: Sequence[Mapping[str, Any]], columns: Optional[Sequence[str]] = None) -> str:
        rows = list(rows)
        if columns is None:
            columns = list(rows[0]) if rows else []
        os.makedirs(self.out_dir, exist_ok=True)
        path = self.path(name)
        with open(path, 'w', newline='', encoding='utf-8') as stream:
            for key, value in sorted(self.provenance.as_dict().items()):
                stream.write(f'# {key}={json.dumps(value, sort_keys=True)}\n')
            writer = csv.writer(stream, lineterminator='\n')
            writer.writerow(columns)
            for row in rows:
                writer.writerow([format_value(row.get(column)) for column in columns])
        logger.info(f'Wrote {len(rows)} rows to {path}')
        self.written.append(path)
        return path

    def write_json(self, name: str, report: Mapping[str, Any]) -> str:
        os.makedirs(self.out_dir, exist_ok=True)
        path = self.path(name)
        with open(path, 'w', encoding='utf-8') as stream:
            stream.write(dumps({'provenance': self.provenance.as_dict(), **report}))
        logger.info(f'Wrote report {path}')
        self.written.append(path)
        return path
