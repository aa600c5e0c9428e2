"""Cache entries and their keys.

A key reads ``bd:<module.function>:<digest>``. The digest covers the calling arguments and the
values of the settings the function depends on. Arrays enter through a content fingerprint and
floats through ``repr``, so nearby parameter values never share a key.
"""
import datetime
import hashlib
from dataclasses import dataclass
from typing import Any, Callable, Dict, Mapping, Optional, Sequence, Tuple

import numpy as np
from django.utils.timezone import now

from boundary_dimension.utils import fingerprint, get_func_name


CACHE_KEY_PREFIX = 'bd'

ACTIVE_VERSION = 1
EXPIRED_VERSION = 2

CallingArgs = Tuple[Tuple[Any, ...], Dict[str, Any]]


missing = object()


@dataclass
class CacheResult:
    result: Any
    expires: datetime.datetime
    calling_args: Optional[CallingArgs] = None

    @property
    def has_expired(self) -> bool:
        return now() >= self.expires


def key_part(value: Any) -> str:
    if isinstance(value, np.ndarray):
        return f'array:{fingerprint(value)}'
    if isinstance(value, (bool, np.bool_)):
        return repr(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, Mapping):
        items = sorted(value.items(), key=lambda item: str(item[0]))
        return '{' + ','.join(f'{key_part(key)}:{key_part(item)}' for key, item in items) + '}'
    if isinstance(value, (list, tuple)):
        return '(' + ','.join(map(key_part, value)) + ')'
    # Partitions, branch maps and point clouds put their fingerprint in repr
    return repr(value)


def make_cache_key(f: Callable, calling_args: Optional[CallingArgs] = None, context: Sequence[Any] = ()) -> str:
    args, kwargs = calling_args or ((), {})
    text = key_part((tuple(args), dict(kwargs), tuple(context)))
    digest = hashlib.md5(text.encode(), usedforsecurity=False).hexdigest()
    return ':'.join([CACHE_KEY_PREFIX, get_func_name(f), digest])
