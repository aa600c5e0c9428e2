from typing import Any, Callable, List, Optional, Sequence, Set, Tuple

from django.core.cache import caches
from django.core.cache.backends.base import BaseCache
from django.utils.timezone import now

from boundary_dimension.cache.cache import (
    ACTIVE_VERSION, CACHE_KEY_PREFIX, EXPIRED_VERSION, CacheResult, CallingArgs, make_cache_key, missing
)
from boundary_dimension.settings import settings
from boundary_dimension.utils import get_func_name


class CachedFunction:
    """The cache entries of one decorated function.

    A key holds either an active result or an expired one, which is served once more while it is
    recomputed. Live keys are indexed under ``bd:<function>`` so that ``clear`` reaches all of them.
    """

    def __init__(self, f: Callable, backend: str, depends_on: Sequence[str] = ()):
        self.f = f
        self.func_name = get_func_name(f)
        self.backend = backend
        self.depends_on = tuple(depends_on)

    @property
    def cache(self) -> BaseCache:
        # Looked up per access: domain modules are imported before Django is configured
        return caches[self.backend]

    def context(self) -> Tuple[Tuple[str, Any], ...]:
        return tuple((name, getattr(settings, name)) for name in self.depends_on)

    def make_key(self, calling_args: Optional[CallingArgs] = None) -> str:
        return make_cache_key(self.f, calling_args, self.context())

    def get_active(self, key: str, default=missing) -> CacheResult:
        return self.cache.get(key, default, version=ACTIVE_VERSION)

    def get_expired(self, key: str, default=missing) -> CacheResult:
        return self.cache.get(key, default, version=EXPIRED_VERSION)

    def set_active(self, key: str, value: CacheResult):
        self._move(key, value, to_version=ACTIVE_VERSION, from_version=EXPIRED_VERSION)
        self._index(self._keys() | {key})

    def set_expired(self, key: str, value: CacheResult):
        value.expires = now()
        self._move(key, value, to_version=EXPIRED_VERSION, from_version=ACTIVE_VERSION)

    def invalidate(self, key: str):
        value = self.get_active(key)
        if value is not missing:
            self.set_expired(key, value)

    def delete(self, key: str):
        self.cache.delete_many([key], version=ACTIVE_VERSION)
        self.cache.delete_many([key], version=EXPIRED_VERSION)
        self._index(self._keys() - {key})

    def clear(self):
        for key in list(self):
            self.delete(key)

    def __iter__(self):
        return iter(self._keys())

    def _move(self, key: str, value: CacheResult, to_version: int, from_version: int):
        self.cache.set(key, value, timeout=None, version=to_version)
        self.cache.delete(key, version=from_version)

    @property
    def _index_key(self) -> str:
        return f'{CACHE_KEY_PREFIX}:{self.func_name}'

    def _keys(self) -> Set[str]:
        return self.cache.get(self._index_key) or set()

    def _index(self, keys: Set[str]):
        self.cache.set(self._index_key, keys, timeout=None)


class FunctionCacheRegistry:

    def __init__(self):
        self.cached_functions: List[CachedFunction] = []

    def add(self, f: Callable, backend: str, depends_on: Sequence[str] = ()) -> CachedFunction:
        cached_function = self.get(get_func_name(f))
        if cached_function is None:
            cached_function = CachedFunction(f, backend, depends_on)
            self.cached_functions.append(cached_function)
        return cached_function

    def get(self, func_name: str) -> Optional[CachedFunction]:
        return next((c for c in self.cached_functions if c.func_name == func_name), None)

    def clear(self):
        for cached_function in self.cached_functions:
            cached_function.clear()

    def __iter__(self):
        return iter(self.cached_functions)


function_cache_registry = FunctionCacheRegistry()
