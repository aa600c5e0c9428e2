import datetime
import logging
import time
from typing import Any, Optional

from django.utils.timezone import now

from boundary_dimension.brokers import Broker, default_broker, get_broker
from boundary_dimension.cache.cache import CacheResult, missing
from boundary_dimension.cache.registry import CachedFunction
from boundary_dimension.settings import settings


logger = logging.getLogger(__name__)


class DefaultUpdateHandler:
    """Serves cached results; an expired result is served once while the broker recomputes it."""

    def __init__(self, cached_function: CachedFunction, timeout: Optional[int] = None,
                 broker: Optional[Broker] = None):
        self.cached_function = cached_function
        self._timeout = timeout
        self.broker = broker

    @property
    def timeout(self) -> int:
        return settings.CACHE_TIMEOUT if self._timeout is None else self._timeout

    def get_result(self, key: str, *args, **kwargs) -> Any:
        active = self.cached_function.get_active(key, missing)
        if active is not missing:
            if active.has_expired:
                logger.info(f'Cached result for {key} has expired')
                self.cached_function.set_expired(key, active)
            else:
                logger.debug(f'Cache hit for {key}')
            return active.result

        expired = self.cached_function.get_expired(key, missing)
        if expired is not missing:
            logger.info(f'Serving expired result for {key} while it is recomputed')
            broker = get_broker(self.broker or default_broker)
            broker(self.cached_function.f, self.timeout, (args, kwargs), self.cached_function.backend)
            return expired.result

        result = self.compute(key, *args, **kwargs)
        self.cached_function.set_active(key, CacheResult(
            result=result,
            expires=now() + datetime.timedelta(seconds=self.timeout),
            calling_args=(args, kwargs),
        ))
        return result

    def compute(self, key: str, *args, **kwargs) -> Any:
        started = time.perf_counter()
        result = self.cached_function.f(*args, **kwargs)
        logger.info(f'Computed {key} in {time.perf_counter() - started:.3f}s')
        return result
