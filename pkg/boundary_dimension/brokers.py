"""Brokers recompute expired cache entries.

``SyncBroker`` recomputes in the calling process. ``AsyncBroker`` queues the same recomputation on
an RQ worker through django-rq, so the caller gets the expired result back straight away.
"""
import datetime
import logging
from typing import Callable, Optional, Protocol, Union

from django.core.cache import DEFAULT_CACHE_ALIAS
from django.utils.module_loading import import_string
from django.utils.timezone import now
from django_rq import enqueue

from boundary_dimension.cache.cache import CacheResult, CallingArgs
from boundary_dimension.settings import settings
from boundary_dimension.utils import get_func_name


logger = logging.getLogger(__name__)


default_broker = object()


class Broker(Protocol):

    def __call__(self, f: Union[Callable, str], timeout: int, calling_args: Optional[CallingArgs] = None,
                 backend: Optional[str] = DEFAULT_CACHE_ALIAS):
        ...


def refresh(f: Union[Callable, str], timeout: int, calling_args: Optional[CallingArgs] = None) -> CacheResult:
    """Recompute ``f`` for ``calling_args`` and store the result as the active entry."""
    f = import_string(f) if isinstance(f, str) else f
    f = getattr(f, '__wrapped__', None) or f
    args, kwargs = calling_args or ((), {})
    result = CacheResult(
        result=f(*args, **kwargs),
        expires=now() + datetime.timedelta(seconds=timeout),
        calling_args=calling_args,
    )
    cache_key = f.cache.make_key(calling_args)
    f.cache.set_active(cache_key, result)
    logger.info(f'Refreshed {cache_key}')
    return result


class SyncBroker:

    def __call__(self, f: Union[Callable, str], timeout: int, calling_args: Optional[CallingArgs] = None,
                 backend: Optional[str] = DEFAULT_CACHE_ALIAS):
        refresh(f, timeout, calling_args)


sync_broker = SyncBroker()


class AsyncBroker:
    """Queues the refresh on the default RQ queue; the job names the function by its dotted path."""

    def __call__(self, f: Union[Callable, str], timeout: int, calling_args: Optional[CallingArgs] = None,
                 backend: Optional[str] = DEFAULT_CACHE_ALIAS):
        func_name = f if isinstance(f, str) else get_func_name(f)
        enqueue(sync_broker, func_name, timeout, calling_args, backend)
        logger.info(f'Queued a refresh of {func_name}')


async_broker = AsyncBroker()


def get_broker(broker: Broker = default_broker) -> Broker:
    """The given broker, or ``BD_DEFAULT_BROKER``: a dotted path to a broker class or instance."""
    if broker is not default_broker:
        return broker
    try:
        configured = import_string(settings.DEFAULT_BROKER)
    except ImportError:
        logger.warning(f'Cannot import broker {settings.DEFAULT_BROKER!r}, recomputing synchronously')
        return sync_broker
    return configured() if isinstance(configured, type) else configured
