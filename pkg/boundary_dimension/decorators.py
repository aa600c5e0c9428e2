from functools import wraps
from typing import Optional, Sequence

from boundary_dimension.brokers import Broker, default_broker
from boundary_dimension.cache.registry import function_cache_registry
from boundary_dimension.cache.update import DefaultUpdateHandler
from boundary_dimension.settings import settings


def cache_function(timeout: Optional[int] = None, backend: Optional[str] = None, broker: Broker = default_broker,
                   depends_on: Sequence[str] = ()):
    """Memoize a pure computation in the Django cache.

    ``timeout`` falls back to ``BD_CACHE_TIMEOUT`` and ``backend`` to ``BD_CACHE_BACKEND``.
    ``depends_on`` names the ``BD_`` settings (without prefix) the result depends on; their
    current values are part of every key.
    """

    def decorator(f):

        f.cache = function_cache_registry.add(f, backend or settings.CACHE_BACKEND, depends_on)
        update_handler = DefaultUpdateHandler(f.cache, timeout, broker)

        @wraps(f)
        def wrapped_func(*args, **kwargs):
            return update_handler.get_result(f.cache.make_key((args, kwargs)), *args, **kwargs)

        return wrapped_func

    return decorator
