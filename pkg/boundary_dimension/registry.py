import logging
from typing import Callable, Dict, Iterator, Optional, Tuple

from boundary_dimension.exceptions import UnknownGeneratorError


logger = logging.getLogger(__name__)


class GeneratorRegistry:
    """Named partition generators.

    A generator is a callable ``(truncation, **params) -> IntervalPartition``. Apps contribute
    generators from a ``partition_generators`` module, found at startup by the app config.
    """

    generators: Dict[str, Callable]

    def __init__(self):
        self.generators = {}

    def register(self, name: str, generator: Optional[Callable] = None):

        def decorator(f):
            if name in self.generators and self.generators[name] is not f:
                logger.warning(f'Generator {name} is registered twice, keeping {f.__qualname__}')
            self.generators[name] = f
            return f

        return decorator(generator) if generator is not None else decorator

    def unregister(self, name: str):
        self.generators.pop(name, None)

    def get(self, name: str) -> Callable:
        try:
            return self.generators[name]
        except KeyError:
            raise UnknownGeneratorError(name, self.names()) from None

    def names(self) -> Tuple[str, ...]:
        return tuple(sorted(self.generators))

    def __contains__(self, name: str) -> bool:
        return name in self.generators

    def __iter__(self) -> Iterator[str]:
        return iter(self.names())


generator_registry = GeneratorRegistry()


def register_generator(name: str):
    return generator_registry.register(name)
