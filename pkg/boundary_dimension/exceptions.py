from typing import Optional, Tuple


class BoundaryDimensionError(Exception):
    pass


class PartitionValidationError(BoundaryDimensionError):
    pass


class NonSummableError(PartitionValidationError):
    pass


class UnknownGeneratorError(BoundaryDimensionError):

    def __init__(self, name: str, available: Tuple[str, ...] = ()):
        self.name = name
        self.available = available
        choices = ', '.join(available) or 'none registered'
        super().__init__(f'Unknown generator {name!r} (available: {choices})')


class PerturbationError(BoundaryDimensionError):
    pass


class PreconditionError(BoundaryDimensionError):
    pass


class GeometryError(BoundaryDimensionError):
    pass


class SaturationError(BoundaryDimensionError):
    pass


class EnumerationCapError(BoundaryDimensionError):
    """Raised when a word or lattice enumeration would exceed its configured cap.

    ``suggestion`` holds parameters that fit under the cap, e.g. ``{'order': 6, 'alphabet': 16}``
    or ``{'t_max': 21.3}``.
    """

    def __init__(self, message: str, required: int, cap: int, suggestion: Optional[dict] = None):
        self.required = required
        self.cap = cap
        self.suggestion = suggestion or {}
        super().__init__(message)


class RefinementCapError(EnumerationCapError):
    pass


class ConfigError(BoundaryDimensionError):

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None,
                 key: Optional[str] = None):
        self.path = path
        self.line = line
        self.key = key
        location = ':'.join(str(part) for part in (path, line) if part is not None)
        prefix = f'{location}: ' if location else ''
        suffix = f' [{key}]' if key else ''
        super().__init__(f'{prefix}{message}{suffix}')
