from typing import List

from django.conf import settings as django_settings


default_settings = {
    "ENUMERATION_CAP": 2 ** 24,
    "MATERIALIZE_CAP": 2 ** 21,
    "REFINEMENT_CAP": 10 ** 6,
    "LATTICE_CAP": 5 * 10 ** 7,
    "CHUNK_SIZE": 65536,
    "LINE_DEDUP_TOL": 1e-15,
    "SPHERE_DEDUP_TOL": 1e-12,
    "TILING_TOL": 1e-12,
    "SATURATION_FRACTION": 0.9,
    "RATIO_TEST_MARGIN": 1e-4,
    "CLASSIFICATION_MARGIN": 1e-9,
    "ENFORCE_ZERO_ACCUMULATION": True,
    "CACHE_BACKEND": 'default',
    "CACHE_TIMEOUT": 300,
    "DEFAULT_BROKER": 'boundary_dimension.brokers.SyncBroker',
    "GENERATOR_MODULES": [],
}


class Settings:

    ENUMERATION_CAP: int

    MATERIALIZE_CAP: int

    REFINEMENT_CAP: int

    LATTICE_CAP: int

    CHUNK_SIZE: int

    LINE_DEDUP_TOL: float

    SPHERE_DEDUP_TOL: float

    TILING_TOL: float

    SATURATION_FRACTION: float

    RATIO_TEST_MARGIN: float

    CLASSIFICATION_MARGIN: float

    ENFORCE_ZERO_ACCUMULATION: bool

    CACHE_BACKEND: str

    CACHE_TIMEOUT: int

    DEFAULT_BROKER: str

    GENERATOR_MODULES: List[str]

    def __getattr__(self, item):
        if item not in default_settings:
            raise AttributeError(item)
        if not django_settings.configured:
            return default_settings[item]
        return getattr(django_settings, 'BD_' + item, default_settings[item])


settings = Settings()
