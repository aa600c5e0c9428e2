from importlib import import_module

from django.apps import AppConfig
from django.utils.module_loading import autodiscover_modules

from boundary_dimension.settings import settings


class BoundaryDimensionConfig(AppConfig):
    name = 'boundary_dimension'
    verbose_name = 'Boundary dimension'

    def ready(self):
        autodiscover_modules('partition_generators')
        for module_path in settings.GENERATOR_MODULES:
            import_module(module_path)
