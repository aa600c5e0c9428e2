import os

BASE_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

INSTALLED_APPS = [
    "django_rq",
    "boundary_dimension.apps.BoundaryDimensionConfig",
    "testapp"
]

SECRET_KEY = 'asdf'

TIME_ZONE = 'Europe/Amsterdam'
USE_TZ = True

DEBUG = True

CACHES = {
    "default": {
        "BACKEND": "django.core.cache.backends.locmem.LocMemCache",
        "LOCATION": "testapp_cache",
    },
    "dummy": {
        "BACKEND": "django.core.cache.backends.dummy.DummyCache"
    }
}


RQ_QUEUES = {
    "default": {
        "HOST": "127.0.0.1",
        "PORT": 6379,
        "DB": 0,
        "DEFAULT_TIMEOUT": 360,
    },
}


LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
        },
    },
    "root": {
        "handlers": ["console"],
        "level": "INFO",
    },
}

BD_GENERATOR_MODULES = ['testapp.lengths']

BD_CACHE_TIMEOUT = 300
