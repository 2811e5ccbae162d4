"""
Django settings for the onebitcov project.

The project has no web surface: Django is used for its settings layer,
management commands and test runner. Numerical defaults are read from the
environment (or a .env file) so experiment runs can be reproduced from a
recorded environment.

For the full list of Django settings and their values, see
https://docs.djangoproject.com/en/5.1/ref/settings/
"""

import os
from pathlib import Path
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = os.getenv("SECRET_KEY", "onebitcov-not-a-secret")

DEBUG = os.getenv("DEBUG", "False") == "True"

# Application definition
INSTALLED_APPS = [
    "core",
]

# No database is needed; management commands and SimpleTestCase run without one.
DATABASES = {}

USE_TZ = True
TIME_ZONE = "UTC"

# Numerical defaults
ONEBIT_NQ = int(os.getenv("ONEBIT_NQ", "13"))
ONEBIT_NM = int(os.getenv("ONEBIT_NM", "2000"))
ONEBIT_SEED = int(os.getenv("ONEBIT_SEED", "0"))
ONEBIT_FEASIBILITY_EPS = float(os.getenv("ONEBIT_FEASIBILITY_EPS", "1e-6"))
ONEBIT_MAX_WORKERS = int(os.getenv("ONEBIT_MAX_WORKERS", "1"))
ONEBIT_OUTPUT_DIR = os.getenv("ONEBIT_OUTPUT_DIR", str(BASE_DIR / "results"))

# Logging
ONEBIT_LOG_LEVEL = os.getenv("ONEBIT_LOG_LEVEL", "INFO")

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "simple": {
            "format": "{asctime} {levelname} {name}: {message}",
            "style": "{",
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "simple",
        },
    },
    "loggers": {
        "core": {
            "handlers": ["console"],
            "level": ONEBIT_LOG_LEVEL,
            "propagate": False,
        },
    },
}
