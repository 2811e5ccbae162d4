"""
pytest entry point: configure Django before the test modules import it.
"""

import os

import django


def pytest_configure():
    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "onebitcov.settings")
    django.setup()
