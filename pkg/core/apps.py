"""
Application configuration for the core app.
"""

from django.apps import AppConfig


class CoreConfig(AppConfig):
    """One-bit covariance recovery: numerical modules and experiment commands."""

    name = "core"
    verbose_name = "One-bit covariance recovery"
