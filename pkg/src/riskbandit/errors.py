"""Exceptions shared across modules."""


class ConfigError(ValueError):
    """A configuration value violates its documented constraints."""
