"""Bundled default configuration data."""
