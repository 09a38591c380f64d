"""Reproducible experiment runner behind the ``lab`` command."""
