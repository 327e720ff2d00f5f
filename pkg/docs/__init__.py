"""Sphinx documentation of phcsim."""
