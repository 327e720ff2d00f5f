"""Tests for the phcsim package."""
