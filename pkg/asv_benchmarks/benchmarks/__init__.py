"""Timing benchmarks of the phcsim assembly and eigenvalue search."""
