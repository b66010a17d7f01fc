"""Sequence I/O, synthetic scenes and benchmark running."""
