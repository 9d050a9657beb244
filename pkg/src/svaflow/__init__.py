"""Assertion generation, checking and comparison tooling for hardware designs."""

__version__ = "0.1.0"
