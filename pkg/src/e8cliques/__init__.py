"""Exact computations on the E8 root system, its colored graph and Weyl group."""

__version__ = "0.1.0"
