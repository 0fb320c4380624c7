"""Roots of Hilbert class polynomials modulo large primes by class-field decomposition."""

__version__ = "0.1.0"
