"""Pluriclosed Hermitian structures with parallel Bismut torsion on metric
Lie algebras."""

__version__ = "0.1.0"
