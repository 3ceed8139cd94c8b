"""Spacetime-algebra laboratory: Cl(1,3) kernel, spinor fields and verification suites."""

__version__ = "0.1.0"
