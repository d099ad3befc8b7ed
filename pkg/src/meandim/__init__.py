"""Numerical toolkit for covering growth, finite tilings, and rate-distortion
analysis of finite-alphabet shift systems over Z and Z^d."""

__version__ = "0.1.0"
