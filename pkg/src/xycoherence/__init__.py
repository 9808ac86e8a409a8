"""Skew-information coherence and local quantum uncertainty in the anisotropic XY chain."""

__version__ = "0.1.0"
