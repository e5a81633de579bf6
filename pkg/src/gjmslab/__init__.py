"""Local curvature invariants, GJMS operators and their Green-function log coefficients."""

__version__ = "0.1.0"
