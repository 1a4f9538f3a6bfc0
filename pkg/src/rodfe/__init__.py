"""Geometrically exact Kirchhoff rod finite elements.

Mixed C0 elements on SO(3) x R^3 with geodesic rotation interpolation,
a sparse saddle-point Newton solver, and a benchmark/self-check harness.
"""

__version__ = "0.1.0"
