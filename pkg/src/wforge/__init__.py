"""Polynomial minimal surfaces: exact Weierstrass data, degree-5 families,
minimality checks, canonical principal charts and mesh export."""

from .algebra import BivariatePoly, ComplexPoly, ExactComplex, RationalFunction
from .families import FamilyDescriptor, classify, make_family
from .weierstrass import NumericPair, PolySurface, SurfacePolynomial, WeierstrassPair, surface_from_pair, validate_pair

__version__ = "0.1.0"

__all__ = [
    "BivariatePoly",
    "ComplexPoly",
    "ExactComplex",
    "FamilyDescriptor",
    "NumericPair",
    "PolySurface",
    "RationalFunction",
    "SurfacePolynomial",
    "WeierstrassPair",
    "classify",
    "make_family",
    "surface_from_pair",
    "validate_pair",
]
