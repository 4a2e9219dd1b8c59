"""Weighted and virtual Bergman kernels of bounded symmetric domains."""
from .core import BACKEND
from .domains import (
    DomainPoint,
    Invariants,
    TypeI,
    TypeII,
    TypeIII,
    TypeIV,
    TypeV,
    TypeVI,
    contains,
    generic_norm,
    invariants,
    parse_domain,
    sample_uniform,
)
from .polyalg import FactorizedPoly, RationalPolynomial, rising_factorial

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "DomainPoint",
    "FactorizedPoly",
    "Invariants",
    "RationalPolynomial",
    "TypeI",
    "TypeII",
    "TypeIII",
    "TypeIV",
    "TypeV",
    "TypeVI",
    "contains",
    "generic_norm",
    "invariants",
    "parse_domain",
    "rising_factorial",
    "sample_uniform",
]
