"""Exact construction and verification of multiple q-Kravchuk and Kravchuk polynomials."""

from .analysis import isolate_roots, limit_scan
from .qlattice import GridFunction, Poly, QContext
from .rodrigues import rodrigues_classical, rodrigues_q
from .solver import MultiIndex, NormalityError, solve_type2_classical, solve_type2_q
from .weights import ClassicalParams, KravchukParams, validate

__all__ = [
    "ClassicalParams",
    "GridFunction",
    "KravchukParams",
    "MultiIndex",
    "NormalityError",
    "Poly",
    "QContext",
    "isolate_roots",
    "limit_scan",
    "rodrigues_classical",
    "rodrigues_q",
    "solve_type2_classical",
    "solve_type2_q",
    "validate",
]
__version__ = "0.1.0"
