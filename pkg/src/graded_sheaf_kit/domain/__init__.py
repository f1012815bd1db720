"""
Objets du domaine : espaces finis gradués, faisceaux, structures annelées et complexes.

Toutes les valeurs sont immuables après construction.
"""

from .complexes import ChainMap, ComplexOfSheaves, Resolution, ResolutionKind
from .diagnostics import Diagnostic, Severity, format_diagnostics, has_errors
from .poset import Chain, FinitePoset, Point, order_diagnostics
from .ringed import RingedGradedSpace, RingedMap, RModuleSheaf, multiplication_map
from .sheaf import GradedPresheafTable, GradedSheaf, SheafMap
from .space import (
    CartesianSquare,
    GradedSpace,
    GradedSpaceMap,
    OpenGrading,
    fiber_product,
    is_proper_on,
    largest_proper_closed,
    sections_of_lambda,
    validate_space,
)

__all__ = [
    "ChainMap",
    "ComplexOfSheaves",
    "Resolution",
    "ResolutionKind",
    "Diagnostic",
    "Severity",
    "format_diagnostics",
    "has_errors",
    "Chain",
    "FinitePoset",
    "Point",
    "order_diagnostics",
    "RingedGradedSpace",
    "RingedMap",
    "RModuleSheaf",
    "multiplication_map",
    "GradedPresheafTable",
    "GradedSheaf",
    "SheafMap",
    "CartesianSquare",
    "GradedSpace",
    "GradedSpaceMap",
    "OpenGrading",
    "fiber_product",
    "is_proper_on",
    "largest_proper_closed",
    "sections_of_lambda",
    "validate_space",
]
