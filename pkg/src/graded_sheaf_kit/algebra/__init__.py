"""
Algèbre exacte pour le moteur de faisceaux gradués.
"""

from .base_ring import BaseRing, RingKind, QQ, ZZ
from .grading import Degree, DegreeWindow, GradingGroup, GroupHom, format_degree
from .graded import (
    GradedMap,
    GradedModule,
    direct_sum_graded,
    graded_hom,
    graded_hom_spaces,
    graded_tensor,
    graded_tensor_map,
    shift_module,
)
from .layout import LayoutKind, PartLayout, assemble, gather, transport
from .linear_system import HomSpace, LinearSystem, UnknownBlock
from .modules import (
    Homology,
    Module,
    ModuleInvariants,
    ModuleMap,
    Simplification,
    direct_sum,
    direct_sum_map,
    hom_module,
    homology,
    is_exact,
    power,
    tensor_maps,
    tensor_product,
)
from .rings import GradedRingData, is_ring_homomorphism
from .smith import SmithNormalForm, smith_normal_form

__all__ = [
    "BaseRing",
    "RingKind",
    "QQ",
    "ZZ",
    "Degree",
    "DegreeWindow",
    "GradingGroup",
    "GroupHom",
    "format_degree",
    "GradedMap",
    "GradedModule",
    "direct_sum_graded",
    "graded_hom",
    "graded_hom_spaces",
    "graded_tensor",
    "graded_tensor_map",
    "shift_module",
    "LayoutKind",
    "PartLayout",
    "assemble",
    "gather",
    "transport",
    "HomSpace",
    "LinearSystem",
    "UnknownBlock",
    "Homology",
    "Module",
    "ModuleInvariants",
    "ModuleMap",
    "Simplification",
    "direct_sum",
    "direct_sum_map",
    "hom_module",
    "homology",
    "is_exact",
    "power",
    "tensor_maps",
    "tensor_product",
    "GradedRingData",
    "is_ring_homomorphism",
    "SmithNormalForm",
    "smith_normal_form",
]
