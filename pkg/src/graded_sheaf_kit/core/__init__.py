"""
Calculs sur les faisceaux gradués : sections, foncteurs, catégorie dérivée,
dualité et suites de lois.
"""

from .abelian import (
    ShortExactSequence,
    basic_exact_sequence,
    cokernel_sheaf,
    homology_sheaf,
    image_sheaf,
    is_exact_pair,
    kernel_sheaf,
)
from .adjunction import (
    AdjointPair,
    base_change_check,
    base_change_map,
    certify_adjunction,
    check_sheaf_adjunction,
    global_sections_remark_witness,
    inverse_tensor_check,
    sheaf_adjoint_pair,
)
from .derived import (
    DistinguishedTriangle,
    basic_triangle,
    cohomology,
    cohomology_table,
    cone,
    derived_base_change_check,
    derived_hom,
    derived_pushforward,
    derived_shriek_pushforward,
    derived_tensor,
    flabby_resolution,
    flat_resolution,
    godement_resolution,
    hom_D,
    projection_formula_check,
    quasi_isomorphic,
    resolution_certificate,
)
from .duality import (
    DualityConfig,
    DualizingComplex,
    biduality_check,
    cohomological_dimension,
    duality_identities_check,
    dualizing_complex,
    dualizing_is_invertible,
    global_cohomology,
    injectivity_check,
    represent_functor,
    soft_flat_resolution_of_R,
    upper_shriek,
    upper_shriek_adjunction_check,
    verdier_dual,
)
from .flabby import is_flabby, is_soft, pushforward_exactness_check, ungraded_gluing_holds
from .functors import (
    direct_sum_sheaf,
    extend_by_zero,
    hom_space,
    inverse_image_gr,
    pushforward_gr,
    sheaf_hom,
    shift_sheaf,
    shriek_pushforward_gr,
    tensor_sheaf,
)
from .generators import InstanceGenerator
from .reports import Certificate, compare_tables, invariant_table, summarize
from .ringed_ops import check_module_adjunction, hom_over_R, module_pullback, module_pushforward, tensor_over_R
from .sections import degree_piece, global_sections, sections, stalk
from .suites import SUITES, SuiteResult, SuiteRunner

__all__ = [
    "ShortExactSequence",
    "basic_exact_sequence",
    "cokernel_sheaf",
    "homology_sheaf",
    "image_sheaf",
    "is_exact_pair",
    "kernel_sheaf",
    "AdjointPair",
    "base_change_check",
    "base_change_map",
    "certify_adjunction",
    "check_sheaf_adjunction",
    "global_sections_remark_witness",
    "inverse_tensor_check",
    "sheaf_adjoint_pair",
    "DistinguishedTriangle",
    "basic_triangle",
    "cohomology",
    "cohomology_table",
    "cone",
    "derived_base_change_check",
    "derived_hom",
    "derived_pushforward",
    "derived_shriek_pushforward",
    "derived_tensor",
    "flabby_resolution",
    "flat_resolution",
    "godement_resolution",
    "hom_D",
    "projection_formula_check",
    "quasi_isomorphic",
    "resolution_certificate",
    "DualityConfig",
    "DualizingComplex",
    "biduality_check",
    "cohomological_dimension",
    "duality_identities_check",
    "dualizing_complex",
    "dualizing_is_invertible",
    "global_cohomology",
    "injectivity_check",
    "represent_functor",
    "soft_flat_resolution_of_R",
    "upper_shriek",
    "upper_shriek_adjunction_check",
    "verdier_dual",
    "is_flabby",
    "is_soft",
    "pushforward_exactness_check",
    "ungraded_gluing_holds",
    "direct_sum_sheaf",
    "extend_by_zero",
    "hom_space",
    "inverse_image_gr",
    "pushforward_gr",
    "sheaf_hom",
    "shift_sheaf",
    "shriek_pushforward_gr",
    "tensor_sheaf",
    "InstanceGenerator",
    "Certificate",
    "compare_tables",
    "invariant_table",
    "summarize",
    "check_module_adjunction",
    "hom_over_R",
    "module_pullback",
    "module_pushforward",
    "tensor_over_R",
    "degree_piece",
    "global_sections",
    "sections",
    "stalk",
    "SUITES",
    "SuiteResult",
    "SuiteRunner",
]
