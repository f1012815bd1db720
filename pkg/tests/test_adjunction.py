"""
Tests de l'adjonction f⁻¹ ⊣ f_*, du changement de base et de la compatibilité
de f⁻¹ au produit tensoriel.
"""

import pytest

from src.graded_sheaf_kit.algebra.graded import GradedModule
from src.graded_sheaf_kit.algebra.grading import GradingGroup
from src.graded_sheaf_kit.algebra.modules import Module
from src.graded_sheaf_kit.core.adjunction import (
    adjunction_counit,
    adjunction_unit,
    base_change_check,
    base_change_map,
    certify_adjunction,
    certify_base_change,
    check_sheaf_adjunction,
    global_sections_remark_witness,
    inverse_tensor_check,
    sheaf_adjoint_pair,
)
from src.graded_sheaf_kit.core.suites import corrupt_map
from src.graded_sheaf_kit.domain.sheaf import GradedSheaf
from src.graded_sheaf_kit.domain.space import GradedSpace, GradedSpaceMap, fiber_product
from src.graded_sheaf_kit.errors import LawViolation


@pytest.fixture(scope="module")
def two_degree_point(f2):
    """Point x avec Λ = Z/2 et F = k en degrés 0 et 1."""
    space = GradedSpace.point("X", GradingGroup.cyclic(2), "x")
    k = Module.free(f2, 1)
    stalk = GradedModule(GradingGroup.cyclic(2), f2, {(0,): k, (1,): k})
    return GradedSheaf("F", space, f2, {"x": stalk})


@pytest.mark.unit
class TestSheafAdjunction:
    """Tests de f⁻¹ ⊣ f_*."""

    def test_open_inclusion(self, line3):
        certificate = check_sheaf_adjunction(line3.maps["j"], line3.sheaves["F"], line3.sheaves["k"])
        assert certificate.passed, certificate.details
        assert certificate.law == "sheaf-adjunction"

    def test_projection_to_point(self, line3, f2):
        k_pt = GradedSheaf.constant(line3.spaces["PT"], f2)
        for sheaf in (line3.sheaves["k"], line3.sheaves["sky"]):
            certificate = check_sheaf_adjunction(line3.maps["p"], sheaf, k_pt)
            assert certificate.passed, certificate.details

    def test_unit_and_counit_are_natural(self, line3):
        j = line3.maps["j"]
        assert adjunction_unit(j, line3.sheaves["k"]).diagnostics() == []
        assert adjunction_counit(j, line3.sheaves["F"]).diagnostics() == []

    def test_counit_of_open_inclusion_is_iso(self, line3):
        """j⁻¹ j_* F → F est un isomorphisme pour une inclusion ouverte."""
        assert adjunction_counit(line3.maps["j"], line3.sheaves["F"]).is_isomorphism()

    def test_corrupted_unit_fails(self, line3):
        j, k = line3.maps["j"], line3.sheaves["k"]
        pair = sheaf_adjoint_pair(j)
        altered = corrupt_map(pair.unit(k), points=["u-"], zero_degree_only=True)
        assert altered is not None
        certificate = certify_adjunction(pair, k, line3.sheaves["F"], unit=altered)
        assert not certificate.passed
        with pytest.raises(LawViolation):
            certificate.require()


@pytest.mark.unit
class TestGlobalSections:
    """Γ(Y, f_*F) ne voit que les degrés images de f♭."""

    def test_totals_differ(self, two_degree_point):
        p = GradedSpaceMap.to_point(two_degree_point.space)
        witness = global_sections_remark_witness(p, two_degree_point)
        assert witness.certificate.passed
        assert witness.totals_differ
        assert witness.pushed.part(()).invariants.rank == 1
        assert sum(m.invariants.rank for m in witness.direct.parts.values()) == 2

    def test_totals_agree_for_trivial_grading(self, pseudo_circle):
        witness = global_sections_remark_witness(pseudo_circle.maps["p"], pseudo_circle.sheaves["k"])
        assert witness.certificate.passed
        assert not witness.totals_differ


@pytest.mark.unit
class TestBaseChange:
    """Tests du changement de base g⁻¹ f_! ≅ f̃_! g̃⁻¹."""

    def test_points_over_point(self, sierpinski):
        p = sierpinski.maps["p"]
        square = fiber_product(p, p)
        certificate = base_change_check(square, sierpinski.sheaves["k"])
        assert certificate.passed, certificate.details

    def test_open_inclusion_squared(self, line3):
        j = line3.maps["j"]
        square = fiber_product(j, j)
        assert base_change_check(square, line3.sheaves["F"]).passed

    def test_projection_against_inclusion(self, line3):
        """LINE3 → PT tiré en arrière le long de PT → PT."""
        p = line3.maps["p"]
        identity = GradedSpaceMap.identity(p.target)
        square = fiber_product(p, identity)
        for sheaf in (line3.sheaves["k"], line3.sheaves["sky"]):
            assert base_change_check(square, sheaf).passed

    def test_corrupted_map_fails(self, sierpinski):
        p = sierpinski.maps["p"]
        square = fiber_product(p, p)
        phi = corrupt_map(base_change_map(square, sierpinski.sheaves["k"]))
        assert phi is not None
        assert not certify_base_change(phi).passed


@pytest.mark.unit
class TestInverseTensor:
    """f⁻¹F ⊗ f⁻¹G ≅ f⁻¹(F ⊗ G)."""

    def test_open_inclusion(self, line3):
        certificate = inverse_tensor_check(line3.maps["j"], line3.sheaves["k"], line3.sheaves["sky"])
        assert certificate.passed, certificate.details

    def test_graded_point(self, two_degree_point, f2):
        """Λ = Z/2 : les degrés se somment dans Λ_x."""
        target = GradedSpace.point("Y", label="y")
        q = GradedSpaceMap.to_point(two_degree_point.space, target, "q")
        k_y = GradedSheaf.constant(target, f2)
        assert inverse_tensor_check(q, k_y, k_y).passed
        identity = GradedSpaceMap.identity(two_degree_point.space)
        assert inverse_tensor_check(identity, two_degree_point, two_degree_point).passed
