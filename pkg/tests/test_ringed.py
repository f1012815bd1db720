"""
Tests des espaces annelés gradués et des faisceaux de modules.
"""

import numpy as np
import pytest

from src.graded_sheaf_kit.algebra.graded import GradedMap
from src.graded_sheaf_kit.core.reports import invariant_table, tables_equal
from src.graded_sheaf_kit.core.ringed_ops import (
    action_degree_bookkeeping_check,
    check_module_adjunction,
    hom_over_R,
    module_inverse_tensor_check,
    module_pullback,
    module_pullback_map,
    module_pushforward,
    tensor_over_R,
)
from src.graded_sheaf_kit.domain.ringed import RingedGradedSpace, RingedMap, RModuleSheaf
from src.graded_sheaf_kit.domain.sheaf import GradedSheaf, SheafMap
from src.graded_sheaf_kit.domain.space import GradedSpace, GradedSpaceMap


@pytest.fixture(scope="module")
def dual_numbers(line3_ringed):
    """A, RA et le faisceau R sous-jacent."""
    return line3_ringed.ringed["A"], line3_ringed.modules["RA"]


@pytest.fixture(scope="module")
def ringed_point(f2):
    return RingedGradedSpace.constant(GradedSpace.point(), f2)


@pytest.fixture(scope="module")
def to_point(dual_numbers, ringed_point):
    """p : (LINE3, A) → (PT, k), f♯ = unité de A."""
    ringed, _ = dual_numbers
    p = GradedSpaceMap.to_point(ringed.space, ringed_point.space)
    sharps = {"c": np.array([[1], [0]], dtype=object), "u-": np.array([[1]]), "u+": np.array([[1]])}
    return RingedMap("p", ringed, ringed_point, p, sharps)


@pytest.mark.unit
class TestRingedSpace:
    """Tests de RingedGradedSpace."""

    def test_fixture_is_clean(self, line3_ringed, dual_numbers):
        ringed, module = dual_numbers
        assert line3_ringed.is_clean
        assert ringed.diagnostics() == []
        assert module.diagnostics() == []

    def test_ring_at_closed_point(self, dual_numbers):
        ringed, _ = dual_numbers
        ring = ringed.ring_at("c")
        assert ring.dimension == 2
        assert list(ring.basis_degrees) == [(0,), (1,)]
        assert not ringed.is_constant()

    def test_structure_sheaf(self, dual_numbers):
        ringed, module = dual_numbers
        structure = ringed.structure_sheaf()
        assert structure.diagnostics() == []
        assert tables_equal(invariant_table(structure), invariant_table(module.sheaf))

    def test_ring_restriction_kills_t(self, dual_numbers):
        ringed, _ = dual_numbers
        matrix = ringed.ring_restriction("c", "u-")
        assert ringed.base_ring.matrices_equal(matrix, np.array([[1, 0]], dtype=object))

    def test_constant(self, line3, f2):
        constant = RingedGradedSpace.constant(line3.spaces["LINE3"], f2)
        assert constant.is_constant()
        assert constant.diagnostics() == []


@pytest.mark.unit
class TestModules:
    """Tests de RModuleSheaf."""

    def test_free_module(self, dual_numbers):
        ringed, _ = dual_numbers
        free = RModuleSheaf.free(ringed)
        assert free.diagnostics() == []
        assert len(free.actions["c"]) == 2

    def test_over_constant(self, line3):
        module = RModuleSheaf.over_constant(line3.sheaves["k"])
        assert module.diagnostics() == []
        assert module.action("c", 0).equals(GradedMap.identity(line3.sheaves["k"].stalk("c")))

    def test_over_constant_rejects_other_rings(self, dual_numbers):
        ringed, module = dual_numbers
        with pytest.raises(ValueError):
            RModuleSheaf.over_constant(module.sheaf, ringed)

    def test_missing_action(self, dual_numbers):
        """t n'a pas d'action par défaut en c."""
        ringed, module = dual_numbers
        with pytest.raises(ValueError):
            RModuleSheaf(ringed, module.sheaf, {})

    def test_unit_violation(self, dual_numbers):
        ringed, module = dual_numbers
        stalk = module.sheaf.stalk("c")
        broken = RModuleSheaf(
            ringed,
            module.sheaf,
            {"c": (GradedMap.zero(stalk, stalk, None, (0,)), module.action("c", 1))},
        )
        codes = {d.code for d in broken.diagnostics()}
        assert "ACTION_UNIT" in codes

    def test_t_squared_is_zero(self, dual_numbers):
        _, module = dual_numbers
        t = module.action("c", 1)
        assert t.compose(t).is_zero()


@pytest.mark.unit
class TestRingedMaps:
    """Tests de RingedMap."""

    def test_identity(self, dual_numbers):
        ringed, _ = dual_numbers
        identity = RingedMap.identity(ringed)
        assert identity.diagnostics() == []
        assert identity.is_strict()

    def test_to_point(self, to_point):
        assert to_point.diagnostics() == []
        assert not to_point.is_strict()

    def test_sharp_must_be_ring_map(self, dual_numbers, ringed_point):
        """f♯ qui envoie 1 sur t n'est pas un morphisme d'anneaux."""
        ringed, _ = dual_numbers
        p = GradedSpaceMap.to_point(ringed.space, ringed_point.space)
        sharps = {"c": np.array([[0], [1]], dtype=object), "u-": np.array([[1]]), "u+": np.array([[1]])}
        codes = {d.code for d in RingedMap("q", ringed, ringed_point, p, sharps).diagnostics()}
        assert "SHARP_NOT_RING_MAP" in codes

    def test_constant(self, line3, f2):
        f = RingedMap.constant(line3.maps["j"], f2)
        assert f.diagnostics() == []
        assert f.compose_after(RingedMap.identity(f.source)).diagnostics() == []


@pytest.mark.integration
class TestModuleOperations:
    """Tests de ⊗_R, Hom_R, f_*, f^* et de l'adjonction f^* ⊣ f_*."""

    def test_tensor_with_ring(self, dual_numbers):
        """R ⊗_R R ≅ R."""
        _, module = dual_numbers
        product = tensor_over_R(module, module)
        assert product.diagnostics() == []
        assert tables_equal(invariant_table(product.sheaf), invariant_table(module.sheaf))

    def test_hom_from_ring(self, dual_numbers):
        """Hom_R(R, R) ≅ R."""
        _, module = dual_numbers
        hom = hom_over_R(module, module)
        assert hom.diagnostics() == []
        assert tables_equal(invariant_table(hom.sheaf), invariant_table(module.sheaf))

    def test_pushforward_along_identity(self, dual_numbers):
        ringed, module = dual_numbers
        pushed = module_pushforward(RingedMap.identity(ringed), module)
        assert pushed.diagnostics() == []
        assert tables_equal(invariant_table(pushed.sheaf), invariant_table(module.sheaf))

    def test_pullback_of_constant(self, to_point, ringed_point, dual_numbers, f2):
        """p^* k = A."""
        _, module = dual_numbers
        k = RModuleSheaf.over_constant(GradedSheaf.constant(ringed_point.space, f2), ringed_point)
        pulled = module_pullback(to_point, k)
        assert pulled.diagnostics() == []
        assert tables_equal(invariant_table(pulled.sheaf), invariant_table(module.sheaf))

    def test_adjunction_over_constant_rings(self, line3, f2):
        f = RingedMap.constant(line3.maps["j"], f2)
        first = RModuleSheaf.over_constant(line3.sheaves["F"], f.source)
        second = RModuleSheaf.over_constant(line3.sheaves["k"], f.target)
        certificate = check_module_adjunction(f, first, second)
        assert certificate.passed, certificate.details

    def test_adjunction_to_point(self, to_point, ringed_point, dual_numbers, f2):
        _, module = dual_numbers
        k = RModuleSheaf.over_constant(GradedSheaf.constant(ringed_point.space, f2), ringed_point)
        certificate = check_module_adjunction(to_point, module, k)
        assert certificate.passed, certificate.details

    def test_action_degrees(self, to_point, dual_numbers):
        ringed, module = dual_numbers
        for f in (RingedMap.identity(ringed), to_point):
            certificate = action_degree_bookkeeping_check(f, module)
            assert certificate.passed, certificate.details

    def test_inverse_image_of_relative_tensor(self, dual_numbers):
        ringed, module = dual_numbers
        j = GradedSpaceMap.inclusion(ringed.space, ["u-", "u+"], "j")
        certificate = module_inverse_tensor_check(j, module, module)
        assert certificate.passed, certificate.details

    def test_pullback_along_constant_map(self, sierpinski, f2):
        """p^* k = k sur S2 pour des anneaux constants."""
        p = RingedMap.constant(sierpinski.maps["p"], f2)
        k_pt = RModuleSheaf.over_constant(GradedSheaf.constant(p.target.space, f2), p.target)
        pulled = module_pullback(p, k_pt)
        assert pulled.diagnostics() == []
        assert tables_equal(invariant_table(pulled.sheaf), invariant_table(sierpinski.sheaves["k"]))
        assert module_pullback_map(p, SheafMap.identity(k_pt.sheaf), k_pt, k_pt).is_isomorphism()
