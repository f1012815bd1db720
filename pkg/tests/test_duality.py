"""
Tests de la couche de dualité : f^!, complexes dualisants et dualité de Verdier.

Ces calculs passent par des résolutions de Godement de chaque générateur :
ils sont marqués lents.
"""

import pytest

from src.graded_sheaf_kit.algebra.base_ring import BaseRing
from src.graded_sheaf_kit.core.derived import (
    cohomology_table,
    godement_resolution,
    quasi_isomorphic,
    resolution_certificate,
)
from src.graded_sheaf_kit.core.duality import (
    ContravariantFunctor,
    DualityConfig,
    HomFunctor,
    ZeroFunctor,
    biduality_check,
    dualizing_complex,
    dualizing_is_invertible,
    duality_identities_check,
    injectivity_check,
    remark_duality_crosscheck,
    represent_functor,
    representability_certificate,
    sheaf_duality_check,
    soft_flat_resolution_of_R,
    soft_sequence_check,
    upper_shriek,
    upper_shriek_adjunction_check,
    upper_shriek_composition_check,
    verdier_dual,
)
from src.graded_sheaf_kit.core.functors import extend_by_zero
from src.graded_sheaf_kit.core.reports import invariant_table, tables_equal
from src.graded_sheaf_kit.domain.sheaf import GradedSheaf, SheafMap
from src.graded_sheaf_kit.domain.space import GradedSpace, GradedSpaceMap
from src.graded_sheaf_kit.errors import GradedSheafError, InfiniteSupport, NonFieldBase, NotProperError


@pytest.fixture(scope="module")
def k_point(f2):
    return GradedSheaf.constant(GradedSpace.point(), f2)


@pytest.mark.unit
class TestDualityConfig:
    """Tests de DualityConfig."""

    def test_default_base(self, f2):
        config = DualityConfig(f2)
        assert config.certificate().passed
        assert len(config.point.points) == 1

    @pytest.mark.parametrize("ring", [BaseRing.integers(), BaseRing.integers_mod(4)])
    def test_requires_field(self, ring):
        with pytest.raises(NonFieldBase):
            DualityConfig(ring)

    def test_infinite_degrees_rejected(self, line3_z, k_point):
        p = GradedSpaceMap.to_point(line3_z.spaces["LINE3Z"])
        with pytest.raises(InfiniteSupport):
            upper_shriek(p, k_point)


@pytest.mark.slow
class TestDualizingComplex:
    """Tests de ω_X = p^! ω_k et de D_X."""

    def test_point(self, pt_workspace, f2):
        omega = dualizing_complex(pt_workspace.spaces["PT"], DualityConfig(f2))
        assert quasi_isomorphic(omega.complex, pt_workspace.sheaves["k"])

    def test_dual_on_point(self, pt_workspace):
        sheaf = pt_workspace.sheaves["k"]
        assert quasi_isomorphic(verdier_dual(sheaf), sheaf)

    def test_model_is_quasi_isomorphic(self, sierpinski, f2):
        omega = dualizing_complex(sierpinski.spaces["S2"], DualityConfig(f2))
        assert tables_equal(cohomology_table(omega.model), cohomology_table(omega.complex))

    def test_soft_flat_resolution(self, pseudo_circle, f2):
        resolution = soft_flat_resolution_of_R(pseudo_circle.spaces["S1"], f2)
        certificate = resolution_certificate(resolution, law="soft-flat-resolution")
        assert certificate.passed, certificate.details

    @pytest.mark.parametrize("workspace, sheaf", [
        ("pseudo_circle", "k"),
        ("pt_workspace", "k"),
    ])
    def test_biduality(self, request, workspace, sheaf):
        certificate = biduality_check(request.getfixturevalue(workspace).sheaves[sheaf])
        assert certificate.passed, certificate.details

    def test_biduality_of_extension_by_zero(self, pseudo_circle):
        sheaf = extend_by_zero(pseudo_circle.sheaves["k"], ["o1"])
        certificate = biduality_check(sheaf)
        assert certificate.passed, certificate.details

    @pytest.mark.parametrize("workspace, sheaf", [
        ("sierpinski", "k"),
        ("sierpinski", "sky"),
        ("line3", "k"),
    ])
    def test_biduality_refused_with_boundary(self, request, workspace, sheaf, f2):
        """ω_X = k_c sur S2 et LINE3 : D_X k = D_X k_c, la bidualité est refusée."""
        value = request.getfixturevalue(workspace).sheaves[sheaf]
        assert not dualizing_is_invertible(dualizing_complex(value.space, DualityConfig(f2)))
        certificate = biduality_check(value)
        assert not certificate.passed
        assert certificate.details[0].startswith("BOUNDARY")

    def test_invertible_dualizing_complex(self, pseudo_circle, f2):
        """ω = k[1] sur le pseudo-cercle."""
        omega = dualizing_complex(pseudo_circle.spaces["S1"], DualityConfig(f2))
        assert dualizing_is_invertible(omega)
        assert set(cohomology_table(omega.model)["n"]) == {-1}

    def test_graded_ring(self, line3_ringed, f2):
        """(ω_X)_λ se lit sur l'espace sous-jacent."""
        ringed = line3_ringed.ringed["A"]
        group = ringed.space.open_grading(ringed.space.points).group
        for degree in group.elements():
            certificate = remark_duality_crosscheck(ringed, degree, DualityConfig(f2))
            assert certificate.passed, certificate.details


@pytest.mark.slow
class TestUpperShriek:
    """Tests de f^! et des identités de dualité."""

    def test_adjunction(self, sierpinski, k_point):
        p = sierpinski.maps["p"]
        for sheaf in (sierpinski.sheaves["k"], sierpinski.sheaves["sky"]):
            certificate = upper_shriek_adjunction_check(p, sheaf, k_point)
            assert certificate.passed, certificate.details

    def test_adjunction_open_inclusion(self, line3):
        certificate = upper_shriek_adjunction_check(line3.maps["j"], line3.sheaves["F"], line3.sheaves["k"])
        assert certificate.passed, certificate.details

    def test_open_inclusion_is_restriction(self, line3):
        """j^! = j⁻¹ pour une inclusion ouverte."""
        j = line3.maps["j"]
        assert quasi_isomorphic(upper_shriek(j, line3.sheaves["k"]), line3.sheaves["F"])

    def test_identities(self, sierpinski, k_point, f2):
        certificates = duality_identities_check(sierpinski.maps["p"], k_point, k_point, DualityConfig(f2))
        assert len(certificates) == 3
        for certificate in certificates:
            assert certificate.passed, (certificate.law, certificate.details)

    def test_sheaf_duality(self, sierpinski, k_point):
        certificate = sheaf_duality_check(sierpinski.maps["p"], sierpinski.sheaves["k"], k_point)
        assert certificate.passed, certificate.details

    def test_composition(self, sierpinski, collapse, f2):
        """LINE3 → S2 → PT, deux morphismes propres."""
        p = sierpinski.maps["p"]
        k_point = GradedSheaf.constant(p.target, f2)
        certificate = upper_shriek_composition_check(collapse, p, k_point)
        assert certificate.passed, certificate.details

    def test_composition_needs_proper_maps(self, sierpinski, k_point):
        """i : {o} → S2 n'est pas propre."""
        i = GradedSpaceMap.inclusion(sierpinski.spaces["S2"], ["o"], "i")
        with pytest.raises(NotProperError):
            upper_shriek_composition_check(i, sierpinski.maps["p"], k_point)


@pytest.mark.unit
class TestRepresentability:
    """Tests de la représentabilité et du critère d'injectivité."""

    def test_hom_functor_is_represented(self, sierpinski):
        sheaf = sierpinski.sheaves["k"]
        functor = HomFunctor(sheaf)
        represented = represent_functor(functor, sheaf.space, sheaf.ring)
        assert tables_equal(invariant_table(represented), invariant_table(sheaf))
        assert representability_certificate(functor, represented).passed

    def test_functor_must_implement_value_and_apply(self, f2):
        class ValueOnly(ContravariantFunctor):
            def value(self, generator):
                return None

        with pytest.raises(TypeError):
            ValueOnly()
        with pytest.raises(TypeError):
            ContravariantFunctor()
        assert ZeroFunctor(f2).value(None).generators == 0

    def test_godement_terms_are_injective(self, sierpinski):
        for term in godement_resolution(sierpinski.sheaves["k"]).complex.terms.values():
            assert injectivity_check(term).passed

    def test_extension_by_zero_is_not_injective(self, sierpinski):
        """k_{o} prolongé par zéro ne s'étend pas le long de R_{o} → R_{U_c}."""
        sheaf = extend_by_zero(sierpinski.sheaves["k"], ["o"])
        assert not injectivity_check(sheaf).passed

    def test_soft_sequence(self, sierpinski):
        sheaf = sierpinski.sheaves["k"]
        assert soft_sequence_check([SheafMap.identity(sheaf)])

    def test_soft_sequence_too_short(self, pseudo_circle):
        """dim S1 = 1 : deux termes ne suffisent pas."""
        sheaf = pseudo_circle.sheaves["k"]
        with pytest.raises(GradedSheafError):
            soft_sequence_check([SheafMap.identity(sheaf)])
