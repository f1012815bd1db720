"""
Tests du calcul dérivé : cohomologie, résolutions, triangle de base et
formules de projection et de changement de base.
"""

import pytest

from src.graded_sheaf_kit.algebra.base_ring import BaseRing
from src.graded_sheaf_kit.algebra.modules import Module
from src.graded_sheaf_kit.core.derived import (
    basic_triangle,
    cohomology,
    cohomology_table,
    composition_identities_check,
    cone,
    derived_adjunction_check,
    derived_base_change_check,
    derived_pushforward,
    derived_shriek_pushforward,
    derived_tensor,
    flabby_resolution,
    flat_resolution,
    godement_resolution,
    hom_D,
    is_acyclic,
    is_flat_module,
    projection_formula_check,
    quasi_isomorphic,
    require_proper,
    resolution_certificate,
)
from src.graded_sheaf_kit.core.duality import cohomological_dimension, global_cohomology
from src.graded_sheaf_kit.core.flabby import is_flabby, is_soft
from src.graded_sheaf_kit.core.functors import pushforward_gr
from src.graded_sheaf_kit.core.reports import invariant_table, total_rank
from src.graded_sheaf_kit.core.suites import corrupt_chain
from src.graded_sheaf_kit.domain.complexes import ChainMap, ComplexOfSheaves, ResolutionKind
from src.graded_sheaf_kit.domain.sheaf import GradedSheaf, SheafMap
from src.graded_sheaf_kit.domain.space import GradedSpace, fiber_product
from src.graded_sheaf_kit.errors import FlatnessUndecided, NotProperError


def ranks_by_n(table):
    return {int(n): int(group["rank"].sum()) for n, group in table.groupby("n")}


@pytest.mark.unit
class TestCohomology:
    """Tests de la cohomologie globale et de la dimension cohomologique."""

    def test_pseudo_circle(self, pseudo_circle):
        """H^0 = H^1 = k sur le pseudo-cercle."""
        modules = global_cohomology(pseudo_circle.sheaves["k"])
        assert sum(m.invariants.rank for m in modules[0].parts.values()) == 1
        assert sum(m.invariants.rank for m in modules[1].parts.values()) == 1

    def test_line3_has_least_point(self, line3):
        """Γ(X, −) est la tige en c : pas de cohomologie supérieure."""
        modules = global_cohomology(line3.sheaves["k"])
        assert len(modules[0].parts) == 1
        assert sum(m.invariants.rank for m in modules[0].parts.values()) == 1
        assert all(modules[n].is_zero() for n in modules if n > 0)

    @pytest.mark.parametrize("workspace, name, expected", [
        ("pseudo_circle", "S1", 1),
        ("line3", "LINE3", 0),
        ("sierpinski", "S2", 0),
    ])
    def test_cohomological_dimension(self, request, workspace, name, expected, f2):
        space = request.getfixturevalue(workspace).spaces[name]
        assert cohomological_dimension(space, f2) == expected

    def test_pushforward_to_point(self, pseudo_circle):
        """Rp_* k porte H^0 et H^1 au point."""
        pushed = derived_pushforward(pseudo_circle.maps["p"], pseudo_circle.sheaves["k"])
        assert ranks_by_n(cohomology_table(pushed)) == {0: 1, 1: 1}

    def test_open_inclusion_of_discrete_set(self, line3):
        """Rj_* F = j_* F quand U est discret."""
        j, sheaf = line3.maps["j"], line3.sheaves["F"]
        assert quasi_isomorphic(derived_pushforward(j, sheaf), pushforward_gr(j, sheaf))

    def test_cone_of_identity_is_acyclic(self, line3):
        sheaf = line3.sheaves["k"]
        single = ComplexOfSheaves.single(sheaf)
        identity = ChainMap(single, single, {0: SheafMap.identity(sheaf)})
        assert is_acyclic(cone(identity))
        assert not is_acyclic(single)


@pytest.mark.unit
class TestGodement:
    """Tests de la résolution de Godement."""

    @pytest.mark.parametrize("workspace, sheaf", [
        ("pseudo_circle", "k"),
        ("line3", "k"),
        ("line3", "sky"),
        ("sierpinski", "k"),
    ])
    def test_terms_are_flabby_and_soft(self, request, workspace, sheaf):
        resolution = godement_resolution(request.getfixturevalue(workspace).sheaves[sheaf])
        for term in resolution.complex.terms.values():
            assert is_flabby(term)
            assert is_soft(term)
        assert ResolutionKind.INJECTIVE in resolution.kinds()

    def test_certificate(self, pseudo_circle):
        resolution = godement_resolution(pseudo_circle.sheaves["k"])
        certificate = resolution_certificate(resolution)
        assert certificate.passed, certificate.details

    def test_corrupted_augmentation_fails(self, pseudo_circle):
        resolution = godement_resolution(pseudo_circle.sheaves["k"])
        broken = corrupt_chain(resolution.augmentation)
        assert broken is not None
        assert not resolution_certificate(resolution, augmentation=broken).passed

    def test_flabby_resolution_of_complex(self, line3):
        resolution = flabby_resolution(line3.sheaves["sky"])
        assert resolution_certificate(resolution).passed


@pytest.mark.unit
class TestFlatness:
    """Tests de la résolution plate."""

    def test_flat_modules(self):
        z4, z6 = BaseRing.integers_mod(4), BaseRing.integers_mod(6)
        assert not is_flat_module(Module.cyclic(z4, 2), z4)
        assert is_flat_module(Module.cyclic(z6, 2), z6)
        assert is_flat_module(Module.free(z4, 3), z4)

    @pytest.mark.parametrize("workspace, sheaf", [("line3", "sky"), ("line3", "k"), ("pseudo_circle", "k")])
    def test_flat_resolution(self, request, workspace, sheaf):
        resolution = flat_resolution(request.getfixturevalue(workspace).sheaves[sheaf])
        certificate = resolution_certificate(resolution, law="flat-resolution")
        assert certificate.passed, certificate.details

    def test_non_flat_kernel(self):
        """Z/2 sur Z/4 n'a pas de résolution plate finie."""
        z4 = BaseRing.integers_mod(4)
        sheaf = GradedSheaf.constant(GradedSpace.point(), z4, Module.cyclic(z4, 2))
        with pytest.raises(FlatnessUndecided):
            flat_resolution(sheaf)

    def test_derived_tensor_with_unit(self, pseudo_circle):
        sheaf = pseudo_circle.sheaves["k"]
        assert quasi_isomorphic(derived_tensor(sheaf, sheaf), sheaf)


@pytest.mark.integration
class TestTriangle:
    """Tests du triangle F_U → F → F_Z."""

    def test_certificate(self, line3):
        triangle = basic_triangle(line3.sheaves["k"], ["u-", "u+"])
        certificate = triangle.certificate()
        assert certificate.passed, certificate.details

    def test_terms(self, line3):
        first, middle, last = basic_triangle(line3.sheaves["k"], ["u-", "u+"]).terms
        assert first.stalk("c").is_zero()
        assert middle is line3.sheaves["k"]
        assert total_rank(invariant_table(last)) == 1

    def test_corrupted_comparison_fails(self, pseudo_circle):
        triangle = basic_triangle(pseudo_circle.sheaves["k"], ["o1"])
        broken = corrupt_chain(triangle.comparison)
        assert broken is not None
        assert not triangle.certificate(broken).passed

    def test_non_natural_comparison_is_named(self, pseudo_circle):
        """Un bloc nul en c1 casse la naturalité : échec nommé, sans calcul du cône."""
        triangle = basic_triangle(pseudo_circle.sheaves["k"], ["o1"])
        certificate = triangle.certificate(corrupt_chain(triangle.comparison))
        assert not certificate.passed
        assert any(detail.startswith("NOT_NATURAL") for detail in certificate.details)


@pytest.mark.integration
class TestDerivedIdentities:
    """Tests des identités entre foncteurs dérivés."""

    def test_projection_formula(self, pseudo_circle, f2):
        p = pseudo_circle.maps["p"]
        k_pt = GradedSheaf.constant(pseudo_circle.spaces["PT"], f2)
        certificate = projection_formula_check(p, pseudo_circle.sheaves["k"], k_pt)
        assert certificate.passed, certificate.details

    def test_derived_base_change(self, line3):
        j = line3.maps["j"]
        certificate = derived_base_change_check(fiber_product(j, j), line3.sheaves["F"])
        assert certificate.passed, certificate.details

    @pytest.mark.parametrize("sheaf", ["k", "sky"])
    def test_composition_of_proper_maps(self, line3, sierpinski, collapse, sheaf):
        """LINE3 → S2 → PT : toutes les identités, Rq_* = Rq_! compris."""
        certificates = composition_identities_check(collapse, sierpinski.maps["p"], line3.sheaves[sheaf])
        assert [c.law for c in certificates] == [
            "composition-pushforward",
            "composition-shriek",
            "composition-inverse",
            "proper-pushforward",
        ]
        for certificate in certificates:
            assert certificate.passed, (certificate.law, certificate.details)

    def test_composition_through_open_inclusion(self, line3):
        """j n'est pas propre mais p∘j l'est : R(p∘j)_! n'est pas comparé à Rp_! Rj_!."""
        certificates = composition_identities_check(line3.maps["j"], line3.maps["p"], line3.sheaves["F"])
        assert [c.law for c in certificates] == ["composition-pushforward", "composition-inverse"]
        for certificate in certificates:
            assert certificate.passed, (certificate.law, certificate.details)

    def test_require_proper(self, line3, collapse):
        require_proper(collapse, line3.maps["p"])
        with pytest.raises(NotProperError):
            require_proper(line3.maps["j"])

    def test_proper_pushforward(self, pseudo_circle):
        p, sheaf = pseudo_circle.maps["p"], pseudo_circle.sheaves["k"]
        assert quasi_isomorphic(derived_pushforward(p, sheaf), derived_shriek_pushforward(p, sheaf))

    def test_derived_adjunction(self, line3):
        certificate = derived_adjunction_check(line3.maps["j"], line3.sheaves["F"], line3.sheaves["k"])
        assert certificate.passed, certificate.details

    def test_hom_in_derived_category(self, pseudo_circle, f2):
        """Hom_D(k, k) = Γ(S1, k) = k."""
        sheaf = pseudo_circle.sheaves["k"]
        assert hom_D(sheaf, sheaf).invariants.rank == 1
        assert hom_D(sheaf, ComplexOfSheaves.single(sheaf).shifted(1)).invariants.rank == 1
        assert len(cohomology(derived_pushforward(pseudo_circle.maps["p"], sheaf))) >= 2
