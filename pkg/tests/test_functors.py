"""
Tests des foncteurs gradués : images directes, image inverse, prolongement par
zéro, produit tensoriel et Hom interne.
"""

import pytest
from hypothesis import given, settings, strategies as st

from src.graded_sheaf_kit.algebra.grading import DegreeWindow, GradingGroup
from src.graded_sheaf_kit.core.functors import (
    direct_sum_sheaf,
    extend_by_zero,
    hom_space,
    inverse_image_gr,
    open_extension_map,
    closed_restriction_map,
    pushforward_gr,
    pushforward_map,
    restrict_to_open,
    sheaf_hom,
    shift_sheaf,
    shriek_pushforward_gr,
    tensor_sheaf,
)
from src.graded_sheaf_kit.core.reports import invariant_table, total_rank
from src.graded_sheaf_kit.core.sections import sections
from src.graded_sheaf_kit.domain.poset import FinitePoset
from src.graded_sheaf_kit.domain.sheaf import GradedSheaf, SheafMap
from src.graded_sheaf_kit.domain.space import GradedSpace
from src.graded_sheaf_kit.errors import InfiniteSupport, MismatchError, NotLocallyClosedError

from .strategies import monotone_maps, sheaves, spaces
from .ungraded_oracle import (
    extension_section_dimension,
    hom_dimension,
    inverse_image_dimension,
    pushforward_dimension,
    shriek_dimension,
    tensor_section_dimension,
)

TRIVIAL_ONLY = (GradingGroup.trivial(),)


@pytest.mark.unit
class TestPushforward:
    """Tests des images directes f_* et f_!."""

    def test_line3_pushforward(self, line3):
        """(j_* F)_c = k² dans chacun des trois degrés de Z/3."""
        pushed = pushforward_gr(line3.maps["j"], line3.sheaves["F"])
        stalk = pushed.stalk("c")
        assert sorted(stalk.parts) == [(0,), (1,), (2,)]
        assert all(m.invariants.rank == 2 for m in stalk.parts.values())
        assert pushed.stalk("u-").part(()).invariants.rank == 1
        assert pushed.diagnostics() == []

    def test_line3_table(self, line3):
        table = invariant_table(pushforward_gr(line3.maps["j"], line3.sheaves["F"]))
        assert list(table.columns) == ["point", "degree", "rank", "divisors"]
        assert total_rank(table, "c") == 6
        assert set(table[table["point"] == "c"]["degree"]) == {"[0]", "[1]", "[2]"}

    def test_line3_shriek_is_extension_by_zero(self, line3):
        """j_! F est nul en c : aucune section n'a de support propre au-dessus de U_c."""
        shriek = shriek_pushforward_gr(line3.maps["j"], line3.sheaves["F"])
        assert shriek.stalk("c").is_zero()
        assert shriek.stalk("u+").part(()).invariants.rank == 1

    def test_infinite_support(self, line3_z):
        """Λ_c = Z : la fibre au-dessus de 0 est infinie sans fenêtre."""
        with pytest.raises(InfiniteSupport):
            pushforward_gr(line3_z.maps["j"], line3_z.sheaves["F"])

    def test_window_truncates(self, line3_z):
        pushed = pushforward_gr(line3_z.maps["j"], line3_z.sheaves["F"], DegreeWindow(-1, 1))
        assert sorted(pushed.stalk("c").parts) == [(-1,), (0,), (1,)]

    def test_pushforward_to_point(self, pseudo_circle):
        """p_* k sur le pseudo-cercle : Γ(S1, k) = k."""
        pushed = pushforward_gr(pseudo_circle.maps["p"], pseudo_circle.sheaves["k"])
        assert pushed.stalk("pt").part(()).invariants.rank == 1

    def test_pushforward_of_identity(self, line3):
        phi = SheafMap.identity(line3.sheaves["F"])
        pushed = pushforward_map(line3.maps["j"], phi)
        assert pushed.is_isomorphism()

    def test_wrong_space(self, line3):
        with pytest.raises(MismatchError):
            pushforward_gr(line3.maps["j"], line3.sheaves["k"])


@pytest.mark.unit
class TestInverseImage:
    """Tests de f⁻¹."""

    def test_restriction_to_open(self, line3):
        """j⁻¹ k = F."""
        pulled = inverse_image_gr(line3.maps["j"], line3.sheaves["k"])
        assert pulled.is_isomorphic_stalkwise(line3.sheaves["F"])
        assert restrict_to_open(line3.sheaves["k"], {"u-", "u+"}).is_isomorphic_stalkwise(line3.sheaves["F"])

    def test_constant_from_point(self, line3, f2):
        """p⁻¹ k_pt = k, placé en degré 0 de Λ_c."""
        k_pt = GradedSheaf.constant(line3.spaces["PT"], f2)
        pulled = inverse_image_gr(line3.maps["p"], k_pt)
        assert pulled.stalk("c").support() == [(0,)]
        assert pulled.is_isomorphic_stalkwise(line3.sheaves["k"])
        assert pulled.diagnostics() == []


@pytest.mark.unit
class TestExtensionAndSums:
    """Tests du prolongement par zéro, des sommes et des décalages."""

    def test_extend_by_zero(self, line3):
        k = line3.sheaves["k"]
        extended = extend_by_zero(k, {"c", "u-"})
        assert extended.stalk("u+").is_zero()
        assert extended.stalk("c").part((0,)).invariants.rank == 1

    def test_extend_by_zero_needs_locally_closed(self, f2):
        """{a, c} n'est pas localement fermé dans a < b < c."""
        poset = FinitePoset(("a", "b", "c"), (("a", "b"), ("b", "c")))
        sheaf = GradedSheaf.constant(GradedSpace.constant("C", poset, GradingGroup.trivial()), f2)
        with pytest.raises(NotLocallyClosedError):
            extend_by_zero(sheaf, {"a", "c"})

    def test_canonical_maps(self, line3):
        k = line3.sheaves["k"]
        inclusion = open_extension_map(k, {"u-", "u+"})
        projection = closed_restriction_map(k, {"c"})
        assert not inclusion.is_isomorphism()
        assert projection.compose(inclusion).is_zero()
        with pytest.raises(ValueError):
            closed_restriction_map(k, {"u-"})

    def test_direct_sum(self, line3):
        k, sky = line3.sheaves["k"], line3.sheaves["sky"]
        total = direct_sum_sheaf([k, sky], line3.spaces["LINE3"], k.ring)
        assert total.stalk("c").part((0,)).invariants.rank == 2
        assert total.stalk("u-").part(()).invariants.rank == 1
        assert total.diagnostics() == []

    def test_shift_round_trip(self, line3):
        k = line3.sheaves["k"]
        shifted = shift_sheaf(k, (1,))
        assert shifted.stalk("c").support() == [(2,)]
        assert shift_sheaf(shifted, (2,)).is_isomorphic_stalkwise(k)


@pytest.mark.unit
class TestTensorAndHom:
    """Tests du produit tensoriel et du Hom interne."""

    def test_tensor_unit(self, line3):
        k, sky = line3.sheaves["k"], line3.sheaves["sky"]
        assert tensor_sheaf(k, k).is_isomorphic_stalkwise(k)
        assert tensor_sheaf(k, sky).is_isomorphic_stalkwise(sky)

    def test_global_hom(self, line3):
        k, sky = line3.sheaves["k"], line3.sheaves["sky"]
        assert hom_space(k, k).module.invariants.rank == 1
        assert hom_space(k, sky).module.invariants.rank == 1
        assert hom_space(sky, k).module.is_zero()

    def test_internal_hom(self, line3):
        """Hom(k, k) = k : en c, seul le degré 0 porte des transformations."""
        hom = sheaf_hom(line3.sheaves["k"], line3.sheaves["k"])
        assert hom.stalk("c").support() == [(0,)]
        assert hom.is_isomorphic_stalkwise(line3.sheaves["k"])


@pytest.mark.unit
class TestUngradedOracle:
    """Foncteurs contre l'oracle pour Λ ≡ 0, sur au plus quatre points."""

    @settings(max_examples=50, deadline=None)
    @given(st.data())
    def test_pushforward_matches_sections(self, data):
        source = data.draw(spaces(max_points=4, gradings=TRIVIAL_ONLY, name="X"))
        target = data.draw(spaces(max_points=4, gradings=TRIVIAL_ONLY, name="Y"))
        f = data.draw(monotone_maps(source, target))
        sheaf = data.draw(sheaves(source, max_summands=2))
        pushed = pushforward_gr(f, sheaf)
        for y in target.points:
            assert pushed.stalk(y).part(()).invariants.rank == pushforward_dimension(f, sheaf, y)

    @settings(max_examples=50, deadline=None)
    @given(st.data())
    def test_inverse_image_matches_stalks(self, data):
        source = data.draw(spaces(max_points=4, gradings=TRIVIAL_ONLY, name="X"))
        target = data.draw(spaces(max_points=4, gradings=TRIVIAL_ONLY, name="Y"))
        f = data.draw(monotone_maps(source, target))
        sheaf = data.draw(sheaves(target, max_summands=2))
        pulled = inverse_image_gr(f, sheaf)
        for x in source.points:
            assert pulled.stalk(x).part(()).invariants.rank == inverse_image_dimension(f, sheaf, x)

    @settings(max_examples=60, deadline=None)
    @given(st.data())
    def test_shriek_matches_proper_sections(self, data):
        source = data.draw(spaces(max_points=4, gradings=TRIVIAL_ONLY, name="X"))
        target = data.draw(spaces(max_points=4, gradings=TRIVIAL_ONLY, name="Y"))
        f = data.draw(monotone_maps(source, target))
        sheaf = data.draw(sheaves(source, max_summands=2))
        pushed = shriek_pushforward_gr(f, sheaf)
        for y in target.points:
            assert pushed.stalk(y).part(()).invariants.rank == shriek_dimension(f, sheaf, y)

    @settings(max_examples=60, deadline=None)
    @given(st.data())
    def test_tensor_matches_families(self, data):
        space = data.draw(spaces(max_points=4, gradings=TRIVIAL_ONLY))
        first = data.draw(sheaves(space, max_summands=2))
        second = data.draw(sheaves(space, max_summands=2))
        product = tensor_sheaf(first, second)
        for opened in space.poset.opens():
            if opened:
                computed = sections(product, opened).part(()).invariants.rank
                assert computed == tensor_section_dimension(first, second, opened)

    @settings(max_examples=60, deadline=None)
    @given(st.data())
    def test_internal_hom_matches_transformations(self, data):
        space = data.draw(spaces(max_points=4, gradings=TRIVIAL_ONLY))
        first = data.draw(sheaves(space, max_summands=2))
        second = data.draw(sheaves(space, max_summands=2))
        hom = sheaf_hom(first, second)
        for x in space.points:
            assert hom.stalk(x).part(()).invariants.rank == hom_dimension(first, second, x)

    @settings(max_examples=60, deadline=None)
    @given(st.data())
    def test_extension_by_zero_matches_families(self, data):
        space = data.draw(spaces(max_points=4, gradings=TRIVIAL_ONLY))
        sheaf = data.draw(sheaves(space, max_summands=2))
        subset = data.draw(st.sampled_from([s for s in space.poset.locally_closed_subsets() if s]))
        extended = extend_by_zero(sheaf, subset)
        for opened in space.poset.opens():
            if opened:
                computed = sections(extended, opened).part(()).invariants.rank
                assert computed == extension_section_dimension(sheaf, subset, opened)
