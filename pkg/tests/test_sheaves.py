"""
Tests des faisceaux gradués, des sections et des morceaux de degré.

Les sections calculées sont comparées à un oracle indépendant qui énumère
les familles compatibles du faisceau ordinaire F_λ.
"""

import pytest
import numpy as np
from hypothesis import given, settings, strategies as st

from src.graded_sheaf_kit.algebra.base_ring import ZZ
from src.graded_sheaf_kit.algebra.graded import GradedMap, GradedModule
from src.graded_sheaf_kit.algebra.grading import GradingGroup
from src.graded_sheaf_kit.algebra.modules import Module, ModuleInvariants
from src.graded_sheaf_kit.core.abelian import basic_exact_sequence, cokernel_sheaf, image_sheaf, is_injective, kernel_sheaf
from src.graded_sheaf_kit.core.reports import invariant_table, tables_equal
from src.graded_sheaf_kit.core.sections import degree_piece, global_sections, sections, support
from src.graded_sheaf_kit.domain.poset import FinitePoset
from src.graded_sheaf_kit.domain.sheaf import GradedSheaf, SheafMap
from src.graded_sheaf_kit.domain.space import GradedSpace
from src.graded_sheaf_kit.errors import MismatchError, NotOpenError

from .strategies import sheaves, spaces
from .ungraded_oracle import section_dimension, stalk_dimension

TRIVIAL = GradingGroup.trivial()


def ungraded(space, ring, stalks, blocks):
    """Faisceau sur Λ ≡ 0 : tiges (modules) et blocs de restriction par couverture."""
    graded = {x: GradedModule(TRIVIAL, ring, {(): m}) for x, m in stalks.items()}
    restrictions = {
        (x, y): GradedMap(graded[x], graded[y], {(): np.array(b, dtype=object)}, space.lres[(x, y)])
        for (x, y), b in blocks.items()
    }
    return GradedSheaf("G", space, ring, graded, restrictions)


@pytest.mark.unit
class TestGradedSheaf:
    """Tests de construction et de diagnostic des faisceaux."""

    def test_fixture_sheaves_are_clean(self, line3):
        for sheaf in line3.sheaves.values():
            assert sheaf.diagnostics() == []

    def test_missing_stalks_are_zero(self, line3):
        sky = line3.sheaves["sky"]
        assert sky.stalk("u-").is_zero()
        assert support(sky) == frozenset({"c"})

    def test_unknown_point(self, line3):
        with pytest.raises(ValueError):
            line3.sheaves["k"].stalk("z")

    def test_wrong_grading_rejected(self, line3, f2):
        space = line3.spaces["LINE3"]
        with pytest.raises(MismatchError):
            GradedSheaf("bad", space, f2, {"c": GradedModule.concentrated(TRIVIAL, Module.free(f2, 1))})

    def test_restriction_outside_covers(self, sierpinski, f2):
        space = sierpinski.spaces["S2"]
        k = GradedModule(TRIVIAL, f2, {(): Module.free(f2, 1)})
        stray = GradedMap(k, k, {(): np.eye(1, dtype=object)}, space.lres[("c", "o")])
        with pytest.raises(ValueError):
            GradedSheaf("bad", space, f2, {"c": k, "o": k}, {("o", "c"): stray})

    def test_block_not_well_defined(self, sierpinski):
        """Z/2 → Z, 1 ↦ 1 ne respecte pas la relation 2 = 0."""
        space = sierpinski.spaces["S2"]
        sheaf = ungraded(
            space, ZZ, {"c": Module.cyclic(ZZ, 2), "o": Module.free(ZZ, 1)}, {("c", "o"): [[1]]}
        )
        assert [d.code for d in sheaf.diagnostics()] == ["BLOCK_NOT_WELL_DEFINED"]

    def test_not_functorial(self, f2):
        """Carré a < b, c < d : les deux chemins de a vers d diffèrent."""
        poset = FinitePoset(("a", "b", "c", "d"), (("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")))
        space = GradedSpace.constant("Q", poset, TRIVIAL)
        k = Module.free(f2, 1)
        sheaf = ungraded(
            space,
            f2,
            {p: k for p in poset.points},
            {("a", "b"): [[1]], ("a", "c"): [[1]], ("b", "d"): [[1]], ("c", "d"): [[0]]},
        )
        assert "NOT_FUNCTORIAL" in {d.code for d in sheaf.diagnostics()}

    def test_composed_restriction(self, pseudo_circle):
        k = pseudo_circle.sheaves["k"]
        assert k.restriction("c1", "o2").block(()).tolist() == [[1]]
        assert k.restriction("o1", "o1").block(()).tolist() == [[1]]

    def test_maps(self, line3):
        k = line3.sheaves["k"]
        identity = SheafMap.identity(k)
        assert identity.is_isomorphism()
        assert identity.compose(identity).equals(identity)
        assert not SheafMap.zero(k, k).is_isomorphism()
        assert SheafMap.identity(k).diagnostics() == []


@pytest.mark.unit
class TestSections:
    """Tests des sections sur les fixtures."""

    def test_global_sections_line3(self, line3):
        """Γ(LINE3, k) = k en degré 0 de Λ(X) = Z/3."""
        gamma = global_sections(line3.sheaves["k"])
        assert gamma.grading == GradingGroup.cyclic(3)
        assert gamma.support() == [(0,)]
        assert gamma.part((0,)).invariants == ModuleInvariants(1)

    def test_sections_on_open(self, line3):
        sections_on_u = sections(line3.sheaves["k"], {"u-", "u+"})
        assert sections_on_u.part(()).invariants.rank == 2

    def test_skyscraper(self, line3):
        sky = line3.sheaves["sky"]
        assert global_sections(sky).part((0,)).invariants.rank == 1
        assert sections(sky, {"u-"}).is_zero()

    def test_sections_need_an_open(self, line3):
        with pytest.raises(NotOpenError):
            sections(line3.sheaves["k"], {"c"})

    def test_pseudo_circle(self, pseudo_circle):
        """Le faisceau constant a une section globale, deux sur {o1, o2}."""
        k = pseudo_circle.sheaves["k"]
        assert global_sections(k).part(()).invariants.rank == 1
        assert sections(k, {"o1", "o2"}).part(()).invariants.rank == 2

    def test_gluing_space_grading(self, gluing_witness):
        """Sur {u1, u2}, Λ = Z/2 × Z/2 : k² en degré nul, k dans les deux degrés mixtes."""
        graded = sections(gluing_witness, {"u1", "u2"})
        assert graded.grading.orders == (2, 2)
        assert len(graded.support()) == 3
        assert graded.part(graded.grading.zero()).invariants.rank == 2
        assert sum(m.invariants.rank for m in graded.parts.values()) == 4

    def test_degree_piece(self, gluing_witness):
        piece = degree_piece(gluing_witness, (0,))
        assert all(g == TRIVIAL for g in piece.space.lambdas.values())
        assert piece.stalk("u1").part(()).invariants.rank == 1
        assert degree_piece(gluing_witness, (1,)).is_zero()

    def test_degree_piece_line3(self, line3):
        """(k)_1 sur LINE3 : nul en c, k en u± (ρ_{c,u±} est nul)."""
        piece = degree_piece(line3.sheaves["k"], (1,))
        assert piece.stalk("c").is_zero()
        assert piece.stalk("u-").part(()).invariants.rank == 1


@pytest.mark.unit
class TestAgainstOracle:
    """Sections calculées contre l'énumération des familles compatibles."""

    @settings(max_examples=25, deadline=None)
    @given(st.data())
    def test_sections_match_enumeration(self, data):
        space = data.draw(spaces(max_points=3))
        sheaf = data.draw(sheaves(space, max_summands=2))
        total = space.open_grading(space.points)
        for degree in total.group.elements():
            piece = degree_piece(sheaf, degree)
            for x in space.points:
                assert sheaf.stalk(x).part(total.restrict(degree, x)).invariants.rank == stalk_dimension(piece, x)
            for opened in space.poset.opens():
                if not opened:
                    continue
                restricted = space.restrict_grading(space.points, opened).apply(degree)
                computed = sections(sheaf, opened).part(restricted).invariants.rank
                assert computed == section_dimension(piece, opened)


@pytest.mark.unit
class TestAbelian:
    """Tests des noyaux, conoyaux et images calculés tige par tige."""

    def test_kernel_of_identity(self, line3):
        kernel, inclusion = kernel_sheaf(SheafMap.identity(line3.sheaves["k"]))
        assert kernel.is_zero()
        assert kernel.diagnostics() == []
        assert inclusion.target is line3.sheaves["k"]

    def test_kernel_of_restriction_to_closed(self, line3):
        """ker(k → k_Z) = k_U pour U = {u-, u+}."""
        sequence = basic_exact_sequence(line3.sheaves["k"], ["u-", "u+"])
        kernel, inclusion = kernel_sheaf(sequence.projection)
        assert kernel.diagnostics() == []
        assert tables_equal(invariant_table(kernel), invariant_table(sequence.terms[0]))
        assert is_injective(inclusion)

    def test_cokernel_and_image(self, line3):
        sequence = basic_exact_sequence(line3.sheaves["k"], ["u-", "u+"])
        cokernel, _ = cokernel_sheaf(sequence.inclusion)
        image, _ = image_sheaf(sequence.inclusion)
        assert tables_equal(invariant_table(cokernel), invariant_table(sequence.terms[2]))
        assert tables_equal(invariant_table(image), invariant_table(sequence.terms[0]))
