"""
Tests des ordres finis, des espaces gradués et de leurs morphismes.
"""

import pytest

from src.graded_sheaf_kit.algebra.grading import GradingGroup, GroupHom
from src.graded_sheaf_kit.domain.diagnostics import Severity
from src.graded_sheaf_kit.domain.poset import FinitePoset, order_diagnostics
from src.graded_sheaf_kit.domain.space import (
    GradedSpace,
    GradedSpaceMap,
    fiber_product,
    validate_space,
)
from src.graded_sheaf_kit.errors import NotLocallyClosedError, NotOpenError

Z2 = GradingGroup.cyclic(2)


@pytest.fixture
def chain3():
    """a < b < c."""
    return FinitePoset(("a", "b", "c"), (("a", "b"), ("b", "c")))


@pytest.mark.unit
class TestFinitePoset:
    """Tests de l'ordre et de la topologie d'Alexandrov."""

    def test_covers_and_order(self, chain3):
        assert chain3.covers == (("a", "b"), ("b", "c"))
        assert chain3.leq("a", "c")
        assert not chain3.less("c", "a")
        assert chain3.up("b") == frozenset({"b", "c"})
        assert chain3.down("b") == frozenset({"a", "b"})
        assert chain3.height == 2

    def test_opens_are_up_sets(self, chain3):
        """Les ouverts d'une chaîne à 3 points sont ∅, {c}, {b,c}, X."""
        assert chain3.opens() == [
            frozenset(),
            frozenset({"c"}),
            frozenset({"b", "c"}),
            frozenset({"a", "b", "c"}),
        ]

    def test_locally_closed(self, chain3):
        assert chain3.is_locally_closed({"b"})
        assert not chain3.is_locally_closed({"a", "c"})
        with pytest.raises(NotLocallyClosedError):
            chain3.require_locally_closed({"a", "c"})

    def test_require_open(self, chain3):
        assert chain3.require_open({"c"}) == frozenset({"c"})
        with pytest.raises(NotOpenError):
            chain3.require_open({"a"})

    def test_unknown_points_rejected(self, chain3):
        with pytest.raises(ValueError):
            chain3.is_open({"z"})

    def test_least(self, chain3):
        assert chain3.least({"b", "c"}) == "b"
        vee = FinitePoset(("c", "u1", "u2"), (("c", "u1"), ("c", "u2")))
        assert vee.least({"u1", "u2"}) is None
        assert vee.minimal({"u1", "u2"}) == ["u1", "u2"]

    def test_induced_from_generator(self, chain3):
        """Une partie donnée par un générateur est lue une seule fois."""
        induced = chain3.induced(p for p in ("a", "c"))
        assert induced.points == ("a", "c")
        assert induced.covers == (("a", "c"),)

    def test_linear_extension_is_deterministic(self):
        poset = FinitePoset(("x", "y", "z"), (("z", "x"),))
        assert poset.linear_extension == ("y", "z", "x")

    def test_cycle_rejected(self):
        """Un cycle est une erreur, une relation redondante un avertissement."""
        with pytest.raises(ValueError):
            FinitePoset(("a", "b"), (("a", "b"), ("b", "a")))
        codes = [d.code for d in order_diagnostics(("a", "b"), [("a", "b"), ("b", "a")])]
        assert "ORDER_CYCLE" in codes

    def test_redundant_cover_is_warning(self):
        diagnostics = order_diagnostics(("a", "b", "c"), [("a", "b"), ("b", "c"), ("a", "c")])
        assert [d.code for d in diagnostics] == ["REDUNDANT_COVER"]
        assert diagnostics[0].severity == Severity.WARNING
        poset = FinitePoset(("a", "b", "c"), (("a", "b"), ("b", "c"), ("a", "c")))
        assert poset.covers == (("a", "b"), ("b", "c"))

    def test_unknown_and_duplicate_points(self):
        codes = {d.code for d in order_diagnostics(("a", "a"), [("a", "z")])}
        assert codes == {"DUPLICATE_POINT", "UNKNOWN_POINT"}


@pytest.mark.unit
class TestGradedSpace:
    """Tests des espaces gradués et de Λ(U)."""

    def test_line3_gradings(self, line3):
        """Λ(X) = Z/3 (plus petit point c), Λ({u-,u+}) = 0."""
        space = line3.spaces["LINE3"]
        assert space.open_grading(space.points).group == GradingGroup.cyclic(3)
        assert space.open_grading({"u-", "u+"}).group == GradingGroup.trivial()
        assert validate_space(space) == []

    def test_open_without_least_point(self, gluing_witness):
        """Λ({u1,u2}) = Z/2 × Z/2 pour Λ constant égal à Z/2."""
        space = gluing_witness.space
        grading = space.open_grading({"u1", "u2"})
        assert grading.group.orders == (2, 2)
        pairs = {(grading.restrict(g, "u1"), grading.restrict(g, "u2")) for g in grading.group.elements()}
        assert len(pairs) == 4

    def test_constant_grading_on_connected_space(self):
        """Λ constant Z sur le pseudo-cercle : Λ(X) = Z."""
        poset = FinitePoset(
            ("c1", "c2", "o1", "o2"), (("c1", "o1"), ("c1", "o2"), ("c2", "o1"), ("c2", "o2"))
        )
        space = GradedSpace.constant("S1", poset, GradingGroup.integers())
        assert space.open_grading(space.points).group == GradingGroup.integers()
        assert space.open_grading({"o1", "o2"}).group.orders == (0, 0)

    def test_restrict_grading(self, gluing_witness):
        space = gluing_witness.space
        restriction = space.restrict_grading(space.points, {"u1", "u2"})
        image = restriction.apply((1,))
        small = space.open_grading({"u1", "u2"})
        assert small.restrict(image, "u1") == (1,)
        assert small.restrict(image, "u2") == (1,)

    def test_non_open_grading_rejected(self, gluing_witness):
        with pytest.raises(NotOpenError):
            gluing_witness.space.open_grading({"c"})

    def test_missing_restriction_rejected(self):
        poset = FinitePoset(("a", "b"), (("a", "b"),))
        with pytest.raises(ValueError):
            GradedSpace("X", poset, {"a": Z2, "b": Z2})

    def test_inconsistent_declared_restriction(self, chain3):
        lres = {
            ("a", "b"): GroupHom.identity(Z2),
            ("b", "c"): GroupHom.identity(Z2),
            ("a", "c"): GroupHom.zero(Z2, Z2),
        }
        space = GradedSpace("X", chain3, {p: Z2 for p in chain3.points}, lres)
        assert [d.code for d in validate_space(space)] == ["NOT_FUNCTORIAL"]

    def test_underlying_and_subspace(self, line3):
        space = line3.spaces["LINE3"]
        assert all(g == GradingGroup.trivial() for g in space.underlying().lambdas.values())
        sub = space.subspace({"c", "u-"})
        assert sub.poset.covers == (("c", "u-"),)
        assert sub.lambdas["c"] == GradingGroup.cyclic(3)


@pytest.mark.unit
class TestGradedSpaceMap:
    """Tests des morphismes d'espaces gradués."""

    def test_fixture_maps_are_valid(self, line3):
        assert line3.maps["j"].diagnostics() == []
        assert line3.maps["p"].diagnostics() == []

    def test_preimage_and_composition(self, line3):
        j, p = line3.maps["j"], line3.maps["p"]
        assert j.preimage({"c", "u-"}) == frozenset({"u-"})
        composite = p.compose_after(j)
        assert composite.source is j.source
        assert composite("u+") == "pt"

    def test_not_continuous(self, sierpinski):
        space = sierpinski.spaces["S2"]
        swap = GradedSpaceMap(
            "swap",
            space,
            space,
            {"c": "o", "o": "c"},
            {x: GroupHom.identity(GradingGroup.trivial()) for x in space.points},
        )
        assert [d.code for d in swap.diagnostics()] == ["NOT_CONTINUOUS"]

    def test_flat_between_wrong_groups(self, line3):
        space = line3.spaces["LINE3"]
        with pytest.raises(ValueError):
            GradedSpaceMap(
                "bad",
                space,
                space,
                {x: x for x in space.points},
                {x: GroupHom.identity(GradingGroup.trivial()) for x in space.points},
            )

    def test_inclusion_is_strict(self, line3):
        inclusion = GradedSpaceMap.inclusion(line3.spaces["LINE3"], {"u-", "u+"})
        assert inclusion.is_strict()
        assert inclusion.diagnostics() == []

    def test_fiber_product_of_points(self, sierpinski):
        """S2 ×_pt S2 a quatre points et des projections continues."""
        p = sierpinski.maps["p"]
        square = fiber_product(p, p)
        assert len(square.space.points) == 4
        assert square.f_tilde.diagnostics() == []
        assert square.g_tilde.diagnostics() == []
        assert len(square.space.poset.covers) == 4

    def test_fiber_product_amalgamates_gradings(self):
        """Z/2 ← 0 → Z/2 au-dessus d'un point : Λ_Z = Z/2 × Z/2."""
        left = GradedSpace.point("A", Z2, "a")
        right = GradedSpace.point("B", Z2, "b")
        base = GradedSpace.point()
        square = fiber_product(
            GradedSpaceMap.to_point(left, base, "f"), GradedSpaceMap.to_point(right, base, "g")
        )
        (z,) = square.space.points
        assert square.space.lambdas[z].orders == (2, 2)

    def test_fiber_product_needs_common_target(self, line3, sierpinski):
        with pytest.raises(ValueError):
            fiber_product(line3.maps["j"], sierpinski.maps["p"])
