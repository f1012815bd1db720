"""
Tests des faisceaux flasques et mous et de la condition de recollement graduée.
"""

import pytest

from src.graded_sheaf_kit.core.abelian import basic_exact_sequence
from src.graded_sheaf_kit.core.flabby import (
    flabby_failures,
    graded_gluing_holds,
    is_flabby,
    is_soft,
    pushforward_exactness_check,
    pushforward_preserves_flabby,
    shriek_preserves_soft,
    ungraded_flabby,
    ungraded_gluing_holds,
)
from src.graded_sheaf_kit.core.functors import pushforward_gr
from src.graded_sheaf_kit.domain.sheaf import GradedSheaf
from src.graded_sheaf_kit.domain.space import GradedSpaceMap


@pytest.fixture(scope="module")
def pushed_constant(gluing_witness, f2):
    """j_* k pour j : {u1, u2} → V, Λ ≡ Z/2 : k² en degré 0 au point c."""
    j = GradedSpaceMap.inclusion(gluing_witness.space, {"u1", "u2"}, "j")
    return pushforward_gr(j, GradedSheaf.constant(j.source, f2))


@pytest.mark.unit
class TestGluing:
    """Le préfaisceau non gradué ne recolle pas, le faisceau gradué si."""

    def test_ungraded_gluing_fails(self, gluing_witness):
        assert not ungraded_gluing_holds(gluing_witness, {"u1"}, {"u2"})

    def test_graded_gluing_holds(self, gluing_witness):
        assert graded_gluing_holds(gluing_witness, {"u1"}, {"u2"})

    def test_trivial_grading_glues_both_ways(self, pseudo_circle):
        k = pseudo_circle.sheaves["k"]
        first, second = {"c1", "o1", "o2"}, {"c2", "o1", "o2"}
        assert ungraded_gluing_holds(k, first, second)
        assert graded_gluing_holds(k, first, second)


@pytest.mark.unit
class TestFlabby:
    """Tests de flasquitude et de mollesse."""

    def test_constant_on_line3_not_flabby(self, line3):
        """k(X)_0 = k ne se surjecte pas sur k({u-, u+}) = k²."""
        k = line3.sheaves["k"]
        assert not is_flabby(k)
        larger, smaller, degree = flabby_failures(k)[0]
        assert smaller == frozenset({"u-", "u+"})
        assert not is_soft(k)

    def test_skyscraper_is_flabby(self, line3):
        sky = line3.sheaves["sky"]
        assert is_flabby(sky)
        assert is_soft(sky)

    def test_zero_is_flabby(self, line3, f2):
        zero = GradedSheaf.zero(line3.spaces["LINE3"], f2)
        assert is_flabby(zero)
        assert is_soft(zero)

    def test_graded_flabby_but_not_ungraded(self, pushed_constant):
        """Les degrés mixtes de Λ({u1, u2}) ne sont pas atteints depuis Λ(V)."""
        assert is_flabby(pushed_constant)
        assert not ungraded_flabby(pushed_constant)

    def test_flabby_implies_soft(self, pushed_constant):
        assert is_soft(pushed_constant)


@pytest.mark.unit
class TestPushforwardStability:
    """Stabilité par images directes."""

    def test_pushforward_preserves_flabby(self, line3):
        certificate = pushforward_preserves_flabby(line3.maps["j"], line3.sheaves["F"])
        assert certificate.passed, certificate.details
        assert pushforward_preserves_flabby(line3.maps["p"], line3.sheaves["sky"]).passed

    def test_hypothesis_reported(self, line3):
        certificate = pushforward_preserves_flabby(line3.maps["p"], line3.sheaves["k"])
        assert not certificate.passed

    def test_shriek_of_proper_map(self, line3):
        assert shriek_preserves_soft(line3.maps["p"], line3.sheaves["sky"]).passed

    def test_exactness_after_pushforward(self, line3):
        """0 → F_{u-} → F → F_{u+} → 0 sur U reste exacte après j_*."""
        sequence = basic_exact_sequence(line3.sheaves["F"], {"u-"})
        assert sequence.is_exact()
        certificate = pushforward_exactness_check(line3.maps["j"], sequence)
        assert certificate.passed, certificate.details

    def test_basic_sequence_on_line3(self, line3):
        assert basic_exact_sequence(line3.sheaves["k"], {"u-", "u+"}).failures() == []
