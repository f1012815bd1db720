"""
Stratégies hypothesis : ordres finis, espaces gradués et faisceaux construits
à partir des générateurs R_{U_x}⟨−λ⟩.
"""

from hypothesis import strategies as st

from src.graded_sheaf_kit.algebra.base_ring import BaseRing
from src.graded_sheaf_kit.algebra.grading import GradingGroup, GroupHom
from src.graded_sheaf_kit.core.derived import generator_sheaf
from src.graded_sheaf_kit.core.functors import direct_sum_sheaf, extend_by_zero
from src.graded_sheaf_kit.domain.poset import FinitePoset
from src.graded_sheaf_kit.domain.space import GradedSpace, GradedSpaceMap

F2 = BaseRing.prime_field(2)
GRADINGS = (GradingGroup.trivial(), GradingGroup.cyclic(2), GradingGroup.cyclic(3))
NAMES = "abcd"


@st.composite
def posets(draw, max_points: int = 4):
    """Relations i < j tirées dans l'ordre de déclaration (jamais de cycle)."""
    size = draw(st.integers(min_value=1, max_value=max_points))
    points = tuple(NAMES[:size])
    pairs = [(points[i], points[j]) for i in range(size) for j in range(i + 1, size)]
    kept = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return FinitePoset(points, tuple(p for p, keep in zip(pairs, kept) if keep))


@st.composite
def spaces(draw, max_points: int = 4, gradings=GRADINGS, name: str = "X"):
    group = draw(st.sampled_from(gradings))
    return GradedSpace.constant(name, draw(posets(max_points)), group)


@st.composite
def summands(draw, space, ring=F2):
    x = draw(st.sampled_from(space.points))
    degree = draw(st.sampled_from(list(space.lambdas[x].elements())))
    generator = generator_sheaf(space, ring, x, degree)
    subsets = [s for s in space.poset.locally_closed_subsets() if x in s]
    if draw(st.booleans()):
        return generator
    return extend_by_zero(generator, draw(st.sampled_from(subsets)))


@st.composite
def sheaves(draw, space, ring=F2, max_summands: int = 3):
    count = draw(st.integers(min_value=1, max_value=max_summands))
    parts = [draw(summands(space, ring)) for _ in range(count)]
    return direct_sum_sheaf(parts, space, ring, "F")


@st.composite
def monotone_maps(draw, source, target, name: str = "f"):
    """Application croissante ; f♭ identité si les groupes coïncident, nul sinon."""
    images = {}
    for x in source.poset.linear_extension:
        below = [images[w] for w in source.poset.down(x) if w != x]
        candidates = [y for y in target.points if all(target.poset.leq(b, y) for b in below)]
        images[x] = draw(st.sampled_from(candidates))
    flats = {}
    for x in source.points:
        low, high = target.lambdas[images[x]], source.lambdas[x]
        flats[x] = GroupHom.identity(low) if low == high else GroupHom.zero(low, high)
    return GradedSpaceMap(name, source, target, images, flats)
