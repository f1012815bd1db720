"""
Faisceaux flasques et mous, tests de recollement gradué et non gradué.

Les inclusions d'ouverts V ⊂ W se décomposent en retraits successifs d'un
point minimal ; la surjectivité des restrictions se vérifie donc sur les
paires (W, W ∖ {x}) avec x minimal dans W.
"""

import logging
from typing import FrozenSet, Iterable, List, Optional, Tuple

from ..algebra.grading import Degree, DegreeWindow
from ..algebra.matrices import hstack, vstack, zeros
from ..algebra.modules import Module, ModuleMap, direct_sum, homology
from ..domain.poset import Point
from ..domain.sheaf import GradedSheaf
from ..domain.space import GradedSpaceMap
from .abelian import ShortExactSequence
from .functors import pushforward_gr, pushforward_map, shriek_pushforward_gr
from .reports import Certificate
from .sections import candidate_degrees, section_restriction, sections

logger = logging.getLogger(__name__)

Failure = Tuple[FrozenSet[Point], FrozenSet[Point], Degree]


def _restriction_failures(
    sheaf: GradedSheaf, larger: FrozenSet[Point], smaller: FrozenSet[Point], window: Optional[DegreeWindow]
) -> List[Failure]:
    space = sheaf.space
    if not smaller:
        return []
    grading = space.open_grading(larger)
    minimal = space.poset.minimal(smaller)
    failures = []
    for lam in candidate_degrees(sheaf, grading.projections, minimal, window):
        family = {p: grading.restrict(lam, p) for p in larger}
        if not section_restriction(sheaf, larger, smaller, family).is_surjective():
            failures.append((larger, smaller, lam))
    return failures


def flabby_failures(sheaf: GradedSheaf, window: Optional[DegreeWindow] = None) -> List[Failure]:
    """Paires (W, V, λ) où F(W)_λ → F(V)_{λ|V} n'est pas surjective."""
    poset = sheaf.space.poset
    failures: List[Failure] = []
    for opened in poset.opens():
        for x in poset.minimal(opened):
            failures.extend(_restriction_failures(sheaf, opened, opened - {x}, window))
    return failures


def is_flabby(sheaf: GradedSheaf, window: Optional[DegreeWindow] = None) -> bool:
    """
    Toutes les restrictions F(W)_λ → F(V)_{λ|V} sont surjectives.

    Raises:
        InfiniteSupport: Si les degrés à tester sont en nombre infini sans fenêtre
    """
    failures = flabby_failures(sheaf, window)
    if failures:
        logger.debug("%s n'est pas flasque : %s", sheaf.name, failures[0])
    return not failures


def soft_failures(sheaf: GradedSheaf, window: Optional[DegreeWindow] = None) -> List[Failure]:
    """Ouverts U et λ ∈ Λ(X) où Γ(X)_λ → F(U)_{λ|U} n'est pas surjective."""
    everything = frozenset(sheaf.space.points)
    failures: List[Failure] = []
    for opened in sheaf.space.poset.opens():
        if opened and opened != everything:
            failures.extend(_restriction_failures(sheaf, everything, opened, window))
    return failures


def is_soft(sheaf: GradedSheaf, window: Optional[DegreeWindow] = None) -> bool:
    """
    Chaque morceau de degré F_λ est mou : les sections globales se surjectent
    sur les sections au voisinage de tout sous-ensemble (F(K) = F(U_K) sur un
    espace fini, U_K le plus petit ouvert contenant K).
    """
    return not soft_failures(sheaf, window)


# Préfaisceau non gradué sous-jacent


def ungraded_sections(sheaf: GradedSheaf, subset: Iterable[Point]) -> Tuple[Module, List[Tuple[Degree, int]]]:
    """
    F(U) sans graduation : ⊕_λ F(U)_λ (Λ(U) fini).

    Returns:
        Tuple (module, position de chaque partie de degré)
    """
    chosen = frozenset(subset)
    if not chosen:
        return Module.zero(sheaf.ring), []
    graded = sections(sheaf, chosen)
    degrees = list(graded.parts)
    module, offsets = direct_sum([graded.parts[d] for d in degrees], sheaf.ring)
    return module, list(zip(degrees, offsets))


def ungraded_restriction(sheaf: GradedSheaf, larger: Iterable[Point], smaller: Iterable[Point]) -> ModuleMap:
    """Restriction ⊕_λ F(U)_λ → ⊕_μ F(V)_μ."""
    larger, smaller = frozenset(larger), frozenset(smaller)
    source, source_parts = ungraded_sections(sheaf, larger)
    target, target_parts = ungraded_sections(sheaf, smaller)
    matrix = zeros(target.generators, source.generators)
    if not smaller:
        return ModuleMap(source, target, matrix)
    space = sheaf.space
    grading = space.open_grading(larger)
    degree_map = space.restrict_grading(larger, smaller)
    position = dict(target_parts)
    for lam, start in source_parts:
        mu = degree_map.apply(lam)
        if mu not in position:
            continue
        family = {p: grading.restrict(lam, p) for p in larger}
        block = section_restriction(sheaf, larger, smaller, family).matrix
        rows, cols = block.shape
        matrix[position[mu] : position[mu] + rows, start : start + cols] = block
    return ModuleMap(source, target, matrix)


def ungraded_flabby(sheaf: GradedSheaf) -> bool:
    """Le préfaisceau non gradué U ↦ ⊕_λ F(U)_λ est-il flasque ?"""
    poset = sheaf.space.poset
    for opened in poset.opens():
        for x in poset.minimal(opened):
            if not ungraded_restriction(sheaf, opened, opened - {x}).is_surjective():
                return False
    return True


def _gluing_holds(left: ModuleMap, first: ModuleMap, second: ModuleMap) -> bool:
    ring = left.ring
    pair, _ = direct_sum([first.source, second.source], ring)
    into = ModuleMap(left.source, pair, left.matrix)
    difference = ModuleMap(pair, first.target, hstack([first.matrix, -second.matrix], first.target.generators))
    return into.is_injective() and homology(into, difference).module.is_zero()


def ungraded_gluing_holds(sheaf: GradedSheaf, first: Iterable[Point], second: Iterable[Point]) -> bool:
    """Localité et recollement de U ↦ ⊕_λ F(U)_λ pour le recouvrement {U1, U2} de U1 ∪ U2."""
    first, second = frozenset(first), frozenset(second)
    union, overlap = first | second, first & second
    to_first = ungraded_restriction(sheaf, union, first)
    to_second = ungraded_restriction(sheaf, union, second)
    left = ModuleMap(
        to_first.source,
        direct_sum([to_first.target, to_second.target], sheaf.ring)[0],
        vstack([to_first.matrix, to_second.matrix], to_first.source.generators),
    )
    return _gluing_holds(
        left, ungraded_restriction(sheaf, first, overlap), ungraded_restriction(sheaf, second, overlap)
    )


def graded_gluing_holds(sheaf: GradedSheaf, first: Iterable[Point], second: Iterable[Point]) -> bool:
    """Condition de faisceau degré par degré pour λ ∈ Λ(U1 ∪ U2)."""
    first, second = frozenset(first), frozenset(second)
    union, overlap = first | second, first & second
    space = sheaf.space
    grading = space.open_grading(union)
    for lam in candidate_degrees(sheaf, grading.projections, space.poset.minimal(union)):
        family = {p: grading.restrict(lam, p) for p in union}
        to_first = section_restriction(sheaf, union, first, family)
        to_second = section_restriction(sheaf, union, second, family)
        left = ModuleMap(
            to_first.source,
            direct_sum([to_first.target, to_second.target], sheaf.ring)[0],
            vstack([to_first.matrix, to_second.matrix], to_first.source.generators),
        )
        if overlap:
            down_first = section_restriction(sheaf, first, overlap, {p: family[p] for p in first})
            down_second = section_restriction(sheaf, second, overlap, {p: family[p] for p in second})
        else:
            empty = Module.zero(sheaf.ring)
            down_first = ModuleMap.zero(to_first.target, empty)
            down_second = ModuleMap.zero(to_second.target, empty)
        if not _gluing_holds(left, down_first, down_second):
            return False
    return True


# Stabilité par images directes


def pushforward_preserves_flabby(f: GradedSpaceMap, sheaf: GradedSheaf) -> Certificate:
    """F flasque ⇒ f_*F flasque."""
    certificate = Certificate("pushforward-flabby", instance=f"{f.name}, {sheaf.name}")
    if not is_flabby(sheaf):
        return certificate.fail("hypothèse non satisfaite : F n'est pas flasque")
    failures = flabby_failures(pushforward_gr(f, sheaf))
    for larger, smaller, lam in failures:
        certificate.fail(f"restriction {sorted(larger)} → {sorted(smaller)} non surjective en degré {list(lam)}")
    return certificate


def shriek_preserves_soft(f: GradedSpaceMap, sheaf: GradedSheaf) -> Certificate:
    """F mou ⇒ f_!F mou."""
    certificate = Certificate("shriek-soft", instance=f"{f.name}, {sheaf.name}")
    if not is_soft(sheaf):
        return certificate.fail("hypothèse non satisfaite : F n'est pas mou")
    for _, smaller, lam in soft_failures(shriek_pushforward_gr(f, sheaf)):
        certificate.fail(f"sections globales non surjectives sur {sorted(smaller)} en degré {list(lam)}")
    return certificate


def pushforward_exactness_check(f: GradedSpaceMap, sequence: ShortExactSequence, proper: bool = False) -> Certificate:
    """0 → A → B → C → 0 exacte avec A flasque (resp. mou pour f_!) reste exacte après f_* (resp. f_!)."""
    law = "shriek-soft-exact" if proper else "pushforward-flabby-exact"
    first = sequence.inclusion.source
    certificate = Certificate(law, instance=f"{f.name}, {first.name}")
    if not (is_soft(first) if proper else is_flabby(first)):
        return certificate.fail("hypothèse non satisfaite sur le premier terme")
    pushed = ShortExactSequence(
        pushforward_map(f, sequence.inclusion, proper), pushforward_map(f, sequence.projection, proper)
    )
    for problem in pushed.failures():
        certificate.fail(problem)
    return certificate
