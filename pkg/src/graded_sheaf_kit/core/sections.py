"""
Sections, tiges et morceaux de degré.

Sur un ouvert U, une section de degré λ ∈ Λ(U) est une famille compatible
(s_z)_{z ∈ U} avec s_z ∈ (F_z)_{λ|z}. Les modules de sections sont calculés
comme noyaux et portent une disposition (PartLayout) indexée par les points,
ce qui permet d'assembler les morphismes canoniques composante par composante.
"""

import logging
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..algebra.graded import GradedMap, GradedModule
from ..algebra.grading import Degree, DegreeWindow, GroupHom
from ..algebra.layout import PartLayout, transport
from ..algebra.matrices import identity, vstack, zeros
from ..algebra.modules import Module, ModuleMap, direct_sum
from ..domain.poset import Point
from ..domain.sheaf import GradedSheaf
from ..errors import InfiniteSupport

logger = logging.getLogger(__name__)

Family = Mapping[Point, Degree]


def fiber_or_raise(
    hom: GroupHom, element: Sequence[int], point: Optional[Point], window: Optional[DegreeWindow] = None
) -> List[Degree]:
    """
    Antécédents de `element` par `hom`.

    Raises:
        InfiniteSupport: Si la fibre est infinie et qu'aucune fenêtre n'est donnée
    """
    if hom.preimage(element) is None:
        return []
    kernel, _ = hom.kernel
    if not kernel.is_finite and window is None:
        logger.warning("Fibre infinie au point %s au-dessus du degré %s", point, tuple(element))
        raise InfiniteSupport(point, element)
    return hom.fiber(element, window)


def candidate_degrees(
    sheaf: GradedSheaf,
    projections: Mapping[Point, GroupHom],
    points: Iterable[Point],
    window: Optional[DegreeWindow] = None,
) -> List[Degree]:
    """
    Degrés λ dont la restriction en l'un des points donnés tombe dans le support de la tige.

    Une section non nulle sur U est non nulle en un point minimal de U : il
    suffit donc de passer les points minimaux.
    """
    found = set()
    for point in points:
        hom = projections[point]
        for degree in sheaf.stalks[point].parts:
            found.update(fiber_or_raise(hom, degree, point, window))
    result = sorted(found)
    logger.debug("Degrés candidats pour %s : %s", sheaf.name, result)
    return result


def restriction_block(sheaf: GradedSheaf, x: Point, y: Point, source: Degree, target: Degree) -> np.ndarray:
    """Bloc (F_x)_source → (F_y)_target de la restriction (nul si les degrés ne se correspondent pas)."""
    restriction = sheaf.restriction(x, y)
    if restriction.target_degree(source) != sheaf.stalks[y].grading.normalize(target):
        return zeros(sheaf.stalks[y].part(target).generators, sheaf.stalks[x].part(source).generators)
    return restriction.block(source)


def section_module(
    sheaf: GradedSheaf,
    subset: Iterable[Point],
    family: Family,
    allowed: Optional[Iterable[Point]] = None,
) -> Tuple[Module, PartLayout]:
    """
    Familles compatibles (s_z) sur un ouvert, s_z de degré family[z], nulles hors de `allowed`.

    Returns:
        Tuple (module des sections, disposition indexée par les points autorisés)
    """
    poset = sheaf.space.poset
    points = poset.sorted_points(frozenset(subset))
    everything = frozenset(points)
    permitted = everything if allowed is None else frozenset(allowed) & everything
    key = (
        "sections",
        everything,
        tuple((p, sheaf.stalks[p].grading.normalize(family[p])) for p in points),
        permitted,
    )
    if key in sheaf._cache:
        return sheaf._cache[key]  # type: ignore[return-value]
    ring = sheaf.ring
    labels = [p for p in points if p in permitted]
    modules = [sheaf.stalks[p].part(family[p]) for p in labels]
    ambient, offsets = direct_sum(modules, ring)
    position = dict(zip(labels, offsets))
    least = poset.least(points) if permitted == everything and points else None
    if least is not None:
        source = sheaf.stalks[least].part(family[least])
        blocks = [restriction_block(sheaf, least, p, family[least], family[p]) for p in labels]
        inclusion = ModuleMap(source, ambient, vstack(blocks, source.generators))
    else:
        edges = poset.covers_within(points)
        targets = [sheaf.stalks[b].part(family[b]) for _, b in edges]
        codomain, rows = direct_sum(targets, ring)
        difference = zeros(codomain.generators, ambient.generators)
        for (a, b), row, target in zip(edges, rows, targets):
            height = target.generators
            if a in permitted:
                start = position[a]
                width = sheaf.stalks[a].part(family[a]).generators
                difference[row : row + height, start : start + width] += restriction_block(
                    sheaf, a, b, family[a], family[b]
                )
            if b in permitted:
                start = position[b]
                difference[row : row + height, start : start + height] -= identity(height)
        inclusion = ModuleMap(ambient, codomain, difference).kernel()
    result = (inclusion.source, PartLayout.sub(labels, modules, inclusion))
    sheaf._cache[key] = result
    return result


def sections_in_degree(sheaf: GradedSheaf, subset: Iterable[Point], degree: Sequence[int]) -> Tuple[Module, PartLayout]:
    """F(U)_λ pour λ ∈ Λ(U)."""
    grading = sheaf.space.open_grading(subset)
    family = {p: grading.restrict(tuple(degree), p) for p in grading.open}
    return section_module(sheaf, grading.open, family)


def sections(sheaf: GradedSheaf, subset: Iterable[Point], window: Optional[DegreeWindow] = None) -> GradedModule:
    """
    F(U) comme module Λ(U)-gradué.

    Raises:
        NotOpenError: Si U n'est pas ouvert
        InfiniteSupport: Si Λ(U) rend l'ensemble des degrés candidats infini sans fenêtre
    """
    grading = sheaf.space.open_grading(subset)
    minimal = sheaf.space.poset.minimal(grading.open)
    parts: Dict[Degree, Module] = {}
    layouts: Dict[Degree, PartLayout] = {}
    for degree in candidate_degrees(sheaf, grading.projections, minimal, window):
        family = {p: grading.restrict(degree, p) for p in grading.open}
        module, layout = section_module(sheaf, grading.open, family)
        parts[degree] = module
        layouts[degree] = layout
    return GradedModule(grading.group, sheaf.ring, parts, layouts)


def section_restriction(
    sheaf: GradedSheaf,
    larger: Iterable[Point],
    smaller: Iterable[Point],
    family: Family,
    allowed: Optional[Iterable[Point]] = None,
    allowed_smaller: Optional[Iterable[Point]] = None,
) -> ModuleMap:
    """Restriction des sections de degré `family` d'un ouvert vers un ouvert plus petit."""
    source, source_layout = section_module(sheaf, larger, family, allowed)
    smaller = frozenset(smaller)
    target, target_layout = section_module(sheaf, smaller, {p: family[p] for p in smaller}, allowed_smaller)
    matrix = transport(
        source_layout,
        target_layout,
        ((p, p, identity(source_layout.module_of(p).generators)) for p in source_layout.labels if p in smaller),
    )
    return ModuleMap(source, target, matrix)


def global_sections(sheaf: GradedSheaf, window: Optional[DegreeWindow] = None) -> GradedModule:
    """Γ(X, F), gradué par Λ(X)."""
    return sections(sheaf, sheaf.space.points, window)


def stalk(sheaf: GradedSheaf, x: Point) -> GradedModule:
    """
    Tige F_x (atteinte sur l'ouvert minimal U_x).

    Raises:
        ValueError: Si le point est inconnu
    """
    return sheaf.stalk(x)


def degree_piece(sheaf: GradedSheaf, degree: Sequence[int]) -> GradedSheaf:
    """
    Faisceau ordinaire F_λ : tige (F_x)_{λ|x}, sur l'espace sous-jacent (Λ ≡ 0).

    Raises:
        ValueError: Si λ n'est pas un élément de Λ(X)
    """
    space = sheaf.space
    grading = space.open_grading(space.points)
    degree = grading.group.normalize(degree)
    underlying = space.underlying()
    trivial = underlying.lambdas
    family = {x: grading.restrict(degree, x) for x in space.points}
    stalks = {
        x: GradedModule(trivial[x], sheaf.ring, {(): sheaf.stalks[x].part(family[x])}) for x in space.points
    }
    restrictions = {
        (x, y): GradedMap(
            stalks[x],
            stalks[y],
            {(): restriction_block(sheaf, x, y, family[x], family[y])},
            underlying.lres[(x, y)],
        )
        for x, y in space.poset.covers
    }
    return GradedSheaf(f"{sheaf.name}_{list(degree)}", underlying, sheaf.ring, stalks, restrictions)


def support(sheaf: GradedSheaf) -> FrozenSet[Point]:
    """Points de tige non nulle."""
    return frozenset(x for x, s in sheaf.stalks.items() if not s.is_zero())
