"""
Calcul des foncteurs non dérivés sur les faisceaux gradués.

Chaque construction existe sur les objets et sur les morphismes ; les résultats
sont mis en cache sur le faisceau de départ pour que les objets composés
(unités, coünités, triangles) partagent les mêmes tiges.
"""

import logging
from typing import Dict, FrozenSet, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..algebra.base_ring import BaseRing
from ..algebra.graded import (
    GradedMap,
    GradedModule,
    direct_sum_graded,
    graded_tensor,
    graded_tensor_map,
    shift_module,
)
from ..algebra.grading import Degree, DegreeWindow
from ..algebra.layout import PartLayout, assemble, transport
from ..algebra.linear_system import HomSpace, LinearSystem
from ..algebra.matrices import identity
from ..algebra.modules import Module
from ..domain.poset import Point
from ..domain.sheaf import GradedPresheafTable, GradedSheaf, SheafMap
from ..domain.space import GradedSpace, GradedSpaceMap, largest_proper_closed
from ..errors import MismatchError
from .sections import candidate_degrees, fiber_or_raise, section_module, section_restriction, sections

logger = logging.getLogger(__name__)


def _same_space(first: GradedSpace, second: GradedSpace) -> None:
    if first is not second and first.name != second.name:
        raise MismatchError(f"Espaces différents : {first.name} et {second.name}")


def _cached(sheaf: GradedSheaf, key: Hashable, build):  # type: ignore[no-untyped-def]
    if key not in sheaf._cache:
        sheaf._cache[key] = build()
    return sheaf._cache[key]


# Décalage


def shift_sheaf(sheaf: GradedSheaf, degree: Sequence[int]) -> GradedSheaf:
    """F⟨λ⟩ pour λ ∈ Λ(X) : la tige en x est F_x⟨λ|x⟩."""
    space = sheaf.space
    grading = space.open_grading(space.points)
    degree = grading.group.normalize(degree)

    def build() -> GradedSheaf:
        local = {x: grading.restrict(degree, x) for x in space.points}
        stalks = {x: shift_module(sheaf.stalks[x], local[x]) for x in space.points}
        restrictions = {}
        for (x, y), restriction in sheaf.restrictions.items():
            lambdas = space.lambdas[x]
            blocks = {lambdas.sub(d, local[x]): m for d, m in restriction.blocks.items()}
            restrictions[(x, y)] = GradedMap(stalks[x], stalks[y], blocks, space.lres[(x, y)])
        return GradedSheaf(f"{sheaf.name}⟨{','.join(map(str, degree))}⟩", space, sheaf.ring, stalks, restrictions)

    return _cached(sheaf, ("shift", degree), build)


def shift_map(phi: SheafMap, degree: Sequence[int]) -> SheafMap:
    """φ⟨λ⟩."""
    source, target = shift_sheaf(phi.source, degree), shift_sheaf(phi.target, degree)
    space = phi.source.space
    grading = space.open_grading(space.points)
    components = {}
    for x in space.points:
        local = grading.restrict(tuple(degree), x)
        lambdas = space.lambdas[x]
        blocks = {lambdas.sub(d, local): m for d, m in phi.components[x].blocks.items()}
        components[x] = GradedMap(source.stalks[x], target.stalks[x], blocks)
    return SheafMap(source, target, components)


# Produit tensoriel


def tensor_sheaf(first: GradedSheaf, second: GradedSheaf) -> GradedSheaf:
    """
    F ⊗ G, tige par tige (faisceautisé du préfaisceau U ↦ F(U) ⊗ G(U)).

    Raises:
        MismatchError: Si les espaces ou les anneaux diffèrent
    """
    _same_space(first.space, second.space)
    if first.ring != second.ring:
        raise MismatchError(f"Anneaux différents : {first.ring} et {second.ring}")

    def build() -> GradedSheaf:
        stalks = {x: graded_tensor(first.stalks[x], second.stalks[x]) for x in first.space.points}
        restrictions = {
            cover: graded_tensor_map(
                first.restrictions[cover], second.restrictions[cover], stalks[cover[0]], stalks[cover[1]]
            )
            for cover in first.space.poset.covers
        }
        return GradedSheaf(f"{first.name}⊗{second.name}", first.space, first.ring, stalks, restrictions)

    return _cached(first, ("tensor", second), build)


def tensor_map(phi: SheafMap, psi: SheafMap) -> SheafMap:
    """φ ⊗ ψ : F ⊗ G → F' ⊗ G'."""
    source = tensor_sheaf(phi.source, psi.source)
    target = tensor_sheaf(phi.target, psi.target)
    return SheafMap(
        source,
        target,
        {
            x: graded_tensor_map(phi.components[x], psi.components[x], source.stalks[x], target.stalks[x])
            for x in source.space.points
        },
    )


# Image inverse


def inverse_image_gr(f: GradedSpaceMap, sheaf: GradedSheaf) -> GradedSheaf:
    """
    f⁻¹G : en x et degré λ, ⊕ des (G_{f(x)})_μ avec f♭_x(μ) = λ.

    Chaque partie est une somme directe étiquetée par μ.
    """
    _same_space(f.target, sheaf.space)

    def build() -> GradedSheaf:
        space = f.source
        stalks: Dict[Point, GradedModule] = {}
        for x in space.points:
            stalk = sheaf.stalks[f(x)]
            groups: Dict[Degree, List[Degree]] = {}
            for mu in stalk.parts:
                groups.setdefault(f.flats[x].apply(mu), []).append(mu)
            parts: Dict[Degree, Module] = {}
            layouts: Dict[Degree, PartLayout] = {}
            for lam, mus in groups.items():
                layout = PartLayout.direct(mus, [stalk.parts[mu] for mu in mus], sheaf.ring)
                parts[lam], layouts[lam] = layout.part, layout
            stalks[x] = GradedModule(space.lambdas[x], sheaf.ring, parts, layouts)
        restrictions = {}
        for x, y in space.poset.covers:
            below = sheaf.restriction(f(x), f(y))
            lres = space.lres[(x, y)]
            blocks = {}
            for lam, layout in stalks[x].layouts.items():
                target_layout = stalks[y].layout(lres.apply(lam))
                if target_layout is None:
                    continue
                blocks[lam] = transport(
                    layout,
                    target_layout,
                    ((mu, below.target_degree(mu), below.block(mu)) for mu in layout.labels),
                )
            restrictions[(x, y)] = GradedMap(stalks[x], stalks[y], blocks, lres)
        logger.debug("Image inverse de %s par %s", sheaf.name, f.name)
        return GradedSheaf(f"{f.name}⁻¹{sheaf.name}", space, sheaf.ring, stalks, restrictions)

    return _cached(sheaf, ("inverse", f), build)


def inverse_image_map(f: GradedSpaceMap, psi: SheafMap) -> SheafMap:
    """f⁻¹ψ."""
    source, target = inverse_image_gr(f, psi.source), inverse_image_gr(f, psi.target)
    components = {}
    for x in f.source.points:
        below = psi.components[f(x)]
        blocks = {}
        for lam, layout in source.stalks[x].layouts.items():
            target_layout = target.stalks[x].layout(lam)
            if target_layout is None:
                continue
            blocks[lam] = transport(layout, target_layout, ((mu, mu, below.block(mu)) for mu in layout.labels))
        components[x] = GradedMap(source.stalks[x], target.stalks[x], blocks)
    return SheafMap(source, target, components)


def restrict_to_open(sheaf: GradedSheaf, subset: Iterable[Point]) -> GradedSheaf:
    """F|_U sur le sous-espace ouvert U."""
    opened = sheaf.space.poset.require_open(subset)
    return inverse_image_gr(GradedSpaceMap.inclusion(sheaf.space, opened), sheaf)


# Images directes


def pushforward_family(f: GradedSpaceMap, y: Point, degree: Sequence[int]) -> Dict[Point, Degree]:
    """Degrés x ↦ f♭_x ρ_{y,f(x)}(μ) sur f⁻¹(U_y)."""
    opened = f.target.poset.up(y)
    return {x: f.pulled_projection(y, x).apply(degree) for x in f.preimage(opened)}


def _pushforward_stalk(
    f: GradedSpaceMap, sheaf: GradedSheaf, y: Point, proper: bool, window: Optional[DegreeWindow]
) -> GradedModule:
    opened = f.target.poset.up(y)
    preimage = f.preimage(opened)
    grading = f.target.lambdas[y]
    if not preimage:
        return GradedModule.zero(grading, sheaf.ring)
    allowed = largest_proper_closed(f, preimage, opened) if proper else None
    projections = {x: f.pulled_projection(y, x) for x in preimage}
    minimal = f.source.poset.minimal(preimage)
    parts: Dict[Degree, Module] = {}
    layouts: Dict[Degree, PartLayout] = {}
    for mu in candidate_degrees(sheaf, projections, minimal, window):
        family = {x: projections[x].apply(mu) for x in preimage}
        module, layout = section_module(sheaf, preimage, family, allowed)
        parts[mu], layouts[mu] = module, layout
    return GradedModule(grading, sheaf.ring, parts, layouts)


def _pushforward(
    f: GradedSpaceMap, sheaf: GradedSheaf, proper: bool, window: Optional[DegreeWindow]
) -> GradedSheaf:
    _same_space(f.source, sheaf.space)

    def build() -> GradedSheaf:
        space = f.target
        stalks = {y: _pushforward_stalk(f, sheaf, y, proper, window) for y in space.points}
        restrictions = {}
        for y, w in space.poset.covers:
            lres = space.lres[(y, w)]
            blocks = {}
            for mu, layout in stalks[y].layouts.items():
                target_layout = stalks[w].layout(lres.apply(mu))
                if target_layout is None:
                    continue
                blocks[mu] = transport(
                    layout,
                    target_layout,
                    ((x, x, identity(layout.module_of(x).generators)) for x in layout.labels),
                )
            restrictions[(y, w)] = GradedMap(stalks[y], stalks[w], blocks, lres)
        symbol = "!" if proper else "*"
        logger.info("Image directe %s_%s de %s calculée", f.name, symbol, sheaf.name)
        return GradedSheaf(f"{f.name}_{symbol}{sheaf.name}", space, sheaf.ring, stalks, restrictions)

    return _cached(sheaf, ("push", f, proper, window), build)


def pushforward_gr(f: GradedSpaceMap, sheaf: GradedSheaf, window: Optional[DegreeWindow] = None) -> GradedSheaf:
    """
    f_{gr,*}F : en y et degré μ, sections de F sur f⁻¹(U_y) de degré f♭(μ).

    Raises:
        InfiniteSupport: Si une tige de Λ_Y rend le support infini sans fenêtre
    """
    return _pushforward(f, sheaf, False, window)


def shriek_pushforward_gr(
    f: GradedSpaceMap, sheaf: GradedSheaf, window: Optional[DegreeWindow] = None
) -> GradedSheaf:
    """
    f_{gr,!}F : sections dont le support est propre au-dessus de U_y.

    Raises:
        InfiniteSupport: Comme pour pushforward_gr
    """
    return _pushforward(f, sheaf, True, window)


def pushforward_map(
    f: GradedSpaceMap, phi: SheafMap, proper: bool = False, window: Optional[DegreeWindow] = None
) -> SheafMap:
    """f_*φ (ou f_!φ)."""
    source = _pushforward(f, phi.source, proper, window)
    target = _pushforward(f, phi.target, proper, window)
    components = {}
    for y in f.target.points:
        blocks = {}
        for mu, layout in source.stalks[y].layouts.items():
            target_layout = target.stalks[y].layout(mu)
            if target_layout is None:
                continue
            family = pushforward_family(f, y, mu)
            blocks[mu] = transport(
                layout,
                target_layout,
                ((x, x, phi.components[x].block(family[x])) for x in layout.labels),
            )
        components[y] = GradedMap(source.stalks[y], target.stalks[y], blocks)
    return SheafMap(source, target, components)


# Prolongement par zéro


def extend_by_zero(sheaf: GradedSheaf, subset: Iterable[Point]) -> GradedSheaf:
    """
    F_Y pour Y localement fermé : F sur Y, nul ailleurs.

    Raises:
        NotLocallyClosedError: Si Y n'est pas localement fermé
    """
    space = sheaf.space
    chosen = space.poset.require_locally_closed(subset) if subset else frozenset()

    def build() -> GradedSheaf:
        stalks = {x: sheaf.stalks[x] for x in chosen}
        restrictions = {c: r for c, r in sheaf.restrictions.items() if c[0] in chosen and c[1] in chosen}
        label = "".join(sorted(chosen)) or "∅"
        return GradedSheaf(f"{sheaf.name}_{{{label}}}", space, sheaf.ring, stalks, restrictions)

    return _cached(sheaf, ("extend", chosen), build)


def extend_by_zero_map(phi: SheafMap, subset: Iterable[Point]) -> SheafMap:
    chosen = frozenset(subset)
    source, target = extend_by_zero(phi.source, chosen), extend_by_zero(phi.target, chosen)
    return SheafMap(source, target, {x: phi.components[x] for x in chosen})


def open_extension_map(sheaf: GradedSheaf, subset: Iterable[Point]) -> SheafMap:
    """F_U → F pour U ouvert (identité sur U)."""
    opened = sheaf.space.poset.require_open(subset)
    part = extend_by_zero(sheaf, opened)
    return SheafMap(part, sheaf, {x: GradedMap.identity(sheaf.stalks[x]) for x in opened})


def closed_restriction_map(sheaf: GradedSheaf, subset: Iterable[Point]) -> SheafMap:
    """F → F_Z pour Z fermé (identité sur Z)."""
    closed = frozenset(subset)
    if not sheaf.space.poset.is_closed(closed):
        raise ValueError(f"Sous-ensemble non fermé : {sorted(closed)}")
    part = extend_by_zero(sheaf, closed)
    return SheafMap(sheaf, part, {x: GradedMap.identity(sheaf.stalks[x]) for x in closed})


# Transformations naturelles et Hom interne


def natural_system(
    source: GradedSheaf,
    target: GradedSheaf,
    points: Sequence[Point],
    shifts: Optional[Mapping[Point, Degree]] = None,
) -> LinearSystem:
    """
    Système des transformations naturelles F|_U → G|_U, de décalage shifts[z] en chaque point.

    Les inconnues sont étiquetées (z, μ) : bloc F_{z,μ} → G_{z,μ+shifts[z]}.
    """
    poset = source.space.poset

    def moved(z: Point, degree: Degree) -> Degree:
        if not shifts:
            return degree
        return source.space.lambdas[z].add(degree, shifts[z])

    system = LinearSystem(source.ring)
    for z in points:
        for mu, module in source.stalks[z].parts.items():
            system.add_unknown((z, mu), module, target.stalks[z].part(moved(z, mu)))
    for a, b in poset.covers_within(points):
        upper, lower = target.restrictions[(a, b)], source.restrictions[(a, b)]
        for mu, module in source.stalks[a].parts.items():
            nu = lower.target_degree(mu)
            image = target.stalks[b].part(moved(b, nu))
            system.add_equation(
                image,
                module.generators,
                [
                    ((a, mu), upper.block(moved(a, mu)), identity(module.generators)),
                    ((b, nu), -identity(image.generators), lower.block(mu)),
                ],
            )
    return system


def natural_maps(
    source: GradedSheaf,
    target: GradedSheaf,
    subset: Optional[Iterable[Point]] = None,
    shifts: Optional[Mapping[Point, Degree]] = None,
) -> HomSpace:
    """Solutions du système des transformations naturelles sur U (tout X par défaut)."""
    _same_space(source.space, target.space)
    points = source.space.poset.sorted_points(source.space.points if subset is None else subset)
    shift_key = tuple(sorted(shifts.items())) if shifts else ()
    key = ("nat", target, frozenset(points), shift_key)
    if key in source._cache:
        return source._cache[key]  # type: ignore[return-value]
    space = natural_system(source, target, points, shifts).solve()
    source._cache[key] = space
    return space


def global_shifts(space: GradedSpace, degree: Optional[Sequence[int]]) -> Optional[Dict[Point, Degree]]:
    if degree is None:
        return None
    grading = space.open_grading(space.points)
    return {x: grading.restrict(tuple(degree), x) for x in space.points}


def hom_space(source: GradedSheaf, target: GradedSheaf, degree: Optional[Sequence[int]] = None) -> HomSpace:
    """Hom(F, G⟨λ⟩) : morphismes globaux de degré λ."""
    return natural_maps(source, target, None, global_shifts(source.space, degree))


def map_from_blocks(
    source: GradedSheaf,
    target: GradedSheaf,
    blocks: Mapping[Hashable, np.ndarray],
    degree: Optional[Sequence[int]] = None,
) -> SheafMap:
    """Morphisme de faisceaux à partir des blocs (z, μ) d'une solution."""
    shifts = global_shifts(source.space, degree)
    components = {}
    for x in source.space.points:
        local = {mu: m for (z, mu), m in blocks.items() if z == x}
        components[x] = GradedMap(
            source.stalks[x], target.stalks[x], local, None, shifts[x] if shifts else None
        )
    return SheafMap(source, target, components, None if degree is None else tuple(degree))


def map_to_blocks(phi: SheafMap) -> Dict[Hashable, np.ndarray]:
    return {(x, mu): c.block(mu) for x, c in phi.components.items() for mu in c.source.parts}


def hom_basis(source: GradedSheaf, target: GradedSheaf, degree: Optional[Sequence[int]] = None) -> List[SheafMap]:
    space = hom_space(source, target, degree)
    return [map_from_blocks(source, target, blocks, degree) for blocks in space.basis()]


def hom_candidates(
    source: GradedSheaf, target: GradedSheaf, x: Point, window: Optional[DegreeWindow]
) -> List[Degree]:
    space = source.space
    found = set()
    for z in space.poset.up(x):
        lambdas = space.lambdas[z]
        hom = space.lambda_restriction(x, z)
        for mu in source.stalks[z].parts:
            for nu in target.stalks[z].parts:
                found.update(fiber_or_raise(hom, lambdas.sub(nu, mu), z, window))
    return sorted(found)


def sheaf_hom(source: GradedSheaf, target: GradedSheaf, window: Optional[DegreeWindow] = None) -> GradedSheaf:
    """
    Hom interne : en x, le module Λ_x-gradué des transformations naturelles sur U_x.

    Raises:
        InfiniteSupport: Si Λ_x est infini et que le Hom peut être non nul en une infinité de degrés
    """
    _same_space(source.space, target.space)

    def build() -> GradedSheaf:
        space = source.space
        stalks: Dict[Point, GradedModule] = {}
        for x in space.points:
            opened = space.poset.up(x)
            parts: Dict[Degree, Module] = {}
            layouts: Dict[Degree, PartLayout] = {}
            for lam in hom_candidates(source, target, x, window):
                shifts = {z: space.lambda_restriction(x, z).apply(lam) for z in opened}
                nat = natural_maps(source, target, opened, shifts)
                if not nat.module.is_zero():
                    parts[lam], layouts[lam] = nat.module, nat.layout()
            stalks[x] = GradedModule(space.lambdas[x], source.ring, parts, layouts)
        restrictions = {}
        for x, y in space.poset.covers:
            lres = space.lres[(x, y)]
            smaller = space.poset.up(y)
            blocks = {}
            for lam, layout in stalks[x].layouts.items():
                target_layout = stalks[y].layout(lres.apply(lam))
                if target_layout is None:
                    continue
                blocks[lam] = transport(
                    layout,
                    target_layout,
                    (
                        (label, label, identity(layout.module_of(label).generators))
                        for label in layout.labels
                        if label[0] in smaller
                    ),
                )
            restrictions[(x, y)] = GradedMap(stalks[x], stalks[y], blocks, lres)
        return GradedSheaf(f"Hom({source.name},{target.name})", space, source.ring, stalks, restrictions)

    return _cached(source, ("hom", target, window), build)


def hom_stalk_space(source: GradedSheaf, target: GradedSheaf, x: Point, degree: Sequence[int]) -> HomSpace:
    """Espace des transformations naturelles sur U_x calculant Hom(F, G)_{x,λ}."""
    space = source.space
    opened = space.poset.up(x)
    shifts = {z: space.lambda_restriction(x, z).apply(degree) for z in opened}
    return natural_maps(source, target, opened, shifts)


# Préfaisceaux tabulés


def presheaf_table(sheaf: GradedSheaf) -> GradedPresheafTable:
    """Tabulation U ↦ F(U) sur les ouverts non vides."""
    space = sheaf.space
    opens = [u for u in space.poset.opens() if u]
    values = {u: sections(sheaf, u) for u in opens}
    restrictions = {}
    for u in opens:
        grading = space.open_grading(u)
        for v in opens:
            if not v < u:
                continue
            degree_map = space.restrict_grading(u, v)
            blocks = {}
            for lam in values[u].parts:
                family = {p: grading.restrict(lam, p) for p in u}
                blocks[lam] = section_restriction(sheaf, u, v, family).matrix
            restrictions[(u, v)] = GradedMap(values[u], values[v], blocks, degree_map)
    return GradedPresheafTable(space, sheaf.ring, values, restrictions)


def tensor_presheaf(first: GradedSheaf, second: GradedSheaf) -> GradedPresheafTable:
    """Préfaisceau U ↦ F(U) ⊗ G(U), avant faisceautisation."""
    left, right = presheaf_table(first), presheaf_table(second)
    values = {u: graded_tensor(left.value(u), right.value(u)) for u in left.values}
    restrictions = {
        (u, v): graded_tensor_map(left.restriction(u, v), right.restriction(u, v), values[u], values[v])
        for (u, v) in left.restrictions
    }
    return GradedPresheafTable(first.space, first.ring, values, restrictions)


def sheafify(table: GradedPresheafTable, name: str = "P") -> Tuple[GradedSheaf, Dict[FrozenSet[Point], GradedMap]]:
    """
    Faisceau associé : mêmes tiges que le préfaisceau (valeurs sur les U_x).

    Returns:
        Tuple (faisceau, unité P(U) → F(U) pour chaque ouvert tabulé)
    """
    space = table.space
    poset = space.poset
    stalks = {}
    for x in space.points:
        value = table.value(poset.up(x))
        stalks[x] = GradedModule(space.lambdas[x], table.ring, value.parts, value.layouts)
    restrictions = {
        (x, y): GradedMap(
            stalks[x], stalks[y], table.restriction(poset.up(x), poset.up(y)).blocks, space.lres[(x, y)]
        )
        for x, y in poset.covers
    }
    sheaf = GradedSheaf(f"{name}^+", space, table.ring, stalks, restrictions)
    unit: Dict[FrozenSet[Point], GradedMap] = {}
    for u, value in table.values.items():
        target = sections(sheaf, u)
        blocks = {}
        for lam, module in value.parts.items():
            layout = target.layout(lam)
            if layout is None:
                continue
            pieces = [
                (z, table.restriction(u, poset.up(z)).block(lam)) for z in poset.sorted_points(u)
            ]
            blocks[lam] = assemble(layout, pieces, module.generators)
        unit[u] = GradedMap(value, target, blocks)
    logger.info("Faisceautisation de %s : %s ouverts", name, len(table.values))
    return sheaf, unit


# Sommes directes


def direct_sum_sheaf(
    summands: Sequence[GradedSheaf], space: GradedSpace, ring: BaseRing, name: Optional[str] = None
) -> GradedSheaf:
    """⊕ F_i ; chaque partie de tige est étiquetée par l'indice du facteur."""
    stalks = {x: direct_sum_graded([s.stalks[x] for s in summands], space.lambdas[x], ring) for x in space.points}
    restrictions = {}
    for x, y in space.poset.covers:
        lres = space.lres[(x, y)]
        blocks = {}
        for d, layout in stalks[x].layouts.items():
            target_layout = stalks[y].layout(lres.apply(d))
            if target_layout is None:
                continue
            blocks[d] = transport(
                layout,
                target_layout,
                ((i, i, summands[i].restrictions[(x, y)].block(d)) for i in layout.labels),
            )
        restrictions[(x, y)] = GradedMap(stalks[x], stalks[y], blocks, lres)
    label = name or "⊕".join(s.name for s in summands) or "0"
    return GradedSheaf(label, space, ring, stalks, restrictions)


def block_sheaf_map(
    source: GradedSheaf, target: GradedSheaf, entries: Mapping[Tuple[int, int], SheafMap]
) -> SheafMap:
    """
    Morphisme entre sommes directes donné par ses entrées (i, j) : F_j → G_i.

    La source et le but doivent provenir de direct_sum_sheaf.
    """
    components = {}
    for x in source.space.points:
        blocks = {}
        for d, layout in source.stalks[x].layouts.items():
            target_layout = target.stalks[x].layout(d)
            if target_layout is None:
                continue
            blocks[d] = transport(
                layout,
                target_layout,
                ((j, i, entry.components[x].block(d)) for (i, j), entry in entries.items()),
            )
        components[x] = GradedMap(source.stalks[x], target.stalks[x], blocks)
    return SheafMap(source, target, components)


def summand_injection(total: GradedSheaf, summand: GradedSheaf, index: int) -> SheafMap:
    components = {}
    for x in total.space.points:
        blocks = {}
        for d, module in summand.stalks[x].parts.items():
            layout = total.stalks[x].layout(d)
            if layout is not None:
                blocks[d] = assemble(layout, [(index, identity(module.generators))], module.generators)
        components[x] = GradedMap(summand.stalks[x], total.stalks[x], blocks)
    return SheafMap(summand, total, components)


def summand_projection(total: GradedSheaf, summand: GradedSheaf, index: int) -> SheafMap:
    components = {}
    for x in total.space.points:
        blocks = {}
        for d, layout in total.stalks[x].layouts.items():
            if index in layout:
                blocks[d] = layout.component(index)
        components[x] = GradedMap(total.stalks[x], summand.stalks[x], blocks)
    return SheafMap(total, summand, components)
