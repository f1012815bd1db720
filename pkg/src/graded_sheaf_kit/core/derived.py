"""
Calcul dérivé : cohomologie, cônes, résolutions de Godement et plates,
complexes totaux et foncteurs dérivés.

Les foncteurs dérivés sont définis par un choix explicite de résolution :
Godement (flasque, donc molle, et injective sur un corps) pour Rf_*, Rf_!
et RHom ; résolution par les générateurs R_{U_x}⟨−λ⟩ pour ⊗^L. Les
comparaisons sont certifiées par égalité exacte des tables d'invariants des
faisceaux de cohomologie.
"""

from dataclasses import dataclass, field
import logging
from math import gcd
from typing import Callable, Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from ..algebra.base_ring import BaseRing, RingKind
from ..algebra.graded import GradedMap, GradedModule
from ..algebra.grading import Degree, DegreeWindow, format_degree
from ..algebra.layout import PartLayout, assemble, gather, transport
from ..algebra.linear_system import HomSpace
from ..algebra.matrices import hstack, identity, kron, matmul, vstack, zeros
from ..algebra.modules import Module, ModuleMap, direct_sum, homology
from ..domain.complexes import ChainMap, ComplexOfSheaves, Resolution, ResolutionKind
from ..domain.poset import Point
from ..domain.ringed import RModuleSheaf
from ..domain.sheaf import GradedSheaf, SheafMap
from ..domain.space import CartesianSquare, GradedSpace, GradedSpaceMap, is_proper_on
from ..errors import FlatnessUndecided, GradedSheafError, NonFieldBase, NotProperError
from .abelian import homology_sheaf, kernel_sheaf
from .flabby import is_flabby, is_soft
from .functors import (
    block_sheaf_map,
    closed_restriction_map,
    direct_sum_sheaf,
    hom_space,
    inverse_image_gr,
    inverse_image_map,
    map_from_blocks,
    map_to_blocks,
    open_extension_map,
    pushforward_gr,
    pushforward_map,
    sheaf_hom,
    shriek_pushforward_gr,
    summand_injection,
    summand_projection,
    tensor_map,
    tensor_sheaf,
)
from .reports import Certificate, compare_tables, invariant_table, stacked_table
from .sections import fiber_or_raise

logger = logging.getLogger(__name__)

Chain = Tuple[Point, ...]
Position = Tuple[int, int]
Derivable = Union[GradedSheaf, ComplexOfSheaves]


def as_complex(value: Derivable) -> ComplexOfSheaves:
    """Un faisceau est vu comme complexe concentré en degré 0."""
    if isinstance(value, ComplexOfSheaves):
        return value
    return ComplexOfSheaves.single(value)


# Cohomologie


def cohomology(complex_: Derivable) -> Dict[int, GradedSheaf]:
    """H^n = ker d^n / im d^{n−1}, calculé tige par tige."""
    complex_ = as_complex(complex_)
    result = {}
    for n in complex_.degrees:
        result[n] = homology_sheaf(
            complex_.differential(n - 1), complex_.differential(n), f"H^{n}({complex_.name})"
        )
    return result


def cohomology_table(complex_: Derivable) -> pd.DataFrame:
    """Table (n, point, degré, rang, diviseurs) des faisceaux de cohomologie non nuls."""
    return stacked_table({n: invariant_table(h) for n, h in cohomology(complex_).items()})


def is_acyclic(complex_: Derivable) -> bool:
    return all(h.is_zero() for h in cohomology(complex_).values())


def quasi_isomorphic(first: Derivable, second: Derivable) -> bool:
    """Mêmes tables de cohomologie."""
    return compare_tables("quasi-iso", cohomology_table(first), cohomology_table(second)).passed


# Opérations termes à termes


def map_complex(
    complex_: ComplexOfSheaves,
    on_sheaf: Callable[[GradedSheaf], GradedSheaf],
    on_map: Callable[[SheafMap], SheafMap],
    name: str,
    space: Optional[GradedSpace] = None,
) -> ComplexOfSheaves:
    """Applique un foncteur additif terme à terme."""
    terms = {n: on_sheaf(t) for n, t in complex_.terms.items()}
    differentials = {n: on_map(d) for n, d in complex_.differentials.items()}
    target = space or next((t.space for t in terms.values()), complex_.space)
    return ComplexOfSheaves(name, target, complex_.ring, terms, differentials)


def derived_inverse_image(f: GradedSpaceMap, complex_: Derivable) -> ComplexOfSheaves:
    """Lf* = f⁻¹ terme à terme (foncteur exact)."""
    complex_ = as_complex(complex_)
    return map_complex(
        complex_,
        lambda t: inverse_image_gr(f, t),
        lambda d: inverse_image_map(f, d),
        f"{f.name}⁻¹{complex_.name}",
        f.source,
    )


def cone(phi: ChainMap, name: Optional[str] = None) -> ComplexOfSheaves:
    """
    Cône de φ : A → B, de terme A^{n+1} ⊕ B^n et de différentielle
    (a, b) ↦ (−d_A a, φ(a) + d_B b).
    """
    source, target = phi.source, phi.target
    space, ring = target.space, target.ring
    candidates = [n - 1 for n in source.terms] + list(target.terms)
    if not candidates:
        return ComplexOfSheaves.zero(space, ring, name or "cône")
    degrees = range(min(candidates), max(candidates) + 1)
    label = name or f"cône({source.name}→{target.name})"
    terms = {
        n: direct_sum_sheaf([source.term(n + 1), target.term(n)], space, ring, f"{label}^{n}") for n in degrees
    }
    differentials = {}
    for n in degrees:
        if n + 1 not in terms:
            continue
        entries = {
            (0, 0): source.differential(n + 1).scaled(-1),
            (1, 0): phi.component(n + 1),
            (1, 1): target.differential(n),
        }
        differentials[n] = block_sheaf_map(terms[n], terms[n + 1], entries)
    return ComplexOfSheaves(label, space, ring, terms, differentials)


def quasi_isomorphism_certificate(law: str, phi: ChainMap, instance: str = "") -> Certificate:
    """φ est un morphisme de complexes dont le cône est acyclique ; le premier défaut est nommé."""
    certificate = Certificate(law, instance=instance)
    for problem in phi.diagnostics():
        certificate.fail(f"{problem.code} {problem.location}")
    if not certificate.passed:
        return certificate
    for n, h in cohomology(cone(phi)).items():
        for x in h.space.points:
            for d, module in h.stalks[x].parts.items():
                certificate.fail(f"cône non acyclique : H^{n} = {module} en {x}, degré {format_degree(d)}")
                return certificate
    return certificate


# Complexes totaux


@dataclass(frozen=True, eq=False)
class TotalComplex:
    """
    Complexe total d'un complexe double K^{p,q}, de différentielle d_h + (−1)^p d_v.

    Attributes:
        complex: Complexe total
        positions: Pour chaque n, les (p, q) avec p + q = n dans l'ordre des facteurs
        blocks: Termes K^{p,q}
    """

    complex: ComplexOfSheaves
    positions: Mapping[int, Tuple[Position, ...]]
    blocks: Mapping[Position, GradedSheaf] = field(repr=False)

    def injection(self, p: int, q: int) -> SheafMap:
        index = self.positions[p + q].index((p, q))
        return summand_injection(self.complex.term(p + q), self.blocks[(p, q)], index)


def total_complex(
    name: str,
    space: GradedSpace,
    ring: BaseRing,
    blocks: Mapping[Position, GradedSheaf],
    horizontal: Mapping[Position, SheafMap],
    vertical: Mapping[Position, SheafMap],
) -> TotalComplex:
    """
    Args:
        blocks: K^{p,q}
        horizontal: K^{p,q} → K^{p+1,q}
        vertical: K^{p,q} → K^{p,q+1}
    """
    by_degree: Dict[int, List[Position]] = {}
    for p, q in sorted(blocks):
        by_degree.setdefault(p + q, []).append((p, q))
    terms = {
        n: direct_sum_sheaf([blocks[k] for k in keys], space, ring, f"{name}^{n}") for n, keys in by_degree.items()
    }
    differentials = {}
    for n, keys in by_degree.items():
        if n + 1 not in by_degree:
            continue
        targets = {k: i for i, k in enumerate(by_degree[n + 1])}
        entries: Dict[Tuple[int, int], SheafMap] = {}
        for j, (p, q) in enumerate(keys):
            if (p, q) in horizontal and (p + 1, q) in targets:
                entries[(targets[(p + 1, q)], j)] = horizontal[(p, q)]
            if (p, q) in vertical and (p, q + 1) in targets:
                entries[(targets[(p, q + 1)], j)] = vertical[(p, q)].scaled(-1 if p % 2 else 1)
        differentials[n] = block_sheaf_map(terms[n], terms[n + 1], entries)
    positions = {n: tuple(keys) for n, keys in by_degree.items()}
    return TotalComplex(ComplexOfSheaves(name, space, ring, terms, differentials), positions, dict(blocks))


# Résolution de Godement


def godement_term(sheaf: GradedSheaf, n: int, window: Optional[DegreeWindow] = None) -> GradedSheaf:
    """
    G^n(F) = Π_{x_0<…<x_n} (i_{x_0})_* F_{x_n} : en y, composantes étiquetées par
    les chaînes de U_y, de module (F_{x_n})_{ρ_{y,x_n} μ} en degré μ.

    Raises:
        InfiniteSupport: Si une fibre de degrés est infinie sans fenêtre
    """
    key = ("godement", n, window)
    if key in sheaf._cache:
        return sheaf._cache[key]  # type: ignore[return-value]
    space = sheaf.space
    poset = space.poset
    stalks: Dict[Point, GradedModule] = {}
    for y in space.points:
        pieces: Dict[Degree, List[Tuple[Chain, Module]]] = {}
        for chain in poset.chains(poset.up(y), n):
            last = chain[-1]
            hom = space.lambda_restriction(y, last)
            for nu, module in sheaf.stalks[last].parts.items():
                for mu in fiber_or_raise(hom, nu, y, window):
                    pieces.setdefault(mu, []).append((chain, module))
        parts: Dict[Degree, Module] = {}
        layouts: Dict[Degree, PartLayout] = {}
        for mu, components in sorted(pieces.items()):
            layout = PartLayout.direct([c for c, _ in components], [m for _, m in components], sheaf.ring)
            parts[mu], layouts[mu] = layout.part, layout
        stalks[y] = GradedModule(space.lambdas[y], sheaf.ring, parts, layouts)
    restrictions = {}
    for y, z in poset.covers:
        lres = space.lres[(y, z)]
        smaller = poset.up(z)
        blocks = {}
        for mu, layout in stalks[y].layouts.items():
            target_layout = stalks[z].layout(lres.apply(mu))
            if target_layout is None:
                continue
            blocks[mu] = transport(
                layout,
                target_layout,
                (
                    (c, c, identity(layout.module_of(c).generators))
                    for c in layout.labels
                    if c[0] in smaller
                ),
            )
        restrictions[(y, z)] = GradedMap(stalks[y], stalks[z], blocks, lres)
    result = GradedSheaf(f"G^{n}({sheaf.name})", space, sheaf.ring, stalks, restrictions)
    sheaf._cache[key] = result
    return result


def godement_differential(sheaf: GradedSheaf, n: int, window: Optional[DegreeWindow] = None) -> SheafMap:
    """d^n = Σ_i (−1)^i δ_i ; la dernière face applique la restriction x_n → x_{n+1}."""
    key = ("godement_d", n, window)
    if key in sheaf._cache:
        return sheaf._cache[key]  # type: ignore[return-value]
    source, target = godement_term(sheaf, n, window), godement_term(sheaf, n + 1, window)
    space = sheaf.space
    components = {}
    for y in space.points:
        blocks = {}
        for mu, layout in source.stalks[y].layouts.items():
            target_layout = target.stalks[y].layout(mu)
            if target_layout is None:
                continue
            pieces = []
            for chain in target_layout.labels:
                size = target_layout.module_of(chain).generators
                for i in range(n + 2):
                    face = chain[:i] + chain[i + 1 :]
                    sign = -1 if i % 2 else 1
                    if i <= n:
                        pieces.append((face, chain, sign * identity(size)))
                    else:
                        degree = space.lambda_restriction(y, chain[n]).apply(mu)
                        block = sheaf.restriction(chain[n], chain[n + 1]).block(degree)
                        pieces.append((face, chain, sign * block))
            blocks[mu] = transport(layout, target_layout, pieces)
        components[y] = GradedMap(source.stalks[y], target.stalks[y], blocks)
    result = SheafMap(source, target, components)
    sheaf._cache[key] = result
    return result


def godement_augmentation(sheaf: GradedSheaf, window: Optional[DegreeWindow] = None) -> SheafMap:
    """F → G^0(F), f ↦ (ρ_{yx} f)_{x ≥ y}."""
    target = godement_term(sheaf, 0, window)
    components = {}
    for y in sheaf.space.points:
        blocks = {}
        for mu, module in sheaf.stalks[y].parts.items():
            layout = target.stalks[y].layout(mu)
            if layout is None:
                continue
            pieces = [((x,), sheaf.restriction(y, x).block(mu)) for (x,) in layout.labels]
            blocks[mu] = assemble(layout, pieces, module.generators)
        components[y] = GradedMap(sheaf.stalks[y], target.stalks[y], blocks)
    return SheafMap(sheaf, target, components)


def godement_map(phi: SheafMap, n: int, window: Optional[DegreeWindow] = None) -> SheafMap:
    """G^n(φ) : composante c ↦ φ_{x_n} au degré ρ_{y,x_n} μ."""
    if phi.degree is not None:
        raise ValueError(f"Morphisme de degré {phi.degree} : décaler le but au préalable")
    source, target = godement_term(phi.source, n, window), godement_term(phi.target, n, window)
    space = source.space
    components = {}
    for y in space.points:
        blocks = {}
        for mu, layout in source.stalks[y].layouts.items():
            target_layout = target.stalks[y].layout(mu)
            if target_layout is None:
                continue
            pieces = []
            for chain in layout.labels:
                degree = space.lambda_restriction(y, chain[-1]).apply(mu)
                pieces.append((chain, chain, phi.components[chain[-1]].block(degree)))
            blocks[mu] = transport(layout, target_layout, pieces)
        components[y] = GradedMap(source.stalks[y], target.stalks[y], blocks)
    return SheafMap(source, target, components)


def godement_complex(sheaf: GradedSheaf, window: Optional[DegreeWindow] = None) -> ComplexOfSheaves:
    """G^0(F) → G^1(F) → … → G^h(F), h la hauteur de l'ordre."""
    height = sheaf.space.poset.height
    terms = {n: godement_term(sheaf, n, window) for n in range(height + 1)}
    differentials = {n: godement_differential(sheaf, n, window) for n in range(height)}
    return ComplexOfSheaves(f"G({sheaf.name})", sheaf.space, sheaf.ring, terms, differentials)


def _right_kinds(ring: BaseRing) -> FrozenSet[ResolutionKind]:
    kinds = {ResolutionKind.FLABBY, ResolutionKind.SOFT}
    if ring.is_field:
        kinds.add(ResolutionKind.INJECTIVE)
    return frozenset(kinds)


def godement_resolution(sheaf: GradedSheaf, window: Optional[DegreeWindow] = None) -> Resolution:
    """
    Résolution flasque canonique F → G^•(F), injective terme à terme sur un corps.

    Raises:
        InfiniteSupport: Si un terme a un support infini sans fenêtre
    """
    complex_ = godement_complex(sheaf, window)
    resolved = ComplexOfSheaves.single(sheaf)
    augmentation = ChainMap(resolved, complex_, {0: godement_augmentation(sheaf, window)})
    kinds = _right_kinds(sheaf.ring)
    logger.info("Résolution de Godement de %s : %s termes", sheaf.name, len(complex_.terms))
    return Resolution(resolved, complex_, augmentation, {n: kinds for n in complex_.terms}, right=True)


def flabby_resolution(complex_: Derivable, window: Optional[DegreeWindow] = None) -> Resolution:
    """Complexe total de G^q(C^p) : résolution flasque d'un complexe borné."""
    complex_ = as_complex(complex_)
    height = complex_.space.poset.height
    blocks: Dict[Position, GradedSheaf] = {}
    horizontal: Dict[Position, SheafMap] = {}
    vertical: Dict[Position, SheafMap] = {}
    for p, term in complex_.terms.items():
        for q in range(height + 1):
            blocks[(p, q)] = godement_term(term, q, window)
            if p + 1 in complex_.terms:
                horizontal[(p, q)] = godement_map(complex_.differential(p), q, window)
            if q < height:
                vertical[(p, q)] = godement_differential(term, q, window)
    total = total_complex(f"G({complex_.name})", complex_.space, complex_.ring, blocks, horizontal, vertical)
    augmentation = ChainMap(
        complex_,
        total.complex,
        {p: total.injection(p, 0).compose(godement_augmentation(t, window)) for p, t in complex_.terms.items()},
    )
    kinds = _right_kinds(complex_.ring)
    return Resolution(complex_, total.complex, augmentation, {n: kinds for n in total.complex.terms}, right=True)


# Images directes dérivées


def push_complex(
    f: GradedSpaceMap, complex_: ComplexOfSheaves, proper: bool = False, window: Optional[DegreeWindow] = None
) -> ComplexOfSheaves:
    """f_* (ou f_!) terme à terme, sans résolution."""
    functor = shriek_pushforward_gr if proper else pushforward_gr
    symbol = "!" if proper else "*"
    return map_complex(
        complex_,
        lambda t: functor(f, t, window),
        lambda d: pushforward_map(f, d, proper, window),
        f"{f.name}_{symbol}{complex_.name}",
        f.target,
    )


def derived_pushforward(
    f: GradedSpaceMap, complex_: Derivable, window: Optional[DegreeWindow] = None
) -> ComplexOfSheaves:
    """
    Rf_* C = f_* d'une résolution flasque.

    Raises:
        InfiniteSupport: Si un terme a un support infini sans fenêtre
    """
    resolution = flabby_resolution(complex_, window)
    return push_complex(f, resolution.complex, False, window).renamed(f"R{f.name}_*{resolution.resolved.name}")


def derived_shriek_pushforward(
    f: GradedSpaceMap, complex_: Derivable, window: Optional[DegreeWindow] = None
) -> ComplexOfSheaves:
    """Rf_! C = f_! d'une résolution flasque (donc molle)."""
    resolution = flabby_resolution(complex_, window)
    return push_complex(f, resolution.complex, True, window).renamed(f"R{f.name}_!{resolution.resolved.name}")


# Platitude et résolution plate


def is_flat_module(module: Module, ring: BaseRing) -> bool:
    """
    Platitude d'un module de type fini : toujours sur un corps, sans torsion sur Z,
    facteurs Z/d avec pgcd(d, n/d) = 1 sur Z/n.
    """
    if ring.is_field:
        return True
    divisors = module.invariants.divisors
    if ring.kind == RingKind.INTEGERS:
        return not divisors
    n = ring.torsion
    return all(gcd(d, n // d) == 1 for d in divisors)


def flatness_failures(sheaf: GradedSheaf) -> List[Tuple[Point, Degree]]:
    return [
        (x, d)
        for x in sheaf.space.points
        for d, module in sheaf.stalks[x].parts.items()
        if not is_flat_module(module, sheaf.ring)
    ]


def is_stalkwise_flat(sheaf: GradedSheaf) -> bool:
    return not flatness_failures(sheaf)


def generator_sheaf(space: GradedSpace, ring: BaseRing, x: Point, degree: Sequence[int]) -> GradedSheaf:
    """R_{U_x}⟨−λ⟩ : R en degré ρ_{xy} λ aux points y ≥ x, nul ailleurs."""
    opened = space.poset.up(x)
    free = Module.free(ring, 1)
    stalks = {}
    for y in space.points:
        if y in opened:
            stalks[y] = GradedModule.concentrated(space.lambdas[y], free, space.lambda_restriction(x, y).apply(degree))
        else:
            stalks[y] = GradedModule.zero(space.lambdas[y], ring)
    restrictions = {}
    for a, b in space.poset.covers:
        lres = space.lres[(a, b)]
        blocks = {d: identity(1) for d in stalks[a].parts} if a in opened else {}
        restrictions[(a, b)] = GradedMap(stalks[a], stalks[b], blocks, lres)
    name = f"R_{x}⟨-{format_degree(space.lambdas[x].normalize(degree))}⟩"
    return GradedSheaf(name, space, ring, stalks, restrictions)


def generator_cover(sheaf: GradedSheaf) -> SheafMap:
    """
    Surjection ⊕ R_{U_x}⟨−λ⟩ → F, un générateur par élément de F_{x,λ} hors de
    l'image des restrictions venant des points inférieurs.
    """
    space, ring = sheaf.space, sheaf.ring
    generators: List[Tuple[Point, Degree, np.ndarray]] = []
    for x in space.poset.linear_extension:
        for lam, module in sheaf.stalks[x].parts.items():
            images = []
            for w, z in space.poset.covers:
                if z != x:
                    continue
                restriction = sheaf.restrictions[(w, x)]
                images.extend(
                    restriction.block(nu) for nu in sheaf.stalks[w].parts if restriction.target_degree(nu) == lam
                )
            relations = hstack(images, module.generators)
            projection = ModuleMap(Module.free(ring, relations.shape[1]), module, relations).cokernel()
            if projection.target.is_zero():
                continue
            lifts = projection.section()
            generators.extend((x, lam, lifts[:, k : k + 1]) for k in range(lifts.shape[1]))
    summands = [generator_sheaf(space, ring, x, lam) for x, lam, _ in generators]
    total = direct_sum_sheaf(summands, space, ring, f"P({sheaf.name})")
    components = {}
    for y in space.points:
        blocks = {}
        for d, layout in total.stalks[y].layouts.items():
            pieces = []
            for i in layout.labels:
                x, lam, vector = generators[i]
                pieces.append((i, matmul(sheaf.restriction(x, y).block(lam), vector)))
            blocks[d] = gather(layout, pieces, sheaf.stalks[y].part(d).generators)
        components[y] = GradedMap(total.stalks[y], sheaf.stalks[y], blocks)
    logger.debug("Générateurs de %s : %s", sheaf.name, [(x, lam) for x, lam, _ in generators])
    return SheafMap(total, sheaf, components)


def flat_resolution(sheaf: GradedSheaf) -> Resolution:
    """
    Résolution à gauche par des sommes de R_{U_x}⟨−λ⟩, coupée par un noyau après
    hauteur + 1 étapes.

    Raises:
        FlatnessUndecided: Si le noyau de coupure n'est pas plat tige par tige
    """
    height = sheaf.space.poset.height
    terms: Dict[int, GradedSheaf] = {}
    differentials: Dict[int, SheafMap] = {}
    augmentation: Optional[SheafMap] = None
    current, into = sheaf, None
    for step in range(height + 2):
        if current.is_zero():
            break
        if step == height + 1:
            failures = flatness_failures(current)
            if failures:
                raise FlatnessUndecided(*failures[0])
            logger.warning("Résolution plate de %s coupée au noyau %s", sheaf.name, current.name)
            terms[-step] = current
            differentials[-step] = into  # type: ignore[assignment]
            break
        cover = generator_cover(current)
        terms[-step] = cover.source
        if into is None:
            augmentation = cover
        else:
            differentials[-step] = into.compose(cover)
        current, into = kernel_sheaf(cover)
    complex_ = ComplexOfSheaves(f"P({sheaf.name})", sheaf.space, sheaf.ring, terms, differentials)
    resolved = ComplexOfSheaves.single(sheaf)
    components = {0: augmentation} if augmentation is not None else {}
    flat = frozenset({ResolutionKind.FLAT})
    augmentation_map = ChainMap(complex_, resolved, components)
    return Resolution(resolved, complex_, augmentation_map, {n: flat for n in terms}, right=False)


# Produit tensoriel dérivé et Hom dérivé


def _tensor_total(first: ComplexOfSheaves, second: ComplexOfSheaves, name: str) -> ComplexOfSheaves:
    blocks: Dict[Position, GradedSheaf] = {}
    horizontal: Dict[Position, SheafMap] = {}
    vertical: Dict[Position, SheafMap] = {}
    for p, a in first.terms.items():
        for q, b in second.terms.items():
            blocks[(p, q)] = tensor_sheaf(a, b)
            if p + 1 in first.terms:
                horizontal[(p, q)] = tensor_map(first.differential(p), SheafMap.identity(b))
            if q + 1 in second.terms:
                vertical[(p, q)] = tensor_map(SheafMap.identity(a), second.differential(q))
    return total_complex(name, first.space, first.ring, blocks, horizontal, vertical).complex


def _flat_replacement(complex_: ComplexOfSheaves) -> Optional[ComplexOfSheaves]:
    if all(is_stalkwise_flat(t) for t in complex_.terms.values()):
        return complex_
    if len(complex_.terms) == 1:
        (n, term), = complex_.terms.items()
        return flat_resolution(term).complex.shifted(-n)
    return None


def derived_tensor(first: Derivable, second: Derivable) -> ComplexOfSheaves:
    """
    C ⊗^L D par résolution plate d'un des deux facteurs.

    Raises:
        FlatnessUndecided: Si la résolution plate ne se termine pas sur un noyau plat
        GradedSheafError: Si aucun facteur n'est plat ni concentré en un seul degré
    """
    first, second = as_complex(first), as_complex(second)
    name = f"{first.name}⊗^L{second.name}"
    if all(is_stalkwise_flat(t) for t in first.terms.values()):
        return _tensor_total(first, second, name)
    replacement = _flat_replacement(second)
    if replacement is not None:
        return _tensor_total(first, replacement, name)
    replacement = _flat_replacement(first)
    if replacement is not None:
        return _tensor_total(replacement, second, name)
    raise GradedSheafError(f"Aucun facteur de {name} n'admet de résolution plate calculable")


def hom_postcompose(source: GradedSheaf, psi: SheafMap, window: Optional[DegreeWindow] = None) -> SheafMap:
    """Hom(A, ψ) : Hom(A, B) → Hom(A, B'), X ↦ ψ∘X (vec(ψX) = (I ⊗ ψ) vec X)."""
    first, second = sheaf_hom(source, psi.source, window), sheaf_hom(source, psi.target, window)
    space = source.space
    components = {}
    for x in space.points:
        blocks = {}
        for lam, layout in first.stalks[x].layouts.items():
            target_layout = second.stalks[x].layout(lam)
            if target_layout is None:
                continue
            pieces = []
            for z, mu in layout.labels:
                moved = space.lambdas[z].add(mu, space.lambda_restriction(x, z).apply(lam))
                size = source.stalks[z].part(mu).generators
                pieces.append(((z, mu), (z, mu), kron(identity(size), psi.components[z].block(moved))))
            blocks[lam] = transport(layout, target_layout, pieces)
        components[x] = GradedMap(first.stalks[x], second.stalks[x], blocks)
    return SheafMap(first, second, components)


def hom_precompose(phi: SheafMap, target: GradedSheaf, window: Optional[DegreeWindow] = None) -> SheafMap:
    """Hom(φ, B) : Hom(A, B) → Hom(A', B), X ↦ X∘φ (vec(Xφ) = (φᵀ ⊗ I) vec X)."""
    first, second = sheaf_hom(phi.target, target, window), sheaf_hom(phi.source, target, window)
    space = target.space
    components = {}
    for x in space.points:
        blocks = {}
        for lam, layout in first.stalks[x].layouts.items():
            target_layout = second.stalks[x].layout(lam)
            if target_layout is None:
                continue
            pieces = []
            for z, nu in target_layout.labels:
                moved = space.lambdas[z].add(nu, space.lambda_restriction(x, z).apply(lam))
                size = target.stalks[z].part(moved).generators
                block = phi.components[z].block(nu)
                pieces.append(((z, nu), (z, nu), kron(block.T.copy(), identity(size))))
            blocks[lam] = transport(layout, target_layout, pieces)
        components[x] = GradedMap(first.stalks[x], second.stalks[x], blocks)
    return SheafMap(first, second, components)


def require_field(ring: BaseRing) -> None:
    """
    Raises:
        NonFieldBase: Si l'anneau de base n'est pas un corps
    """
    if not ring.is_field:
        raise NonFieldBase(ring)


def derived_hom(first: Derivable, second: Derivable, window: Optional[DegreeWindow] = None) -> ComplexOfSheaves:
    """
    RHom(C, D) = Hom^•(C, G(D)), G(D) la résolution de Godement (injective sur un corps).

    Raises:
        NonFieldBase: Sur un anneau de base qui n'est pas un corps
    """
    first, second = as_complex(first), as_complex(second)
    require_field(first.ring)
    injective = flabby_resolution(second, window).complex
    blocks: Dict[Position, GradedSheaf] = {}
    horizontal: Dict[Position, SheafMap] = {}
    vertical: Dict[Position, SheafMap] = {}
    for p, source in first.terms.items():
        for q, term in injective.terms.items():
            blocks[(-p, q)] = sheaf_hom(source, term, window)
            if p - 1 in first.terms:
                horizontal[(-p, q)] = hom_precompose(first.differential(p - 1), term, window)
            if q + 1 in injective.terms:
                vertical[(-p, q)] = hom_postcompose(source, injective.differential(q), window)
    name = f"RHom({first.name},{second.name})"
    return total_complex(name, first.space, first.ring, blocks, horizontal, vertical).complex


def _hom_summands(source: ComplexOfSheaves, target: ComplexOfSheaves, n: int) -> List[Tuple[int, HomSpace]]:
    return [(p, hom_space(term, target.term(p + n))) for p, term in source.terms.items() if p + n in target.terms]


def hom_complex_differential(source: ComplexOfSheaves, target: ComplexOfSheaves, n: int) -> ModuleMap:
    """Hom^n → Hom^{n+1}, (dφ)_p = d_T ∘ φ_p − (−1)^n φ_{p+1} ∘ d_S."""
    ring = source.ring
    domain = _hom_summands(source, target, n)
    codomain = _hom_summands(source, target, n + 1)
    domain_module, _ = direct_sum([h.module for _, h in domain], ring)
    codomain_module, _ = direct_sum([h.module for _, h in codomain], ring)
    sign = 1 if n % 2 else -1
    columns = []
    for p, space in domain:
        for blocks in space.basis():
            phi = map_from_blocks(source.term(p), target.term(p + n), blocks)
            pieces = []
            for p2, other in codomain:
                if p2 == p:
                    image = target.differential(p + n).compose(phi)
                elif p2 + 1 == p:
                    image = phi.compose(source.differential(p2)).scaled(sign)
                else:
                    image = None
                if image is None:
                    pieces.append(zeros(other.module.generators, 1))
                else:
                    pieces.append(other.encode(map_to_blocks(image)))
            columns.append(vstack(pieces, 1))
    matrix = hstack(columns, codomain_module.generators)
    return ModuleMap(domain_module, codomain_module, ring.reduce(matrix))


def hom_complex_precompose(chain: ChainMap, target: ComplexOfSheaves, n: int) -> ModuleMap:
    """Hom^n(A, T) → Hom^n(A', T), φ ↦ φ∘c pour c : A' → A."""
    ring = target.ring
    domain = _hom_summands(chain.target, target, n)
    codomain = _hom_summands(chain.source, target, n)
    domain_module, _ = direct_sum([h.module for _, h in domain], ring)
    codomain_module, _ = direct_sum([h.module for _, h in codomain], ring)
    columns = []
    for p, space in domain:
        for blocks in space.basis():
            phi = map_from_blocks(chain.target.term(p), target.term(p + n), blocks)
            pieces = []
            for p2, other in codomain:
                if p2 == p:
                    pieces.append(other.encode(map_to_blocks(phi.compose(chain.component(p)))))
                else:
                    pieces.append(zeros(other.module.generators, 1))
            columns.append(vstack(pieces, 1))
    return ModuleMap(domain_module, codomain_module, ring.reduce(hstack(columns, codomain_module.generators)))


def hom_complex_cohomology(source: Derivable, target: Derivable, n: int = 0) -> Module:
    """H^n du complexe des morphismes globaux : morphismes de complexes de degré n modulo homotopie."""
    source, target = as_complex(source), as_complex(target)
    return homology(
        hom_complex_differential(source, target, n - 1), hom_complex_differential(source, target, n)
    ).module


def hom_D(source: Derivable, target: Derivable, window: Optional[DegreeWindow] = None) -> Module:
    """
    Hom_D(A, B) = H^0 Hom^•(A, G(B)).

    Raises:
        NonFieldBase: Sur un anneau de base qui n'est pas un corps
    """
    source = as_complex(source)
    require_field(source.ring)
    return hom_complex_cohomology(source, flabby_resolution(target, window).complex, 0)


# Triangle de base


@dataclass(frozen=True, eq=False)
class DistinguishedTriangle:
    """
    Triangle F_U → F → F_Z → F_U[1] réalisé au niveau des complexes.

    Attributes:
        into: F_U → F
        onto: F → F_Z
        cone: Cône de F_U → F
        comparison: Cône → F_Z, quasi-isomorphisme à certifier
    """

    into: SheafMap
    onto: SheafMap
    cone: ComplexOfSheaves
    comparison: ChainMap

    @property
    def terms(self) -> Tuple[GradedSheaf, GradedSheaf, GradedSheaf]:
        return self.into.source, self.into.target, self.onto.target

    def certificate(self, comparison: Optional[ChainMap] = None) -> Certificate:
        chosen = comparison if comparison is not None else self.comparison
        first, middle, last = self.terms
        certificate = quasi_isomorphism_certificate(
            "basic-triangle", chosen, f"{first.name} → {middle.name} → {last.name}"
        )
        composite = self.onto.compose(self.into)
        if not composite.is_zero():
            certificate.fail("la composée F_U → F → F_Z n'est pas nulle")
        return certificate


def basic_triangle(sheaf: GradedSheaf, subset: Sequence[Point]) -> DistinguishedTriangle:
    """
    R j_! j⁻¹F → F → R i_! i⁻¹F pour U ouvert, Z = X ∖ U ; j_! et i_! sont exacts.

    Raises:
        NotOpenError: Si U n'est pas ouvert
    """
    opened = sheaf.space.poset.require_open(subset)
    closed = frozenset(sheaf.space.points) - opened
    into = open_extension_map(sheaf, opened)
    onto = closed_restriction_map(sheaf, closed)
    first = ChainMap(ComplexOfSheaves.single(into.source), ComplexOfSheaves.single(sheaf), {0: into})
    mapping_cone = cone(first)
    third = ComplexOfSheaves.single(onto.target)
    components = {}
    if 0 in mapping_cone.terms:
        total = mapping_cone.term(0)
        components[0] = onto.compose(summand_projection(total, sheaf, 1))
    comparison = ChainMap(mapping_cone, third, components)
    logger.debug("Triangle de base de %s sur %s", sheaf.name, sorted(opened))
    return DistinguishedTriangle(into, onto, mapping_cone, comparison)


# Vérifications dérivées


def _tables(law: str, left: Derivable, right: Derivable, instance: str) -> Certificate:
    return compare_tables(law, cohomology_table(left), cohomology_table(right), instance)


def projection_formula_check(
    f: GradedSpaceMap, sheaf: GradedSheaf, other: GradedSheaf, window: Optional[DegreeWindow] = None
) -> Certificate:
    """
    (Rf_!F) ⊗^L G ≅ Rf_!(F ⊗^L f⁻¹G), G muni d'une résolution plate finie.

    Raises:
        FlatnessUndecided: Si G n'a pas de résolution plate finie certifiée
    """
    flat_resolution(other)
    left = derived_tensor(derived_shriek_pushforward(f, sheaf, window), other)
    right = derived_shriek_pushforward(f, derived_tensor(sheaf, derived_inverse_image(f, other)), window)
    return _tables("projection-formula", left, right, f"{f.name}, {sheaf.name}, {other.name}")


def derived_base_change_check(
    square: CartesianSquare, value: Union[Derivable, RModuleSheaf], window: Optional[DegreeWindow] = None
) -> Certificate:
    """
    g⁻¹ Rf_! C ≅ Rf̃_! g̃⁻¹ C, pour l'anneau de coefficients constant seulement.

    Raises:
        GradedSheafError: Pour un faisceau de modules sur un anneau non constant
    """
    if isinstance(value, RModuleSheaf):
        if not value.ringed.is_constant():
            raise GradedSheafError(
                f"Changement de base dérivé refusé pour {value.name} : l'énoncé ne s'étend pas "
                "aux espaces annelés (anneau structural non constant)"
            )
        value = value.sheaf
    complex_ = as_complex(value)
    left = derived_inverse_image(square.g, derived_shriek_pushforward(square.f, complex_, window))
    right = derived_shriek_pushforward(square.f_tilde, derived_inverse_image(square.g_tilde, complex_), window)
    return _tables("derived-base-change", left, right, f"{square.f.name}, {square.g.name}, {complex_.name}")


def require_proper(*maps: GradedSpaceMap) -> None:
    """
    Raises:
        NotProperError: Si l'un des morphismes n'est pas propre
    """
    for f in maps:
        if not is_proper_on(f, f.source.points):
            raise NotProperError(f"{f.name} : {f.source.name} → {f.target.name} n'est pas propre")


def composition_identities_check(
    f: GradedSpaceMap,
    g: GradedSpaceMap,
    value: Derivable,
    other: Optional[Derivable] = None,
    window: Optional[DegreeWindow] = None,
) -> List[Certificate]:
    """
    R(g∘f)_* ≅ Rg_* Rf_* et (g∘f)⁻¹ ≅ f⁻¹ g⁻¹ toujours ; R(g∘f)_! ≅ Rg_! Rf_!
    seulement si f et g sont propres, et Rf_* = Rf_! quand f est propre.

    Sur un espace fini tout est quasi-compact : pour j ouvert non fermé, p∘j est
    propre sans que j le soit, et R(p∘j)_! = Rp_* Rj_* ≠ Rp_! Rj_!.
    """
    complex_ = as_complex(value)
    composite = g.compose_after(f)
    instance = f"{f.name}, {g.name}, {complex_.name}"
    certificates = [
        _tables(
            "composition-pushforward",
            derived_pushforward(composite, complex_, window),
            derived_pushforward(g, derived_pushforward(f, complex_, window), window),
            instance,
        ),
    ]
    if is_proper_on(f, f.source.points) and is_proper_on(g, g.source.points):
        certificates.append(
            _tables(
                "composition-shriek",
                derived_shriek_pushforward(composite, complex_, window),
                derived_shriek_pushforward(g, derived_shriek_pushforward(f, complex_, window), window),
                instance,
            )
        )
    else:
        logger.info("composition-shriek non certifiée : %s ou %s n'est pas propre", f.name, g.name)
    below = as_complex(other) if other is not None else ComplexOfSheaves.single(
        GradedSheaf.constant(g.target, complex_.ring)
    )
    certificates.append(
        _tables(
            "composition-inverse",
            derived_inverse_image(composite, below),
            derived_inverse_image(f, derived_inverse_image(g, below)),
            f"{f.name}, {g.name}, {below.name}",
        )
    )
    if is_proper_on(f, f.source.points):
        certificates.append(
            _tables(
                "proper-pushforward",
                derived_pushforward(f, complex_, window),
                derived_shriek_pushforward(f, complex_, window),
                instance,
            )
        )
    return certificates


def derived_adjunction_check(
    f: GradedSpaceMap, value: Derivable, other: Derivable, window: Optional[DegreeWindow] = None
) -> Certificate:
    """Hom_D(Lf* D, C) ≅ Hom_D(D, Rf_* C) pour C sur X et D sur Y (corps de base)."""
    complex_, below = as_complex(value), as_complex(other)
    left = hom_D(derived_inverse_image(f, below), complex_, window)
    right = hom_D(below, derived_pushforward(f, complex_, window), window)
    certificate = Certificate("derived-adjunction", instance=f"{f.name}, {complex_.name}, {below.name}")
    if not left.is_isomorphic(right):
        certificate.fail(f"Hom_D(Lf* D, C) = {left} mais Hom_D(D, Rf_* C) = {right}")
    return certificate


def resolution_certificate(
    resolution: Resolution,
    window: Optional[DegreeWindow] = None,
    augmentation: Optional[ChainMap] = None,
    law: str = "resolution",
) -> Certificate:
    """Augmentation (ou celle fournie) quasi-isomorphe et propriétés annoncées de chaque terme."""
    chosen = augmentation if augmentation is not None else resolution.augmentation
    instance = f"{resolution.resolved.name} → {resolution.complex.name}"
    certificate = quasi_isomorphism_certificate(law, chosen, instance)
    for n, kinds in resolution.term_kinds.items():
        term = resolution.complex.term(n)
        if ResolutionKind.FLABBY in kinds and not is_flabby(term, window):
            certificate.fail(f"terme {n} non flasque")
        if ResolutionKind.SOFT in kinds and not is_soft(term, window):
            certificate.fail(f"terme {n} non mou")
        if ResolutionKind.FLAT in kinds and not is_stalkwise_flat(term):
            certificate.fail(f"terme {n} non plat")
    return certificate
