"""
Dualité : dimension cohomologique, représentabilité, f^!, complexes dualisants.

f^! est calculé sur les générateurs T = R_{U_x}⟨−λ⟩ :

    (f^!G)_{x,λ} = Hom^•(f_! G^•(T), I)

avec G^•(T) la résolution de Godement de T (flasque, donc f_!-acyclique) et
I une résolution de Godement de G (injective sur un corps). Les restrictions
viennent des inclusions R_{U_y}⟨−ρ_{xy}λ⟩ → R_{U_x}⟨−λ⟩. Toute cette couche
exige un corps de base et des groupes de degrés finis.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
import logging
from typing import Dict, List, Optional, Sequence, Tuple, Union

from ..algebra.base_ring import BaseRing
from ..algebra.graded import GradedMap, GradedModule, shift_module
from ..algebra.grading import Degree, DegreeWindow, GroupHom, format_degree
from ..algebra.matrices import hstack, identity
from ..algebra.modules import Module, ModuleMap
from ..domain.complexes import ChainMap, ComplexOfSheaves, Resolution, ResolutionKind
from ..domain.poset import Point
from ..domain.ringed import RingedGradedSpace
from ..domain.sheaf import GradedSheaf, SheafMap
from ..domain.space import GradedSpace, GradedSpaceMap
from ..errors import FlatnessUndecided, GradedSheafError, InfiniteSupport
from .abelian import cokernel_sheaf, is_exact_pair, is_injective, is_surjective
from .derived import (
    Derivable,
    as_complex,
    cohomology,
    cohomology_table,
    derived_hom,
    derived_inverse_image,
    derived_pushforward,
    derived_shriek_pushforward,
    flabby_resolution,
    flatness_failures,
    generator_sheaf,
    godement_complex,
    godement_map,
    godement_resolution,
    hom_complex_cohomology,
    hom_complex_differential,
    hom_complex_precompose,
    hom_D,
    map_complex,
    push_complex,
    pushforward_map,
    require_field,
    require_proper,
)
from .flabby import is_flabby, is_soft
from .functors import (
    extend_by_zero,
    hom_space,
    map_from_blocks,
    map_to_blocks,
    open_extension_map,
    pushforward_gr,
    shift_sheaf,
    shriek_pushforward_gr,
    tensor_map,
    tensor_sheaf,
)
from .reports import Certificate, compare_tables, invariant_table
from .sections import degree_piece, global_sections

logger = logging.getLogger(__name__)


def _require_finite(space: GradedSpace) -> None:
    """
    Raises:
        InfiniteSupport: Si un groupe de degrés est infini
    """
    for x in space.points:
        if not space.lambdas[x].is_finite:
            raise InfiniteSupport(x, None, f"la dualité demande des groupes de degrés finis ({space.lambdas[x]})")


# Configuration


@dataclass(frozen=True, eq=False)
class DualityConfig:
    """
    Corps de base et complexe dualisant ω_k du point.

    Attributes:
        base_field: Corps de base k
        dualizing: ω_k (k en degré 0 par défaut)
        window: Fenêtre de degrés transmise aux constructions
    """

    base_field: BaseRing
    dualizing: Optional[ComplexOfSheaves] = None
    window: Optional[DegreeWindow] = None
    point: GradedSpace = field(default_factory=GradedSpace.point)

    def __post_init__(self) -> None:
        require_field(self.base_field)
        if self.dualizing is None:
            base = GradedSheaf.constant(self.point, self.base_field, name="ω_k")
            object.__setattr__(self, "dualizing", ComplexOfSheaves.single(base))
        complex_ = self.dualizing
        if len(complex_.space.points) != 1:
            raise ValueError(f"ω_k doit vivre sur un point : {complex_.space.name}")
        if complex_.ring != self.base_field:
            raise ValueError(f"ω_k n'est pas défini sur {self.base_field} : {complex_.ring}")
        object.__setattr__(self, "point", complex_.space)

    @property
    def base(self) -> ComplexOfSheaves:
        return self.dualizing  # type: ignore[return-value]

    def certificate(self) -> Certificate:
        """k → RHom(ω_k, ω_k) quasi-isomorphe (injectivité finie automatique sur un point)."""
        unit = GradedSheaf.constant(self.point, self.base_field)
        return compare_tables(
            "dualizing-base",
            cohomology_table(derived_hom(self.base, self.base, self.window)),
            cohomology_table(unit),
            self.base.name,
        )


# Dimension cohomologique


def global_cohomology(sheaf: GradedSheaf, window: Optional[DegreeWindow] = None) -> Dict[int, GradedModule]:
    """H^n(X, F) = H^n Γ(X, G^•F), gradué par Λ(X) ; Γ_c = Γ sur un espace fini."""
    resolution = godement_complex(sheaf, window)
    space = sheaf.space
    grading = space.open_grading(space.points)
    degrees = sorted({d for term in resolution.terms.values() for d in global_sections(term, window).parts})
    unit = GradedSheaf.constant(space, sheaf.ring)
    result: Dict[int, GradedModule] = {}
    for n in resolution.terms:
        parts = {}
        for degree in degrees:
            source = shift_sheaf(unit, grading.group.neg(degree))
            module = hom_complex_cohomology(source, resolution, n)
            if not module.is_zero():
                parts[degree] = module
        result[n] = GradedModule(grading.group, sheaf.ring, parts)
    return result


def generator_sheaves(space: GradedSpace, ring: BaseRing) -> List[GradedSheaf]:
    """k_X, les R_{U_x} et les gratte-ciel k_{x} prolongés par zéro."""
    constant = GradedSheaf.constant(space, ring)
    sheaves = [constant]
    for x in space.points:
        sheaves.append(generator_sheaf(space, ring, x, space.lambdas[x].zero()))
        sheaves.append(extend_by_zero(constant, [x]))
    return sheaves


def cohomological_dimension(
    space: GradedSpace, ring: Optional[BaseRing] = None, window: Optional[DegreeWindow] = None
) -> int:
    """
    Plus petit n tel que H^k Γ_c s'annule pour k > n sur les faisceaux de test.

    Raises:
        GradedSheafError: Si la borne par la longueur des chaînes est dépassée
    """
    ring = ring or BaseRing.prime_field(2)
    found = 0
    for sheaf in generator_sheaves(space, ring):
        for n, module in global_cohomology(sheaf, window).items():
            if not module.is_zero():
                found = max(found, n)
    if found > space.poset.height:
        raise GradedSheafError(f"Dimension cohomologique {found} au-delà de la hauteur {space.poset.height}")
    logger.debug("Dimension cohomologique de %s : %s", space.name, found)
    return found


def soft_sequence_check(maps: Sequence[SheafMap], window: Optional[DegreeWindow] = None) -> bool:
    """
    0 → F_0 → … → F_{n+1} → 0 exacte, F_0…F_n mous et dim X ≤ n : F_{n+1} est mou.

    Raises:
        GradedSheafError: Si la suite n'est pas exacte, trop courte pour la dimension de X,
            ou si l'un des n + 1 premiers termes n'est pas mou
    """
    if not maps:
        raise GradedSheafError("Suite vide : au moins deux faisceaux sont nécessaires")
    n = len(maps) - 1
    space = maps[0].source.space
    exact = is_injective(maps[0]) and is_surjective(maps[-1])
    exact = exact and all(is_exact_pair(a, b) for a, b in zip(maps, maps[1:]))
    if not exact:
        raise GradedSheafError("Suite non exacte")
    dimension = cohomological_dimension(space, maps[0].source.ring, window)
    if dimension > n:
        raise GradedSheafError(f"Suite trop courte : {n + 2} termes pour une dimension {dimension}")
    terms = [phi.source for phi in maps]
    failing = [t.name for t in terms if not is_soft(t, window)]
    if failing:
        raise GradedSheafError(f"Termes non mous : {failing}")
    return is_soft(maps[-1].target, window)


# Générateurs


@dataclass(eq=False)
class GeneratorFamily:
    """
    Générateurs R_{U_x}⟨−λ⟩ (R constant ou anneau structural) et leurs inclusions.

    Les objets sont mis en cache pour que les foncteurs appliqués (Godement,
    images directes) partagent leurs caches.
    """

    space: GradedSpace
    ring: BaseRing
    ringed: Optional[RingedGradedSpace] = None
    _built: Dict[Tuple[Point, Degree], GradedSheaf] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        if self.ringed is not None and self.ringed.space.name != self.space.name:
            raise ValueError(f"Anneau structural sur un autre espace : {self.ringed.space.name}")

    @property
    def structure(self) -> GradedSheaf:
        if self.ringed is not None:
            return self.ringed.structure_sheaf()
        return GradedSheaf.constant(self.space, self.ring, name="R")

    def degrees(self, x: Point) -> List[Degree]:
        return list(self.space.lambdas[x].elements())

    def sheaf(self, x: Point, degree: Sequence[int]) -> GradedSheaf:
        degree = self.space.lambdas[x].normalize(degree)
        key = (x, degree)
        if key not in self._built:
            self._built[key] = self._build(x, degree)
        return self._built[key]

    def _build(self, x: Point, degree: Degree) -> GradedSheaf:
        space, structure = self.space, self.structure
        opened = space.poset.up(x)
        moved = {z: space.lambda_restriction(x, z).apply(degree) for z in opened}
        stalks = {}
        for z in space.points:
            if z in opened:
                stalks[z] = shift_module(structure.stalks[z], space.lambdas[z].neg(moved[z]))
            else:
                stalks[z] = GradedModule.zero(space.lambdas[z], self.ring)
        restrictions = {}
        for a, b in space.poset.covers:
            blocks = {}
            if a in opened:
                lambdas = space.lambdas[a]
                blocks = {
                    lambdas.add(d, moved[a]): m for d, m in structure.restrictions[(a, b)].blocks.items()
                }
            restrictions[(a, b)] = GradedMap(stalks[a], stalks[b], blocks, space.lres[(a, b)])
        name = f"{structure.name}_{x}⟨-{format_degree(degree)}⟩"
        return GradedSheaf(name, space, self.ring, stalks, restrictions)

    def inclusion(self, x: Point, y: Point, degree: Sequence[int]) -> SheafMap:
        """R_{U_y}⟨−ρ_{xy}λ⟩ → R_{U_x}⟨−λ⟩ pour x ≤ y (identité sur U_y)."""
        larger = self.sheaf(x, degree)
        smaller = self.sheaf(y, self.space.lambda_restriction(x, y).apply(degree))
        opened = self.space.poset.up(y)
        components = {}
        for z in self.space.points:
            blocks = {}
            if z in opened:
                blocks = {d: identity(m.generators) for d, m in smaller.stalks[z].parts.items()}
            components[z] = GradedMap(smaller.stalks[z], larger.stalks[z], blocks)
        return SheafMap(smaller, larger, components)


# Représentabilité


class ContravariantFunctor(ABC):
    """Foncteur contravariant évalué sur les générateurs et leurs inclusions."""

    name = "F"

    @abstractmethod
    def value(self, generator: GradedSheaf) -> Module:
        ...

    @abstractmethod
    def apply(self, inclusion: SheafMap) -> ModuleMap:
        """F(ι) : F(but) → F(source)."""


def precomposition(phi: SheafMap, target: GradedSheaf) -> ModuleMap:
    """Hom(B, G) → Hom(A, G), ψ ↦ ψ∘φ pour φ : A → B."""
    first, second = hom_space(phi.target, target), hom_space(phi.source, target)
    columns = []
    for blocks in first.basis():
        psi = map_from_blocks(phi.target, target, blocks)
        columns.append(second.encode(map_to_blocks(psi.compose(phi))))
    matrix = hstack(columns, second.module.generators)
    return ModuleMap(first.module, second.module, target.ring.reduce(matrix))


@dataclass(eq=False)
class HomFunctor(ContravariantFunctor):
    """Hom(− ⊗ M, G), ou Hom(−, G) sans torsion M."""

    target: GradedSheaf
    twist: Optional[GradedSheaf] = None

    @property
    def name(self) -> str:  # type: ignore[override]
        inner = "−" if self.twist is None else f"− ⊗ {self.twist.name}"
        return f"Hom({inner}, {self.target.name})"

    def _twisted(self, generator: GradedSheaf) -> GradedSheaf:
        return generator if self.twist is None else tensor_sheaf(generator, self.twist)

    def value(self, generator: GradedSheaf) -> Module:
        return hom_space(self._twisted(generator), self.target).module

    def apply(self, inclusion: SheafMap) -> ModuleMap:
        if self.twist is not None:
            inclusion = tensor_map(inclusion, SheafMap.identity(self.twist))
        return precomposition(inclusion, self.target)


class ZeroFunctor(ContravariantFunctor):
    name = "0"

    def __init__(self, ring: BaseRing) -> None:
        self.ring = ring

    def value(self, generator: GradedSheaf) -> Module:
        return Module.zero(self.ring)

    def apply(self, inclusion: SheafMap) -> ModuleMap:
        zero = Module.zero(self.ring)
        return ModuleMap.zero(zero, zero)


def represent_functor(
    functor: ContravariantFunctor,
    space: GradedSpace,
    ring: BaseRing,
    ringed: Optional[RingedGradedSpace] = None,
) -> GradedSheaf:
    """
    𝔽(U_x)_λ = F(R_{U_x}⟨−λ⟩), restrictions induites par les inclusions de générateurs.

    Raises:
        InfiniteSupport: Si un groupe de degrés est infini
        GradedSheafError: Si l'évaluateur n'est pas cohérent (condition de faisceau)
    """
    _require_finite(space)
    family = GeneratorFamily(space, ring, ringed)
    stalks = {}
    for x in space.points:
        parts = {}
        for degree in family.degrees(x):
            module = functor.value(family.sheaf(x, degree))
            if not module.is_zero():
                parts[degree] = module
        stalks[x] = GradedModule(space.lambdas[x], ring, parts)
    restrictions = {}
    for x, y in space.poset.covers:
        blocks = {d: functor.apply(family.inclusion(x, y, d)).matrix for d in stalks[x].parts}
        restrictions[(x, y)] = GradedMap(stalks[x], stalks[y], blocks, space.lres[(x, y)])
    result = GradedSheaf(functor.name, space, ring, stalks, restrictions)
    problems = result.diagnostics()
    if problems:
        raise GradedSheafError(
            f"Évaluateur incohérent pour {functor.name} : {problems[0].code} {problems[0].location}"
        )
    logger.info("Faisceau représentant %s construit", functor.name)
    return result


def representability_certificate(
    functor: ContravariantFunctor, represented: GradedSheaf, ringed: Optional[RingedGradedSpace] = None
) -> Certificate:
    """Hom(R_{U_x}⟨−λ⟩, 𝔽) ≅ F(R_{U_x}⟨−λ⟩) sur tous les générateurs."""
    family = GeneratorFamily(represented.space, represented.ring, ringed)
    certificate = Certificate("representability", instance=functor.name)
    for x in represented.space.points:
        for degree in family.degrees(x):
            generator = family.sheaf(x, degree)
            left = hom_space(generator, represented).module
            right = functor.value(generator)
            if not left.is_isomorphic(right):
                certificate.fail(f"en {x}, degré {format_degree(degree)} : {left} contre {right}")
    return certificate


# Résolution molle et plate de R


def soft_flat_resolution_of_R(
    space: Union[GradedSpace, RingedGradedSpace],
    ring: Optional[BaseRing] = None,
    window: Optional[DegreeWindow] = None,
) -> Resolution:
    """
    R_X → M^0 → … → M^n : Godement tronqué au premier n ≥ dim X dont le terme
    de coupure coker(G^{n−2} → G^{n−1}) est flasque.

    Raises:
        FlatnessUndecided: Si un terme n'est pas plat tige par tige
    """
    if isinstance(space, RingedGradedSpace):
        unit = space.structure_sheaf()
        base = space.space
    else:
        base = space
        unit = GradedSheaf.constant(space, ring or BaseRing.prime_field(2), name="R")
    resolution = godement_resolution(unit, window)
    complex_ = resolution.complex
    dimension = cohomological_dimension(base, unit.ring, window)
    resolved = ComplexOfSheaves.single(unit)
    kinds = frozenset({ResolutionKind.FLABBY, ResolutionKind.SOFT, ResolutionKind.FLAT})
    for n in range(dimension, base.poset.height + 2):
        if n == 0:
            if not is_flabby(unit, window):
                continue
            terms = {0: unit}
            differentials: Dict[int, SheafMap] = {}
            augmentation = SheafMap.identity(unit)
        else:
            incoming = resolution.augmentation.component(0) if n == 1 else complex_.differential(n - 2)
            cut, projection = cokernel_sheaf(incoming)
            if not is_flabby(cut, window):
                continue
            terms = {i: complex_.term(i) for i in range(n)}
            terms[n] = cut
            differentials = {i: complex_.differential(i) for i in range(n - 1)}
            differentials[n - 1] = projection
            augmentation = resolution.augmentation.component(0)
        truncated = ComplexOfSheaves(f"M({unit.name})", base, unit.ring, terms, differentials)
        for term in truncated.terms.values():
            failures = flatness_failures(term)
            if failures:
                raise FlatnessUndecided(*failures[0])
        logger.info("Résolution molle et plate de %s de longueur %s", unit.name, n)
        chain = ChainMap(resolved, truncated, {0: augmentation})
        return Resolution(resolved, truncated, chain, {i: kinds for i in truncated.terms}, right=True)
    raise GradedSheafError(f"Aucune troncature flasque pour {unit.name}")


# f^!


def _pushed_generator(
    f: GradedSpaceMap, family: GeneratorFamily, x: Point, degree: Degree, window: Optional[DegreeWindow]
) -> ComplexOfSheaves:
    return push_complex(f, godement_complex(family.sheaf(x, degree), window), True, window)


def _pushed_inclusion(
    f: GradedSpaceMap,
    family: GeneratorFamily,
    x: Point,
    y: Point,
    degree: Degree,
    source: ComplexOfSheaves,
    target: ComplexOfSheaves,
    window: Optional[DegreeWindow],
) -> ChainMap:
    inclusion = family.inclusion(x, y, degree)
    components = {
        p: pushforward_map(f, godement_map(inclusion, p, window), True, window) for p in target.terms
    }
    return ChainMap(source, target, components)


def upper_shriek(
    f: GradedSpaceMap,
    value: Derivable,
    window: Optional[DegreeWindow] = None,
    ringed: Optional[RingedGradedSpace] = None,
) -> ComplexOfSheaves:
    """
    f^!G, adjoint à droite de Rf_!.

    Raises:
        NonFieldBase: Sur un anneau de base qui n'est pas un corps
        InfiniteSupport: Si un groupe de degrés de la source est infini
    """
    complex_ = as_complex(value)
    require_field(complex_.ring)
    space, ring = f.source, complex_.ring
    _require_finite(space)
    injective = flabby_resolution(complex_, window).complex
    family = GeneratorFamily(space, ring, ringed)
    pushed: Dict[Tuple[Point, Degree], ComplexOfSheaves] = {}
    for x in space.points:
        for degree in family.degrees(x):
            pushed[(x, degree)] = _pushed_generator(f, family, x, degree, window)
    if injective.is_zero():
        return ComplexOfSheaves.zero(space, ring, f"{f.name}^!{complex_.name}")
    height = space.poset.height
    degrees = range(injective.low - height, injective.high + 1)
    differentials_at: Dict[Tuple[int, Point, Degree], ModuleMap] = {}
    for n in list(degrees) + [degrees[-1] + 1]:
        for (x, degree), source in pushed.items():
            differentials_at[(n, x, degree)] = hom_complex_differential(source, injective, n)
    chains: Dict[Tuple[Point, Point, Degree], ChainMap] = {}
    terms: Dict[int, GradedSheaf] = {}
    for n in degrees:
        stalks = {}
        for x in space.points:
            parts = {}
            for degree in family.degrees(x):
                module = differentials_at[(n, x, degree)].source
                if not module.is_zero():
                    parts[degree] = module
            stalks[x] = GradedModule(space.lambdas[x], ring, parts)
        restrictions = {}
        for x, y in space.poset.covers:
            blocks = {}
            for degree in stalks[x].parts:
                if (x, y, degree) not in chains:
                    moved = space.lambda_restriction(x, y).apply(degree)
                    chains[(x, y, degree)] = _pushed_inclusion(
                        f, family, x, y, degree, pushed[(y, moved)], pushed[(x, degree)], window
                    )
                blocks[degree] = hom_complex_precompose(chains[(x, y, degree)], injective, n).matrix
            restrictions[(x, y)] = GradedMap(stalks[x], stalks[y], blocks, space.lres[(x, y)])
        terms[n] = GradedSheaf(f"{f.name}^!{complex_.name}^{n}", space, ring, stalks, restrictions)
    differentials = {}
    for n in degrees:
        if n + 1 not in terms:
            continue
        source, target = terms[n], terms[n + 1]
        components = {}
        for x in space.points:
            blocks = {d: differentials_at[(n, x, d)].matrix for d in source.stalks[x].parts}
            components[x] = GradedMap(source.stalks[x], target.stalks[x], blocks)
        differentials[n] = SheafMap(source, target, components)
    result = ComplexOfSheaves(f"{f.name}^!{complex_.name}", space, ring, terms, differentials)
    logger.info("f^! calculé : %s (%s termes)", result.name, len(result.terms))
    return result


def minimal_model(value: Derivable) -> ComplexOfSheaves:
    """H^n[−n] quand la cohomologie est concentrée en un seul degré n, le complexe sinon."""
    complex_ = as_complex(value)
    nonzero = {n: h for n, h in cohomology(complex_).items() if not h.is_zero()}
    if not nonzero:
        return ComplexOfSheaves.zero(complex_.space, complex_.ring, complex_.name)
    if len(nonzero) > 1:
        return complex_
    ((n, sheaf),) = nonzero.items()
    return ComplexOfSheaves.single(sheaf, n, complex_.name)


# Complexe dualisant


@dataclass(frozen=True, eq=False)
class DualizingComplex:
    """
    ω_X = p^! ω_k.

    Attributes:
        complex: ω_X tel que calculé
        model: Modèle réduit quasi-isomorphe utilisé par D_X
        resolution: Résolution molle et plate de R_X associée
        config: Configuration de dualité
    """

    complex: ComplexOfSheaves
    model: ComplexOfSheaves
    resolution: Resolution
    config: DualityConfig

    @property
    def space(self) -> GradedSpace:
        return self.complex.space


def dualizing_complex(
    space: Union[GradedSpace, RingedGradedSpace], config: Optional[DualityConfig] = None
) -> DualizingComplex:
    """
    ω_X = p^! ω_k pour p : X → point.

    Raises:
        NonFieldBase: Sur un anneau de base qui n'est pas un corps
    """
    ringed = space if isinstance(space, RingedGradedSpace) else None
    base = ringed.space if ringed is not None else space
    config = config or DualityConfig(ringed.base_ring if ringed is not None else BaseRing.prime_field(2))
    key = ("dualizing", id(config), id(ringed))
    if key in base._cache:
        return base._cache[key]  # type: ignore[return-value]
    p = GradedSpaceMap.to_point(base, config.point)
    omega = upper_shriek(p, config.base, config.window, ringed).renamed(f"ω_{base.name}")
    resolution = soft_flat_resolution_of_R(ringed or base, config.base_field, config.window)
    result = DualizingComplex(omega, minimal_model(omega), resolution, config)
    base._cache[key] = result
    logger.info("Complexe dualisant de %s : %s termes", base.name, len(omega.terms))
    return result


def verdier_dual(
    value: Derivable, dualizing: Optional[DualizingComplex] = None, config: Optional[DualityConfig] = None
) -> ComplexOfSheaves:
    """D_X C = RHom(C, ω_X)."""
    complex_ = as_complex(value)
    dualizing = dualizing or dualizing_complex(
        complex_.space, config or DualityConfig(complex_.ring)
    )
    return derived_hom(complex_, dualizing.model, dualizing.config.window).renamed(f"D({complex_.name})")


# Vérifications


def _tables(law: str, left: Derivable, right: Derivable, instance: str) -> Certificate:
    return compare_tables(law, cohomology_table(left), cohomology_table(right), instance)


def upper_shriek_adjunction_check(
    f: GradedSpaceMap, value: Derivable, other: Derivable, window: Optional[DegreeWindow] = None
) -> Certificate:
    """Hom_D(Rf_! F, G) ≅ Hom_D(F, f^!G) (mêmes invariants, donc même cardinal sur F_q)."""
    source, target = as_complex(value), as_complex(other)
    left = hom_D(derived_shriek_pushforward(f, source, window), target, window)
    right = hom_D(source, upper_shriek(f, target, window), window)
    certificate = Certificate("upper-shriek-adjunction", instance=f"{f.name}, {source.name}, {target.name}")
    if not left.is_isomorphic(right):
        certificate.fail(f"Hom_D(Rf_! F, G) = {left} mais Hom_D(F, f^!G) = {right}")
    return certificate


def dualizing_is_invertible(dualizing: DualizingComplex) -> bool:
    """ω_X localement isomorphe à un décalé de ω_k : une seule ligne de rang 1 par point."""
    table = cohomology_table(dualizing.model)
    for x in dualizing.space.points:
        rows = table[table["point"] == x]
        if len(rows) != 1 or int(rows["rank"].iloc[0]) != 1 or rows["divisors"].iloc[0]:
            return False
    return True


def biduality_check(value: Derivable, dualizing: Optional[DualizingComplex] = None) -> Certificate:
    """
    D_X D_X C ≃ C, sur les espaces dont ω_X est inversible (pseudo-cercle, espaces
    discrets). Un espace à bord comme S2 ou LINE3 a ω_X = k_c : D_X k = D_X k_c.
    """
    complex_ = as_complex(value)
    dualizing = dualizing or dualizing_complex(complex_.space, DualityConfig(complex_.ring))
    if not dualizing_is_invertible(dualizing):
        return Certificate("biduality", instance=complex_.name).fail(
            f"BOUNDARY: ω_{complex_.space.name} n'est pas localement un décalé de ω_k"
        )
    twice = verdier_dual(verdier_dual(complex_, dualizing), dualizing)
    return _tables("biduality", twice, complex_, complex_.name)


def duality_identities_check(
    f: GradedSpaceMap, value: Derivable, other: Derivable, config: Optional[DualityConfig] = None
) -> List[Certificate]:
    """
    Pour F, G sur Y :
      f^! RHom(F, G) ≅ RHom(f⁻¹F, f^!G),
      Rf_* D_X(f⁻¹F) ≅ D_Y Rf_!(f⁻¹F),
      f^! D_Y G ≅ D_X f⁻¹G.
    """
    first, second = as_complex(value), as_complex(other)
    config = config or DualityConfig(first.ring)
    window = config.window
    source_dual = dualizing_complex(f.source, config)
    target_dual = dualizing_complex(f.target, config)
    instance = f"{f.name}, {first.name}, {second.name}"
    pulled = derived_inverse_image(f, first)
    certificates = [
        _tables(
            "duality-hom",
            upper_shriek(f, derived_hom(first, second, window), window),
            derived_hom(pulled, upper_shriek(f, second, window), window),
            instance,
        ),
        _tables(
            "duality-pushforward",
            derived_pushforward(f, verdier_dual(pulled, source_dual), window),
            verdier_dual(derived_shriek_pushforward(f, pulled, window), target_dual),
            instance,
        ),
        _tables(
            "duality-inverse",
            upper_shriek(f, verdier_dual(second, target_dual), window),
            verdier_dual(derived_inverse_image(f, second), source_dual),
            instance,
        ),
    ]
    for certificate in certificates:
        if not certificate.passed:
            logger.warning("Identité %s en défaut sur %s", certificate.law, instance)
            break
    return certificates


def sheaf_duality_check(
    f: GradedSpaceMap, value: Derivable, other: Derivable, window: Optional[DegreeWindow] = None
) -> Certificate:
    """RHom(Rf_! F, G) ≅ Rf_* RHom(F, f^!G) pour F sur X et G sur Y."""
    source, target = as_complex(value), as_complex(other)
    left = derived_hom(derived_shriek_pushforward(f, source, window), target, window)
    right = derived_pushforward(f, derived_hom(source, upper_shriek(f, target, window), window), window)
    return _tables("sheaf-duality", left, right, f"{f.name}, {source.name}, {target.name}")


def upper_shriek_composition_check(
    f: GradedSpaceMap, g: GradedSpaceMap, value: Derivable, window: Optional[DegreeWindow] = None
) -> Certificate:
    """
    (g∘f)^! ≅ f^! g^! pour f et g propres.

    Raises:
        NotProperError: Si f ou g n'est pas propre
    """
    require_proper(f, g)
    complex_ = as_complex(value)
    composite = g.compose_after(f)
    return _tables(
        "composition-upper-shriek",
        upper_shriek(composite, complex_, window),
        upper_shriek(f, upper_shriek(g, complex_, window), window),
        f"{f.name}, {g.name}, {complex_.name}",
    )


def baer_monomorphisms(space: GradedSpace, ring: BaseRing) -> List[SheafMap]:
    """Sous-faisceaux R_V⟨−λ⟩ → R_{U_x}⟨−λ⟩, V ouvert de U_x (critère de Baer sur un corps)."""
    _require_finite(space)
    family = GeneratorFamily(space, ring)
    monos = []
    for x in space.points:
        opened = space.poset.up(x)
        for degree in family.degrees(x):
            generator = family.sheaf(x, degree)
            monos.extend(open_extension_map(generator, v) for v in space.poset.opens() if v < opened)
    return monos


def injectivity_check(
    sheaf: GradedSheaf, monos: Optional[Sequence[SheafMap]] = None, name: Optional[str] = None
) -> Certificate:
    """
    Relèvement des problèmes d'extension : Hom(B, I) → Hom(A, I) surjectif pour
    chaque monomorphisme A → B.
    """
    monos = list(monos) if monos is not None else baer_monomorphisms(sheaf.space, sheaf.ring)
    certificate = Certificate("injectivity", instance=name or sheaf.name)
    for iota in monos:
        if not is_injective(iota):
            certificate.fail(f"{iota.source.name} → {iota.target.name} n'est pas un monomorphisme")
            continue
        if not precomposition(iota, sheaf).is_surjective():
            certificate.fail(f"extension impossible le long de {iota.source.name} → {iota.target.name}")
    return certificate


def _piece_complex(complex_: ComplexOfSheaves, degree: Sequence[int]) -> ComplexOfSheaves:
    """Morceau de degré λ d'un complexe, sur l'espace sous-jacent."""
    space = complex_.space
    grading = space.open_grading(space.points)
    family = {x: grading.restrict(grading.group.normalize(degree), x) for x in space.points}

    def on_map(phi: SheafMap) -> SheafMap:
        source, target = degree_piece(phi.source, degree), degree_piece(phi.target, degree)
        components = {
            x: GradedMap(source.stalks[x], target.stalks[x], {(): phi.components[x].block(family[x])})
            for x in space.points
        }
        return SheafMap(source, target, components)

    return map_complex(
        complex_,
        lambda t: degree_piece(t, degree),
        on_map,
        f"({complex_.name})_{format_degree(degree)}",
        space.underlying(),
    )


def remark_duality_crosscheck(
    ringed: RingedGradedSpace, degree: Sequence[int], config: Optional[DualityConfig] = None
) -> Certificate:
    """
    (ω_X)_λ ≅ RHom(R_{X,−λ}, ω_{X sous-jacent}) ; vérifie aussi
    π_*(F⟨λ⟩) = π_!(F⟨λ⟩) = F_λ pour π vers l'espace sous-jacent.
    """
    config = config or DualityConfig(ringed.base_ring)
    space = ringed.space
    grading = space.open_grading(space.points)
    degree = grading.group.normalize(degree)
    omega = dualizing_complex(ringed, config)
    underlying = space.underlying()
    plain = dualizing_complex(underlying, config)
    structure = ringed.structure_sheaf()
    left = _piece_complex(omega.complex, degree)
    right = derived_hom(degree_piece(structure, grading.group.neg(degree)), plain.model, config.window)
    certificate = _tables("remark-duality", left, right, f"{ringed.name}, λ = {format_degree(degree)}")
    projection = GradedSpaceMap(
        "π",
        space,
        underlying,
        {x: x for x in space.points},
        {x: GroupHom.zero(underlying.lambdas[x], space.lambdas[x]) for x in space.points},
    )
    shifted = shift_sheaf(structure, degree)
    piece = invariant_table(degree_piece(structure, degree))
    for label, pushed in (
        ("π_*", pushforward_gr(projection, shifted, config.window)),
        ("π_!", shriek_pushforward_gr(projection, shifted, config.window)),
    ):
        check = compare_tables("remark-duality", invariant_table(pushed), piece)
        if not check.passed:
            certificate.fail(f"{label}(F⟨λ⟩) ≠ F_λ : " + "; ".join(check.details))
    return certificate
