"""
Faisceaux gradués sur un espace gradué fini, morphismes et préfaisceaux tabulés.

Sur un espace d'Alexandrov, un faisceau Λ-gradué est déterminé par ses tiges
F_x (modules Λ_x-gradués) et par ses restrictions F_x → F_y le long des
couvertures, de morphisme de degrés ρ_{xy}.
"""

from dataclasses import dataclass, field
import logging
from typing import Dict, FrozenSet, List, Mapping, Optional, Tuple

from ..algebra.base_ring import BaseRing
from ..algebra.grading import Degree
from ..algebra.graded import GradedMap, GradedModule
from ..algebra.matrices import identity
from ..algebra.modules import Module
from ..errors import MismatchError
from .diagnostics import Diagnostic
from .poset import Point
from .space import GradedSpace

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class GradedSheaf:
    """
    Faisceau Λ-gradué donné par tiges et restrictions de couverture.

    Attributes:
        name: Nom du faisceau
        space: Espace gradué de base
        ring: Anneau de base
        stalks: Tige F_x, graduée par Λ_x (absente = nulle)
        restrictions: F_x → F_y pour chaque couverture x < y (absente = nulle)
    """

    name: str
    space: GradedSpace
    ring: BaseRing
    stalks: Mapping[Point, GradedModule] = field(default_factory=dict)
    restrictions: Mapping[Tuple[Point, Point], GradedMap] = field(default_factory=dict, repr=False)
    _cache: Dict[object, object] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        stalks: Dict[Point, GradedModule] = {}
        for x in self.space.points:
            stalk = self.stalks.get(x) or GradedModule.zero(self.space.lambdas[x], self.ring)
            if stalk.grading != self.space.lambdas[x]:
                raise MismatchError(f"Tige en {x} graduée par {stalk.grading} au lieu de {self.space.lambdas[x]}")
            if stalk.ring != self.ring:
                raise MismatchError(f"Tige en {x} sur {stalk.ring} au lieu de {self.ring}")
            stalks[x] = stalk
        unknown = set(self.stalks) - set(self.space.points)
        if unknown:
            raise ValueError(f"Tiges en des points inconnus : {sorted(unknown)}")
        restrictions: Dict[Tuple[Point, Point], GradedMap] = {}
        for x, y in self.space.poset.covers:
            lres = self.space.lres[(x, y)]
            given = self.restrictions.get((x, y))
            if given is None:
                restrictions[(x, y)] = GradedMap.zero(stalks[x], stalks[y], lres)
                continue
            if given.degree_map is None or not given.degree_map.equals(lres) or given.shift is not None:
                raise ValueError(f"Restriction {x} → {y} incompatible avec ρ de Λ")
            restrictions[(x, y)] = GradedMap(stalks[x], stalks[y], given.blocks, lres)
        extra = set(self.restrictions) - set(restrictions)
        if extra:
            raise ValueError(f"Restrictions hors des couvertures : {sorted(extra)}")
        object.__setattr__(self, "stalks", stalks)
        object.__setattr__(self, "restrictions", restrictions)

    # Constructeurs

    @classmethod
    def zero(cls, space: GradedSpace, ring: BaseRing, name: str = "0") -> "GradedSheaf":
        return cls(name, space, ring)

    @classmethod
    def constant(
        cls, space: GradedSpace, ring: BaseRing, module: Optional[Module] = None, name: str = "k"
    ) -> "GradedSheaf":
        """Faisceau constant M en degré 0 (M = R par défaut)."""
        module = module or Module.free(ring, 1)
        stalks = {x: GradedModule.concentrated(space.lambdas[x], module) for x in space.points}
        restrictions = {
            (x, y): GradedMap(
                stalks[x],
                stalks[y],
                {space.lambdas[x].zero(): identity(module.generators)},
                space.lres[(x, y)],
            )
            for x, y in space.poset.covers
        }
        return cls(name, space, ring, stalks, restrictions)

    def renamed(self, name: str) -> "GradedSheaf":
        return GradedSheaf(name, self.space, self.ring, self.stalks, self.restrictions)

    # Accès

    def stalk(self, x: Point) -> GradedModule:
        if x not in self.stalks:
            raise ValueError(f"Point inconnu : {x}")
        return self.stalks[x]

    def restriction(self, x: Point, y: Point) -> GradedMap:
        """F_x → F_y pour x ≤ y, composée le long du chemin canonique."""
        if x == y:
            return GradedMap.identity(self.stalks[x])
        key = ("res", x, y)
        if key not in self._cache:
            result: Optional[GradedMap] = None
            for a, b in self.space.poset.path(x, y):
                step = self.restrictions[(a, b)]
                result = step if result is None else step.compose(result)
            self._cache[key] = result
        return self._cache[key]  # type: ignore[return-value]

    def is_zero(self) -> bool:
        return all(stalk.is_zero() for stalk in self.stalks.values())

    def is_isomorphic_stalkwise(self, other: "GradedSheaf") -> bool:
        """Mêmes invariants en chaque point et chaque degré."""
        return all(self.stalks[x].is_isomorphic(other.stalks[x]) for x in self.space.points)

    def diagnostics(self) -> List[Diagnostic]:
        """Blocs mal définis et non-fonctorialité."""
        problems: List[Diagnostic] = []
        poset = self.space.poset
        for (x, y), restriction in self.restrictions.items():
            for degree in self.stalks[x].parts:
                if not restriction.module_map(degree).is_well_defined():
                    problems.append(
                        Diagnostic(
                            "BLOCK_NOT_WELL_DEFINED",
                            f"{self.name}: {x} → {y}, degré {list(degree)}",
                            "les relations de la source ne sont pas respectées",
                        )
                    )
        for x in poset.points:
            for y in poset.points:
                if not poset.less(x, y):
                    continue
                expected = self.restriction(x, y)
                for a, b in poset.covers:
                    if a != x or not poset.leq(b, y):
                        continue
                    candidate = self.restriction(b, y).compose(self.restrictions[(x, b)])
                    if not candidate.equals(expected):
                        problems.append(
                            Diagnostic(
                                "NOT_FUNCTORIAL",
                                f"{self.name}: {x} < {y}",
                                f"les restrictions par {b} et par le chemin canonique diffèrent",
                            )
                        )
        return problems


@dataclass(frozen=True, eq=False)
class SheafMap:
    """
    Morphisme de faisceaux gradués de degré λ ∈ Λ(X) (0 par défaut).

    Attributes:
        source: Faisceau F
        target: Faisceau G
        components: φ_x : F_x → G_x (décalage λ|x)
        degree: λ ∈ Λ(X), None pour un morphisme de degré 0
    """

    source: GradedSheaf
    target: GradedSheaf
    components: Mapping[Point, GradedMap] = field(default_factory=dict)
    degree: Optional[Degree] = None

    def __post_init__(self) -> None:
        if self.source.space is not self.target.space and self.source.space.name != self.target.space.name:
            raise MismatchError(f"Espaces différents : {self.source.space.name} et {self.target.space.name}")
        components: Dict[Point, GradedMap] = {}
        for x in self.source.space.points:
            shift = self.local_shift(x)
            given = self.components.get(x)
            blocks = given.blocks if given is not None else {}
            components[x] = GradedMap(self.source.stalks[x], self.target.stalks[x], blocks, None, shift)
        object.__setattr__(self, "components", components)

    def local_shift(self, x: Point) -> Optional[Degree]:
        if self.degree is None:
            return None
        grading = self.source.space.open_grading(self.source.space.points)
        return grading.restrict(self.degree, x)

    # Constructeurs

    @classmethod
    def identity(cls, sheaf: GradedSheaf) -> "SheafMap":
        return cls(sheaf, sheaf, {x: GradedMap.identity(s) for x, s in sheaf.stalks.items()})

    @classmethod
    def zero(cls, source: GradedSheaf, target: GradedSheaf) -> "SheafMap":
        return cls(source, target, {})

    # Algèbre

    def component(self, x: Point) -> GradedMap:
        return self.components[x]

    def compose(self, other: "SheafMap") -> "SheafMap":
        """self ∘ other (morphismes de degré 0)."""
        if self.degree is not None or other.degree is not None:
            raise ValueError("Composition réservée aux morphismes de degré 0")
        return SheafMap(
            other.source,
            self.target,
            {x: self.components[x].compose(other.components[x]) for x in other.source.space.points},
        )

    def combine(self, other: "SheafMap", factor: int = 1) -> "SheafMap":
        """self + factor·other."""
        return SheafMap(
            self.source,
            self.target,
            {x: self.components[x].combine(other.components[x], factor) for x in self.source.space.points},
            self.degree,
        )

    def scaled(self, factor: int) -> "SheafMap":
        return SheafMap(
            self.source, self.target, {x: c.scaled(factor) for x, c in self.components.items()}, self.degree
        )

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components.values())

    def equals(self, other: "SheafMap") -> bool:
        return all(self.components[x].equals(other.components[x]) for x in self.source.space.points)

    def is_isomorphism(self) -> bool:
        """Isomorphisme ssi isomorphisme sur chaque tige."""
        return self.degree is None and all(c.is_isomorphism() for c in self.components.values())

    def inverse(self) -> "SheafMap":
        """
        Inverse assemblé tige par tige.

        Raises:
            ValueError: Si le morphisme n'est pas un isomorphisme
        """
        if not self.is_isomorphism():
            raise ValueError("Inverse demandé pour un morphisme qui n'est pas un isomorphisme")
        return SheafMap(self.target, self.source, {x: c.inverse() for x, c in self.components.items()})

    def diagnostics(self) -> List[Diagnostic]:
        """Carrés de naturalité non commutatifs."""
        problems: List[Diagnostic] = []
        for x, y in self.source.space.poset.covers:
            left = self.target.restrictions[(x, y)].compose(self.components[x])
            right = self.components[y].compose(self.source.restrictions[(x, y)])
            if not left.equals(right):
                problems.append(
                    Diagnostic(
                        "NOT_NATURAL",
                        f"{self.source.name} → {self.target.name}: {x} < {y}",
                        "le carré de naturalité ne commute pas",
                    )
                )
        return problems


@dataclass(frozen=True, eq=False)
class GradedPresheafTable:
    """
    Préfaisceau gradué tabulé sur tous les ouverts.

    Attributes:
        space: Espace gradué
        ring: Anneau de base
        values: P(U), gradué par Λ(U)
        restrictions: P(U) → P(V) pour V ⊆ U, de morphisme de degrés Λ(U) → Λ(V)
    """

    space: GradedSpace
    ring: BaseRing
    values: Mapping[FrozenSet[Point], GradedModule]
    restrictions: Mapping[Tuple[FrozenSet[Point], FrozenSet[Point]], GradedMap] = field(repr=False)

    def value(self, subset: FrozenSet[Point]) -> GradedModule:
        return self.values[frozenset(subset)]

    def restriction(self, larger: FrozenSet[Point], smaller: FrozenSet[Point]) -> GradedMap:
        larger, smaller = frozenset(larger), frozenset(smaller)
        if larger == smaller:
            return GradedMap.identity(self.values[larger])
        return self.restrictions[(larger, smaller)]

    def diagnostics(self) -> List[Diagnostic]:
        """Fonctorialité W ⊆ V ⊆ U."""
        problems: List[Diagnostic] = []
        opens = list(self.values)
        for u in opens:
            for v in opens:
                if not v < u:
                    continue
                for w in opens:
                    if not w < v:
                        continue
                    direct = self.restriction(u, w)
                    composed = self.restriction(v, w).compose(self.restriction(u, v))
                    if not direct.equals(composed):
                        problems.append(
                            Diagnostic(
                                "NOT_FUNCTORIAL",
                                f"{sorted(u)} ⊇ {sorted(v)} ⊇ {sorted(w)}",
                                "restrictions non composables",
                            )
                        )
        return problems
