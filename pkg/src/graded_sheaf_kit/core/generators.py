"""
Génération pseudo-aléatoire et reproductible d'instances pour les suites de lois.

Toutes les instances dérivent d'un unique random.Random(seed) : même graine,
mêmes instances, même rapport.
"""

from dataclasses import dataclass
import logging
import random
from typing import List, Optional, Sequence, Tuple

from ..algebra.base_ring import BaseRing
from ..algebra.grading import GradingGroup, GroupHom
from ..domain.poset import FinitePoset, Point
from ..domain.ringed import RingedMap, RModuleSheaf
from ..domain.sheaf import GradedSheaf
from ..domain.space import CartesianSquare, GradedSpace, GradedSpaceMap, fiber_product
from .abelian import cokernel_sheaf
from .derived import generator_sheaf
from .functors import direct_sum_sheaf, extend_by_zero, hom_space, map_from_blocks

logger = logging.getLogger(__name__)

POINT_NAMES = "abcdefgh"


@dataclass(frozen=True)
class MapInstance:
    """f : X → Y avec un faisceau sur chaque côté."""

    f: GradedSpaceMap
    source_sheaf: GradedSheaf
    target_sheaf: GradedSheaf

    @property
    def label(self) -> str:
        return f"{self.f.name} : {self.f.source.name} → {self.f.target.name}"


@dataclass(frozen=True)
class SquareInstance:
    square: CartesianSquare
    sheaf: GradedSheaf

    @property
    def label(self) -> str:
        return f"{self.square.f.name}, {self.square.g.name}"


@dataclass(frozen=True)
class OpenInstance:
    sheaf: GradedSheaf
    opened: Tuple[Point, ...]

    @property
    def label(self) -> str:
        return f"{self.sheaf.name}, U = {{{','.join(self.opened)}}}"


@dataclass(frozen=True)
class ModuleInstance:
    f: RingedMap
    source_module: RModuleSheaf
    target_module: RModuleSheaf

    @property
    def label(self) -> str:
        return f"{self.f.name} : {self.f.source.name} → {self.f.target.name}"


class InstanceGenerator:
    """Générateur d'espaces, de morphismes et de faisceaux aléatoires."""

    def __init__(
        self,
        seed: int = 1,
        ring: Optional[BaseRing] = None,
        gradings: Optional[Sequence[GradingGroup]] = None,
        max_points: int = 4,
    ):
        self.rng = random.Random(seed)
        self.ring = ring or BaseRing.prime_field(2)
        self.gradings = list(gradings) if gradings else [GradingGroup.trivial()]
        self.max_points = max_points
        self._counter = 0

    def _name(self, prefix: str) -> str:
        self._counter += 1
        return f"{prefix}{self._counter}"

    # Espaces

    def poset(self, size: Optional[int] = None) -> FinitePoset:
        """Ordre aléatoire : relations i < j tirées dans l'ordre de déclaration."""
        size = size or self.rng.randint(1, self.max_points)
        points = tuple(POINT_NAMES[:size])
        relations = [
            (points[i], points[j]) for i in range(size) for j in range(i + 1, size) if self.rng.random() < 0.45
        ]
        return FinitePoset(points, tuple(relations))

    def grading(self) -> GradingGroup:
        return self.rng.choice(self.gradings)

    def space(self, size: Optional[int] = None, group: Optional[GradingGroup] = None) -> GradedSpace:
        return GradedSpace.constant(self._name("X"), self.poset(size), group or self.grading())

    def space_map(self, source: GradedSpace, target: GradedSpace) -> GradedSpaceMap:
        """
        Application croissante tirée point par point ; f♭ identique partout (identité
        si les groupes coïncident et au hasard, nul sinon).
        """
        images = {}
        for x in source.poset.linear_extension:
            below = [images[w] for w in source.poset.down(x) if w != x]
            candidates = [y for y in target.points if all(target.poset.leq(b, y) for b in below)]
            if not candidates:
                return self._constant_map(source, target)
            images[x] = self.rng.choice(candidates)
        x0 = source.points[0]
        source_group, target_group = source.lambdas[x0], target.lambdas[target.points[0]]
        strict = source_group == target_group and self.rng.random() < 0.7
        flat = GroupHom.identity(source_group) if strict else GroupHom.zero(target_group, source_group)
        return GradedSpaceMap(self._name("f"), source, target, images, {x: flat for x in source.points})

    def _constant_map(self, source: GradedSpace, target: GradedSpace) -> GradedSpaceMap:
        y = self.rng.choice(target.points)
        group = target.lambdas[y]
        return GradedSpaceMap(
            self._name("c"),
            source,
            target,
            {x: y for x in source.points},
            {x: GroupHom.zero(group, source.lambdas[x]) for x in source.points},
        )

    # Faisceaux

    def summand(self, space: GradedSpace) -> GradedSheaf:
        """R_{U_x}⟨−λ⟩ restreint à une partie localement fermée tirée au hasard."""
        x = self.rng.choice(space.points)
        degree = self.rng.choice(list(space.lambdas[x].elements()))
        generator = generator_sheaf(space, self.ring, x, degree)
        if self.rng.random() < 0.5:
            return generator
        subsets = [s for s in space.poset.locally_closed_subsets() if s and x in s]
        return extend_by_zero(generator, self.rng.choice(subsets))

    def sheaf(self, space: GradedSpace, summands: Optional[int] = None) -> GradedSheaf:
        """Somme directe de 1 à 3 morceaux, parfois quotientée par l'image d'un morphisme aléatoire."""
        count = summands or self.rng.randint(1, 3)
        total = direct_sum_sheaf([self.summand(space) for _ in range(count)], space, self.ring, self._name("F"))
        if self.rng.random() < 0.3:
            source = self.summand(space)
            maps = hom_space(source, total)
            if maps.module.generators:
                blocks = maps.basis()[self.rng.randrange(maps.module.generators)]
                quotient, _ = cokernel_sheaf(map_from_blocks(source, total, blocks))
                return quotient.renamed(total.name)
        return total

    # Instances

    def map_instance(self, size: Optional[int] = None) -> MapInstance:
        source, target = self.space(size), self.space(size)
        f = self.space_map(source, target)
        return MapInstance(f, self.sheaf(source), self.sheaf(target))

    def square_instance(self) -> SquareInstance:
        base = self.space()
        first, second = self.space(), self.space()
        f, g = self.space_map(first, base), self.space_map(second, base)
        square = fiber_product(f, g, self._name("Z"))
        return SquareInstance(square, self.sheaf(square.f.source))

    def open_instance(self) -> OpenInstance:
        space = self.space()
        opened = self.rng.choice(space.poset.opens())
        return OpenInstance(self.sheaf(space), tuple(sorted(opened)))

    def module_instance(self) -> ModuleInstance:
        """f^* ⊣ f_* sur l'anneau constant (cas général des tests sur les fixtures annelées)."""
        instance = self.map_instance()
        ringed = RingedMap.constant(instance.f, self.ring)
        return ModuleInstance(
            ringed,
            RModuleSheaf.over_constant(instance.source_sheaf, ringed.source),
            RModuleSheaf.over_constant(instance.target_sheaf, ringed.target),
        )

    def batch(self, factory_name: str, count: int) -> List[object]:
        factory = getattr(self, factory_name)
        instances = [factory() for _ in range(count)]
        logger.debug("%s instances %s générées", len(instances), factory_name)
        return instances
