"""
Structure abélienne : noyaux, conoyaux, images et homologie, calculés tige par tige.
"""

from dataclasses import dataclass
import logging
from typing import Dict, Iterable, List, Tuple

from ..algebra.graded import GradedMap, GradedModule
from ..algebra.grading import Degree
from ..algebra.modules import Homology, Module, ModuleMap, homology
from ..domain.poset import Point
from ..domain.sheaf import GradedSheaf, SheafMap
from .functors import closed_restriction_map, extend_by_zero_map, open_extension_map

logger = logging.getLogger(__name__)


def _require_degree_zero(phi: SheafMap) -> None:
    if phi.degree is not None:
        raise ValueError(f"Morphisme de degré {phi.degree} : décaler le but au préalable")


def kernel_sheaf(phi: SheafMap) -> Tuple[GradedSheaf, SheafMap]:
    """
    Noyau de φ et son inclusion.

    Raises:
        ValueError: Si φ n'est pas de degré 0
    """
    _require_degree_zero(phi)
    source = phi.source
    space = source.space
    inclusions: Dict[Point, Dict[Degree, ModuleMap]] = {
        x: {d: phi.components[x].module_map(d).kernel() for d in source.stalks[x].parts} for x in space.points
    }
    stalks = {
        x: GradedModule(space.lambdas[x], source.ring, {d: m.source for d, m in inclusions[x].items()})
        for x in space.points
    }
    restrictions = {}
    for (x, y), restriction in source.restrictions.items():
        blocks = {}
        for d, inclusion in inclusions[x].items():
            image = restriction.target_degree(d)
            if image not in inclusions[y]:
                continue
            moved = ModuleMap(inclusion.target, source.stalks[y].part(image), restriction.block(d)).compose(inclusion)
            blocks[d] = inclusions[y][image].lift(moved).matrix
        restrictions[(x, y)] = GradedMap(stalks[x], stalks[y], blocks, space.lres[(x, y)])
    kernel = GradedSheaf(f"ker({source.name}→{phi.target.name})", space, source.ring, stalks, restrictions)
    inclusion = SheafMap(
        kernel,
        source,
        {
            x: GradedMap(kernel.stalks[x], source.stalks[x], {d: m.matrix for d, m in inclusions[x].items()})
            for x in space.points
        },
    )
    return kernel, inclusion


def cokernel_sheaf(phi: SheafMap) -> Tuple[GradedSheaf, SheafMap]:
    """Conoyau de φ et sa projection."""
    _require_degree_zero(phi)
    target = phi.target
    space = target.space
    projections: Dict[Point, Dict[Degree, ModuleMap]] = {}
    for x in space.points:
        component = phi.components[x]
        projections[x] = {}
        for d, module in target.stalks[x].parts.items():
            incoming = ModuleMap(phi.source.stalks[x].part(d), module, component.block(d))
            projections[x][d] = incoming.cokernel()
    stalks = {
        x: GradedModule(space.lambdas[x], target.ring, {d: p.target for d, p in projections[x].items()})
        for x in space.points
    }
    restrictions = {}
    for (x, y), restriction in target.restrictions.items():
        blocks = {}
        for d, projection in projections[x].items():
            image = restriction.target_degree(d)
            if image not in projections[y]:
                continue
            moved = projections[y][image].compose(
                ModuleMap(projection.source, target.stalks[y].part(image), restriction.block(d))
            )
            blocks[d] = projection.descend(moved).matrix
        restrictions[(x, y)] = GradedMap(stalks[x], stalks[y], blocks, space.lres[(x, y)])
    cokernel = GradedSheaf(f"coker({phi.source.name}→{target.name})", space, target.ring, stalks, restrictions)
    projection = SheafMap(
        target,
        cokernel,
        {
            x: GradedMap(target.stalks[x], cokernel.stalks[x], {d: p.matrix for d, p in projections[x].items()})
            for x in space.points
        },
    )
    return cokernel, projection


def image_sheaf(phi: SheafMap) -> Tuple[GradedSheaf, SheafMap]:
    """Image de φ et son inclusion dans le but."""
    _require_degree_zero(phi)
    source, target = phi.source, phi.target
    space = target.space
    inclusions: Dict[Point, Dict[Degree, ModuleMap]] = {
        x: {d: phi.components[x].module_map(d).image() for d in source.stalks[x].parts} for x in space.points
    }
    stalks = {
        x: GradedModule(space.lambdas[x], target.ring, {d: m.source for d, m in inclusions[x].items()})
        for x in space.points
    }
    restrictions = {}
    for (x, y), restriction in target.restrictions.items():
        blocks = {}
        for d, inclusion in inclusions[x].items():
            image = restriction.target_degree(d)
            if image not in inclusions[y]:
                continue
            moved = ModuleMap(inclusion.target, target.stalks[y].part(image), restriction.block(d)).compose(inclusion)
            blocks[d] = inclusions[y][image].lift(moved).matrix
        restrictions[(x, y)] = GradedMap(stalks[x], stalks[y], blocks, space.lres[(x, y)])
    result = GradedSheaf(f"im({source.name}→{target.name})", space, target.ring, stalks, restrictions)
    inclusion = SheafMap(
        result,
        target,
        {
            x: GradedMap(result.stalks[x], target.stalks[x], {d: m.matrix for d, m in inclusions[x].items()})
            for x in space.points
        },
    )
    return result, inclusion


def _pointwise_homology(incoming: SheafMap, outgoing: SheafMap, x: Point, d: Degree) -> Homology:
    middle = outgoing.source.stalks[x].part(d)
    f = ModuleMap(incoming.source.stalks[x].part(d), middle, incoming.components[x].block(d))
    g = ModuleMap(middle, outgoing.target.stalks[x].part(d), outgoing.components[x].block(d))
    return homology(f, g)


def homology_sheaf(incoming: SheafMap, outgoing: SheafMap, name: str = "H") -> GradedSheaf:
    """
    Faisceau d'homologie ker ψ / im φ de A --φ--> B --ψ--> C.

    Raises:
        ValueError: Si ψ ∘ φ ≠ 0 en une tige
    """
    _require_degree_zero(incoming)
    _require_degree_zero(outgoing)
    middle = outgoing.source
    space = middle.space
    data: Dict[Point, Dict[Degree, Homology]] = {
        x: {d: _pointwise_homology(incoming, outgoing, x, d) for d in middle.stalks[x].parts} for x in space.points
    }
    stalks = {
        x: GradedModule(space.lambdas[x], middle.ring, {d: h.module for d, h in data[x].items()})
        for x in space.points
    }
    restrictions = {}
    for (x, y), restriction in middle.restrictions.items():
        blocks = {}
        for d, here in data[x].items():
            image = restriction.target_degree(d)
            there = data[y].get(image)
            if there is None:
                continue
            moved = ModuleMap(here.cycles.target, there.cycles.target, restriction.block(d)).compose(here.cycles)
            lifted = there.cycles.lift(moved)
            blocks[d] = here.projection.descend(there.projection.compose(lifted)).matrix
        restrictions[(x, y)] = GradedMap(stalks[x], stalks[y], blocks, space.lres[(x, y)])
    return GradedSheaf(name, space, middle.ring, stalks, restrictions)


def exactness_failures(incoming: SheafMap, outgoing: SheafMap) -> List[Tuple[Point, Degree, Module]]:
    """Tiges et degrés où l'homologie au milieu est non nulle."""
    failures = []
    middle = outgoing.source
    for x in middle.space.points:
        for d in middle.stalks[x].parts:
            module = _pointwise_homology(incoming, outgoing, x, d).module
            if not module.is_zero():
                failures.append((x, d, module))
    return failures


def is_exact_pair(incoming: SheafMap, outgoing: SheafMap) -> bool:
    return not exactness_failures(incoming, outgoing)


def is_injective(phi: SheafMap) -> bool:
    return all(
        phi.components[x].module_map(d).is_injective()
        for x in phi.source.space.points
        for d in phi.source.stalks[x].parts
    )


def is_surjective(phi: SheafMap) -> bool:
    target = phi.target
    for x in target.space.points:
        for d, module in target.stalks[x].parts.items():
            incoming = ModuleMap(phi.source.stalks[x].part(d), module, phi.components[x].block(d))
            if not incoming.is_surjective():
                return False
    return True


@dataclass(frozen=True, eq=False)
class ShortExactSequence:
    """
    Suite 0 → A → B → C → 0 et son certificat d'exactitude.

    Attributes:
        inclusion: A → B
        projection: B → C
    """

    inclusion: SheafMap
    projection: SheafMap

    @property
    def terms(self) -> Tuple[GradedSheaf, GradedSheaf, GradedSheaf]:
        return self.inclusion.source, self.inclusion.target, self.projection.target

    def failures(self) -> List[str]:
        problems = []
        if not is_injective(self.inclusion):
            problems.append("la première flèche n'est pas injective")
        if not is_surjective(self.projection):
            problems.append("la seconde flèche n'est pas surjective")
        for x, d, module in exactness_failures(self.inclusion, self.projection):
            problems.append(f"homologie {module} au milieu en {x}, degré {list(d)}")
        return problems

    def is_exact(self) -> bool:
        return not self.failures()


def basic_exact_sequence(sheaf: GradedSheaf, subset: Iterable[str]) -> ShortExactSequence:
    """
    0 → F_U → F → F_{X∖U} → 0 pour U ouvert.

    Raises:
        NotOpenError: Si U n'est pas ouvert
    """
    opened = sheaf.space.poset.require_open(subset)
    closed = frozenset(sheaf.space.points) - opened
    sequence = ShortExactSequence(open_extension_map(sheaf, opened), closed_restriction_map(sheaf, closed))
    logger.debug(
        "Suite exacte de base pour %s sur %s : %s",
        sheaf.name,
        sorted(opened),
        [t.name for t in sequence.terms],
    )
    return sequence


def stalk_table(sheaf: GradedSheaf) -> Dict[Point, Dict[Degree, Module]]:
    """Parties non nulles de chaque tige."""
    return {x: dict(sheaf.stalks[x].parts) for x in sheaf.space.points}


def restrict_sequence_to(sequence: ShortExactSequence, subset: Iterable[str]) -> ShortExactSequence:
    """Suite prolongée par zéro hors d'un localement fermé (foncteur exact)."""
    chosen = frozenset(subset)
    return ShortExactSequence(
        extend_by_zero_map(sequence.inclusion, chosen), extend_by_zero_map(sequence.projection, chosen)
    )

