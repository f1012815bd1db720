"""
Espaces gradués annelés, faisceaux de modules et morphismes annelés.

Les tiges de l'anneau structural sont des anneaux gradués libres de rang fini
(GradedRingData) ; l'action sur un module est donnée, en chaque point, par la
multiplication par chaque élément de base e_i, un morphisme gradué de décalage
deg e_i.
"""

from dataclasses import dataclass, field
import logging
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..algebra.base_ring import BaseRing
from ..algebra.graded import GradedMap, GradedModule
from ..algebra.grading import Degree
from ..algebra.matrices import identity, matmul, zeros
from ..algebra.modules import Module, ModuleMap
from ..algebra.rings import GradedRingData, is_ring_homomorphism
from ..errors import MismatchError
from .diagnostics import Diagnostic
from .poset import Point
from .sheaf import GradedSheaf
from .space import GradedSpace, GradedSpaceMap

logger = logging.getLogger(__name__)


def ring_part_block(
    ring: GradedRingData, target: GradedRingData, matrix: np.ndarray, degree: Degree, image: Degree
) -> np.ndarray:
    """Bloc d'une matrice base → base entre les parties de degré `degree` et `image`."""
    rows = target.basis_in_degree(image)
    cols = ring.basis_in_degree(degree)
    block = zeros(len(rows), len(cols))
    for r, k in enumerate(rows):
        for c, j in enumerate(cols):
            block[r, c] = matrix[k, j]
    return block


def multiplication_map(ring: GradedRingData, index: int) -> GradedMap:
    """Multiplication par e_index sur R, comme morphisme gradué de décalage deg e_index."""
    module = ring.as_graded_module()
    shift = ring.basis_degrees[index]
    matrix = ring.multiplication_matrix(index)
    blocks = {
        degree: ring_part_block(ring, ring, matrix, degree, ring.grading.add(degree, shift))
        for degree in module.parts
    }
    return GradedMap(module, module, blocks, None, shift)


@dataclass(frozen=True, eq=False)
class RingedGradedSpace:
    """
    Triple (X, Λ, R) avec R faisceau d'anneaux Λ-gradués.

    Attributes:
        name: Nom
        space: Espace gradué sous-jacent
        rings: Tige R_x, graduée par Λ_x
        restrictions: Matrices base(R_x) → base(R_y) pour les couvertures x < y
    """

    name: str
    space: GradedSpace
    rings: Mapping[Point, GradedRingData]
    restrictions: Mapping[Tuple[Point, Point], np.ndarray] = field(default_factory=dict, repr=False)
    _cache: Dict[object, object] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        bases = {r.ring for r in self.rings.values()}
        if len(bases) > 1:
            raise MismatchError(f"Anneaux de base différents : {sorted(str(b) for b in bases)}")
        for x in self.space.points:
            if x not in self.rings:
                raise ValueError(f"Anneau manquant au point {x}")
            if self.rings[x].grading != self.space.lambdas[x]:
                raise MismatchError(f"Anneau en {x} gradué par {self.rings[x].grading} au lieu de Λ_{x}")
        restrictions: Dict[Tuple[Point, Point], np.ndarray] = {}
        for x, y in self.space.poset.covers:
            if (x, y) not in self.restrictions:
                raise ValueError(f"Restriction d'anneau manquante : {x} → {y}")
            matrix = np.asarray(self.restrictions[(x, y)], dtype=object)
            expected = (self.rings[y].dimension, self.rings[x].dimension)
            if matrix.shape != expected:
                raise ValueError(f"Restriction d'anneau {x} → {y} de forme {matrix.shape} au lieu de {expected}")
            restrictions[(x, y)] = self.base_ring.reduce(matrix)
        object.__setattr__(self, "restrictions", restrictions)

    @classmethod
    def constant(cls, space: GradedSpace, ring: BaseRing, name: Optional[str] = None) -> "RingedGradedSpace":
        """R = anneau de base constant en degré 0."""
        return cls(
            name or f"{space.name}_{ring.label}",
            space,
            {x: GradedRingData.base(ring, space.lambdas[x]) for x in space.points},
            {c: identity(1) for c in space.poset.covers},
        )

    @property
    def base_ring(self) -> BaseRing:
        return next(iter(self.rings.values())).ring

    def ring_at(self, x: Point) -> GradedRingData:
        return self.rings[x]

    def is_constant(self) -> bool:
        return all(r.dimension == 1 for r in self.rings.values())

    def ring_restriction(self, x: Point, y: Point) -> np.ndarray:
        """Matrice base(R_x) → base(R_y) pour x ≤ y."""
        key = ("rres", x, y)
        if key not in self._cache:
            result = identity(self.rings[x].dimension)
            for a, b in self.space.poset.path(x, y):
                result = matmul(self.restrictions[(a, b)], result)
            self._cache[key] = self.base_ring.reduce(result)
        return self._cache[key]  # type: ignore[return-value]

    def structure_sheaf(self) -> GradedSheaf:
        """R vu comme faisceau gradué (sans sa multiplication)."""
        if "structure" not in self._cache:
            stalks = {x: r.as_graded_module() for x, r in self.rings.items()}
            restrictions = {}
            for (x, y), matrix in self.restrictions.items():
                lres = self.space.lres[(x, y)]
                source, target = self.rings[x], self.rings[y]
                blocks = {
                    degree: ring_part_block(source, target, matrix, degree, lres.apply(degree))
                    for degree in stalks[x].parts
                }
                restrictions[(x, y)] = GradedMap(stalks[x], stalks[y], blocks, lres)
            self._cache["structure"] = GradedSheaf(f"R_{self.name}", self.space, self.base_ring, stalks, restrictions)
        return self._cache["structure"]  # type: ignore[return-value]

    def diagnostics(self) -> List[Diagnostic]:
        """Lois d'anneau, restrictions unitaires multiplicatives et compatibles aux degrés."""
        problems: List[Diagnostic] = []
        for x, ring in self.rings.items():
            for message in ring.diagnostics():
                problems.append(Diagnostic("RING_AXIOM", f"{self.name}: {x}", message))
        for (x, y), matrix in self.restrictions.items():
            lres = self.space.lres[(x, y)]
            regraded = self.rings[x].regraded(lres)
            for message in is_ring_homomorphism(matrix, regraded, self.rings[y]):
                problems.append(Diagnostic("RING_RESTRICTION", f"{self.name}: {x} → {y}", message))
            for j, degree in enumerate(self.rings[x].basis_degrees):
                image = lres.apply(degree)
                for k, target_degree in enumerate(self.rings[y].basis_degrees):
                    if target_degree != image and not self.base_ring.is_zero(matrix[k, j]):
                        problems.append(
                            Diagnostic(
                                "RING_RESTRICTION",
                                f"{self.name}: {x} → {y}",
                                f"e{j} envoyé hors du degré {list(image)}",
                            )
                        )
        problems.extend(self.structure_sheaf().diagnostics())
        return problems


@dataclass(frozen=True, eq=False)
class RModuleSheaf:
    """
    Faisceau gradué muni d'une action de R.

    Attributes:
        ringed: Espace annelé
        sheaf: Faisceau sous-jacent
        actions: En chaque point, multiplication par chaque e_i (décalage deg e_i)
    """

    ringed: RingedGradedSpace
    sheaf: GradedSheaf
    actions: Mapping[Point, Tuple[GradedMap, ...]] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        if self.sheaf.space is not self.ringed.space and self.sheaf.space.name != self.ringed.space.name:
            raise MismatchError(f"Faisceau {self.sheaf.name} hors de {self.ringed.name}")
        actions: Dict[Point, Tuple[GradedMap, ...]] = {}
        for x in self.sheaf.space.points:
            ring = self.ringed.rings[x]
            stalk = self.sheaf.stalks[x]
            given = self.actions.get(x)
            if given is None:
                if ring.dimension != 1:
                    raise ValueError(f"Action manquante au point {x}")
                given = (GradedMap.identity(stalk),)
            if len(given) != ring.dimension:
                raise ValueError(f"Action en {x} : {len(given)} matrices au lieu de {ring.dimension}")
            actions[x] = tuple(
                GradedMap(stalk, stalk, act.blocks, None, ring.basis_degrees[i]) for i, act in enumerate(given)
            )
        object.__setattr__(self, "actions", actions)

    # Constructeurs

    @classmethod
    def free(cls, ringed: RingedGradedSpace) -> "RModuleSheaf":
        """R comme module sur lui-même."""
        actions = {
            x: tuple(multiplication_map(ring, i) for i in range(ring.dimension)) for x, ring in ringed.rings.items()
        }
        sheaf = ringed.structure_sheaf()
        return cls(ringed, sheaf, {x: _rebase(acts, sheaf.stalks[x]) for x, acts in actions.items()})

    @classmethod
    def over_constant(cls, sheaf: GradedSheaf, ringed: Optional[RingedGradedSpace] = None) -> "RModuleSheaf":
        """Faisceau de modules sur l'anneau de base constant."""
        ringed = ringed or RingedGradedSpace.constant(sheaf.space, sheaf.ring)
        if not ringed.is_constant():
            raise ValueError(f"{ringed.name} n'est pas l'anneau constant")
        return cls(ringed, sheaf)

    # Accès

    @property
    def name(self) -> str:
        return self.sheaf.name

    def action(self, x: Point, index: int) -> GradedMap:
        return self.actions[x][index]

    def act_element(self, x: Point, vector: Sequence[object], degree: Degree) -> GradedMap:
        """Multiplication par Σ v_i e_i, élément homogène de degré `degree`."""
        ring = self.ringed.rings[x]
        stalk = self.sheaf.stalks[x]
        result = GradedMap.zero(stalk, stalk, None, ring.grading.normalize(degree))
        for i, value in enumerate(vector):
            if self.ringed.base_ring.is_zero(value):
                continue
            if ring.basis_degrees[i] != ring.grading.normalize(degree):
                raise ValueError(f"Élément non homogène de degré {list(degree)} en {x}")
            result = result.combine(self.actions[x][i], int(value))
        return result

    def diagnostics(self) -> List[Diagnostic]:
        """Unité, associativité et compatibilité de l'action aux restrictions."""
        problems = list(self.sheaf.diagnostics())
        base = self.ringed.base_ring
        for x, acts in self.actions.items():
            ring = self.ringed.rings[x]
            stalk = self.sheaf.stalks[x]
            if not acts[0].equals(GradedMap.identity(stalk)):
                problems.append(Diagnostic("ACTION_UNIT", f"{self.name}: {x}", "e0 n'agit pas par l'identité"))
            for i in range(ring.dimension):
                for j in range(ring.dimension):
                    degree = ring.grading.add(ring.basis_degrees[i], ring.basis_degrees[j])
                    product = self.act_element(x, ring.structure[i, j, :], degree)
                    if not acts[i].compose(acts[j]).equals(product):
                        problems.append(
                            Diagnostic(
                                "ACTION_ASSOCIATIVITY", f"{self.name}: {x}", f"e{i}·(e{j}·m) ≠ (e{i}e{j})·m"
                            )
                        )
        for (x, y), restriction in self.sheaf.restrictions.items():
            matrix = self.ringed.restrictions[(x, y)]
            lres = self.sheaf.space.lres[(x, y)]
            for i, degree in enumerate(self.ringed.rings[x].basis_degrees):
                if not any(not base.is_zero(v) for v in matrix[:, i]):
                    image = GradedMap.zero(self.sheaf.stalks[y], self.sheaf.stalks[y], None, lres.apply(degree))
                else:
                    image = self.act_element(y, matrix[:, i], lres.apply(degree))
                left = restriction.compose(self.actions[x][i])
                right = image.compose(restriction)
                if not left.equals(right):
                    problems.append(
                        Diagnostic(
                            "ACTION_NOT_NATURAL",
                            f"{self.name}: {x} → {y}",
                            f"ρ(e{i}·m) ≠ ρ(e{i})·ρ(m)",
                        )
                    )
        return problems


def _rebase(actions: Sequence[GradedMap], stalk: GradedModule) -> Tuple[GradedMap, ...]:
    return tuple(GradedMap(stalk, stalk, act.blocks, None, act.shift) for act in actions)


@dataclass(frozen=True, eq=False)
class RingedMap:
    """
    Morphisme annelé (f, f♭, f♯).

    Attributes:
        name: Nom
        source: Espace annelé X
        target: Espace annelé Y
        space_map: Morphisme gradué sous-jacent
        sharps: f♯_x : base(R_{Y,f(x)}) → base(R_{X,x})
    """

    name: str
    source: RingedGradedSpace
    target: RingedGradedSpace
    space_map: GradedSpaceMap
    sharps: Mapping[Point, np.ndarray] = field(repr=False)

    def __post_init__(self) -> None:
        f = self.space_map
        sharps: Dict[Point, np.ndarray] = {}
        for x in f.source.points:
            if x not in self.sharps:
                raise ValueError(f"f♯ manquant au point {x}")
            matrix = np.asarray(self.sharps[x], dtype=object)
            expected = (self.source.rings[x].dimension, self.target.rings[f(x)].dimension)
            if matrix.shape != expected:
                raise ValueError(f"f♯ en {x} de forme {matrix.shape} au lieu de {expected}")
            sharps[x] = self.source.base_ring.reduce(matrix)
        object.__setattr__(self, "sharps", sharps)

    @classmethod
    def constant(cls, space_map: GradedSpaceMap, ring: BaseRing) -> "RingedMap":
        """Morphisme entre anneaux constants, f♯ = identité."""
        return cls(
            space_map.name,
            RingedGradedSpace.constant(space_map.source, ring),
            RingedGradedSpace.constant(space_map.target, ring),
            space_map,
            {x: identity(1) for x in space_map.source.points},
        )

    @classmethod
    def identity(cls, ringed: RingedGradedSpace) -> "RingedMap":
        return cls(
            f"id_{ringed.name}",
            ringed,
            ringed,
            GradedSpaceMap.identity(ringed.space),
            {x: identity(r.dimension) for x, r in ringed.rings.items()},
        )

    def is_strict(self) -> bool:
        if not self.space_map.is_strict():
            return False
        for x, matrix in self.sharps.items():
            free_source = Module.free(self.source.base_ring, matrix.shape[1])
            free_target = Module.free(self.source.base_ring, matrix.shape[0])
            if not ModuleMap(free_source, free_target, matrix).is_isomorphism():
                return False
        return True

    def compose_after(self, other: "RingedMap") -> "RingedMap":
        """self ∘ other : f♯ de la composée = f♯_other ∘ f♯_self."""
        space_map = self.space_map.compose_after(other.space_map)
        sharps = {
            x: matmul(other.sharps[x], self.sharps[other.space_map(x)]) for x in other.space_map.source.points
        }
        return RingedMap(space_map.name, other.source, self.target, space_map, sharps)

    def diagnostics(self) -> List[Diagnostic]:
        f = self.space_map
        problems = list(f.diagnostics())
        for x, matrix in self.sharps.items():
            regraded = self.target.rings[f(x)].regraded(f.flats[x])
            for message in is_ring_homomorphism(matrix, regraded, self.source.rings[x]):
                problems.append(Diagnostic("SHARP_NOT_RING_MAP", f"{self.name}: {x}", message))
        for x, y in f.source.poset.covers:
            left = matmul(self.source.restrictions[(x, y)], self.sharps[x])
            right = matmul(self.sharps[y], self.target.ring_restriction(f(x), f(y)))
            if not self.source.base_ring.matrices_equal(left, right):
                problems.append(
                    Diagnostic("SHARP_NOT_NATURAL", f"{self.name}: {x} < {y}", "f♯ ne commute pas aux restrictions")
                )
        return problems
