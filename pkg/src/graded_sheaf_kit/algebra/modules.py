"""
Modules de présentation finie et leurs morphismes.

Un module est le conoyau d'une matrice de relations (une colonne par relation)
sur un nombre fini de générateurs ; un morphisme est une matrice sur les
générateurs. Noyaux, conoyaux, images et homologie passent par la forme de Smith.
"""

from dataclasses import dataclass, field
from functools import cached_property
import logging
import re
from typing import Any, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import MismatchError
from .base_ring import BaseRing
from .matrices import (
    block_diagonal,
    hstack,
    identity,
    kron,
    matmul,
    zeros,
)
from .smith import SmithNormalForm

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ModuleInvariants:
    """
    Invariants d'un module relativement à l'anneau de base.

    Attributes:
        rank: Nombre de facteurs libres (sur Z/n, un facteur Z/n compte dans le rang)
        divisors: Diviseurs élémentaires de la torsion, croissants pour la divisibilité
    """

    rank: int
    divisors: Tuple[int, ...] = ()

    @property
    def is_zero(self) -> bool:
        return self.rank == 0 and not self.divisors

    def __str__(self) -> str:
        parts = []
        if self.rank:
            parts.append(f"R^{self.rank}" if self.rank > 1 else "R")
        parts.extend(f"R/{d}" for d in self.divisors)
        return " + ".join(parts) if parts else "0"


@dataclass(frozen=True, eq=False)
class Module:
    """
    Module de présentation finie coker(relations).

    Attributes:
        ring: Anneau de base
        generators: Nombre de générateurs
        relations: Matrice générateurs × relations
        torsion_included: Vrai si les relations n·I de Z/n sont déjà présentes
    """

    ring: BaseRing
    generators: int
    relations: np.ndarray = field(repr=False)
    torsion_included: bool = False

    def __post_init__(self) -> None:
        if self.generators < 0:
            raise ValueError(f"Nombre de générateurs négatif : {self.generators}")
        relations = np.asarray(self.relations, dtype=object)
        if relations.ndim != 2 or relations.shape[0] != self.generators:
            raise ValueError(
                f"Relations de forme {relations.shape} pour {self.generators} générateurs"
            )
        object.__setattr__(self, "relations", self.ring.reduce(relations))

    # Constructeurs

    @classmethod
    def zero(cls, ring: BaseRing) -> "Module":
        return cls(ring, 0, zeros(0, 0), True)

    @classmethod
    def free(cls, ring: BaseRing, rank: int) -> "Module":
        return cls(ring, rank, zeros(rank, 0))

    @classmethod
    def cyclic(cls, ring: BaseRing, order: int) -> "Module":
        """R/order (order = 0 donne R)."""
        return cls.from_invariants(ring, ModuleInvariants(0, (order,)) if order else ModuleInvariants(1))

    @classmethod
    def from_invariants(cls, ring: BaseRing, invariants: ModuleInvariants) -> "Module":
        n = invariants.rank + len(invariants.divisors)
        relations = zeros(n, len(invariants.divisors))
        for k, d in enumerate(invariants.divisors):
            relations[invariants.rank + k, k] = d
        return cls(ring, n, relations)

    @classmethod
    def parse(cls, text: str, ring: BaseRing) -> "Module":
        """
        Lit une description de module : 0, k, k^2, Z, Z^2+Z/4, R/3…

        Les lettres k, R, Z, F, Q désignent l'anneau de base lui-même.

        Raises:
            ValueError: Si la description est illisible
        """
        label = text.strip()
        if label == "0":
            return cls.zero(ring)
        rank = 0
        divisors: List[int] = []
        for term in label.split("+"):
            term = term.strip()
            match = re.fullmatch(r"[kRZFQ](?:\^(\d+))?", term)
            if match:
                rank += int(match.group(1) or 1)
                continue
            match = re.fullmatch(r"[kRZ]/(\d+)", term)
            if match:
                divisors.append(int(match.group(1)))
                continue
            raise ValueError(f"Description de module illisible : {text}")
        return cls.from_invariants(ring, ModuleInvariants(rank, tuple(divisors)))

    # Présentation et invariants

    @cached_property
    def presentation(self) -> np.ndarray:
        """Relations effectives (avec n·I pour Z/n)."""
        if self.ring.torsion and not self.torsion_included and self.generators:
            torsion = identity(self.generators) * self.ring.torsion
            return hstack([self.relations, torsion], self.generators)
        return self.relations

    @cached_property
    def smith(self) -> SmithNormalForm:
        return SmithNormalForm(self.presentation, self.ring)

    @cached_property
    def invariants(self) -> ModuleInvariants:
        diagonal = self.smith.diagonal
        orders = [diagonal[i] if i < len(diagonal) else 0 for i in range(self.generators)]
        rank = 0
        divisors: List[int] = []
        for order in orders:
            if order != 0 and self.ring.is_unit(order):
                continue
            if order == 0 or (self.ring.torsion and order % self.ring.torsion == 0):
                rank += 1
            else:
                divisors.append(abs(int(order)))
        return ModuleInvariants(rank, tuple(sorted(divisors)))

    def is_zero(self) -> bool:
        return self.invariants.is_zero

    @property
    def cardinality(self) -> Optional[int]:
        """Nombre d'éléments, None si le module est infini."""
        invariants = self.invariants
        total = 1
        for d in invariants.divisors:
            total *= d
        if invariants.rank:
            base = self.ring.cardinality
            if base is None:
                return None
            total *= base**invariants.rank
        return total

    def is_isomorphic(self, other: "Module") -> bool:
        return self.ring == other.ring and self.invariants == other.invariants

    def __str__(self) -> str:
        return str(self.invariants).replace("R", self.ring.label)

    # Éléments

    def contains(self, vectors: np.ndarray) -> bool:
        """Vrai si chaque colonne est nulle dans le module (dans l'image des relations)."""
        if vectors.shape[1] == 0 or self.generators == 0:
            return True
        return self.smith.solve(self.ring.reduce(vectors)) is not None

    def equal_elements(self, a: np.ndarray, b: np.ndarray) -> bool:
        return self.contains(self.ring.reduce(a - b))

    # Simplification

    @cached_property
    def simplified(self) -> "Simplification":
        """Présentation minimale diagonale et isomorphismes vers et depuis elle."""
        snf = self.smith
        diagonal = snf.diagonal
        kept = []
        orders = []
        for i in range(self.generators):
            order = diagonal[i] if i < len(diagonal) else 0
            if order != 0 and self.ring.is_unit(order):
                continue
            kept.append(i)
            orders.append(order)
        relations = zeros(len(kept), len(kept))
        for k, order in enumerate(orders):
            relations[k, k] = order
        module = Module(self.ring, len(kept), relations, True)
        return Simplification(
            module=module,
            to_new=snf.U[kept, :].copy() if kept else zeros(0, self.generators),
            from_new=snf.U_inv[:, kept].copy() if kept else zeros(self.generators, 0),
        )

    def diagonal_orders(self) -> Tuple[int, ...]:
        """Ordres des générateurs d'une présentation diagonale (0 = libre)."""
        columns = self.relations.shape[1]
        return tuple(abs(int(self.relations[i, i])) if i < columns else 0 for i in range(self.generators))


@dataclass(frozen=True, eq=False)
class Simplification:
    """
    Présentation minimale d'un module.

    Attributes:
        module: Module à relations diagonales sans facteur unité
        to_new: Isomorphisme ancien → nouveau (sur les générateurs)
        from_new: Isomorphisme nouveau → ancien
    """

    module: Module
    to_new: np.ndarray = field(repr=False)
    from_new: np.ndarray = field(repr=False)


def direct_sum(modules: Sequence[Module], ring: BaseRing) -> Tuple[Module, List[int]]:
    """
    Somme directe et positions des blocs de générateurs.

    Returns:
        Tuple (somme, décalages)
    """
    offsets: List[int] = []
    position = 0
    for module in modules:
        if module.ring != ring:
            raise MismatchError(f"Anneaux différents : {module.ring} et {ring}")
        offsets.append(position)
        position += module.generators
    presentation = block_diagonal([module.presentation for module in modules])
    return Module(ring, position, presentation, True), offsets


def tensor_product(a: Module, b: Module) -> Module:
    """A ⊗ B, générateurs e_i ⊗ e_j à l'indice i·gen(B) + j."""
    if a.ring != b.ring:
        raise MismatchError(f"Anneaux différents : {a.ring} et {b.ring}")
    relations = hstack(
        [kron(a.presentation, identity(b.generators)), kron(identity(a.generators), b.presentation)],
        a.generators * b.generators,
    )
    return Module(a.ring, a.generators * b.generators, relations, True)


def power(module: Module, count: int) -> Module:
    """Puissance directe N^count, vecteurs empilés colonne par colonne."""
    relations = kron(identity(count), module.presentation)
    return Module(module.ring, module.generators * count, relations, True)


@dataclass(frozen=True, eq=False)
class ModuleMap:
    """
    Morphisme de modules donné par sa matrice sur les générateurs.

    Attributes:
        source: Module de départ
        target: Module d'arrivée
        matrix: Matrice générateurs(cible) × générateurs(source)
    """

    source: Module
    target: Module
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if self.source.ring != self.target.ring:
            raise MismatchError(f"Anneaux différents : {self.source.ring} et {self.target.ring}")
        matrix = np.asarray(self.matrix, dtype=object)
        expected = (self.target.generators, self.source.generators)
        if matrix.size == 0:
            matrix = zeros(*expected)
        if matrix.shape != expected:
            raise ValueError(f"Matrice de forme {matrix.shape} au lieu de {expected}")
        object.__setattr__(self, "matrix", self.ring.reduce(matrix))

    @property
    def ring(self) -> BaseRing:
        return self.source.ring

    # Constructeurs

    @classmethod
    def identity(cls, module: Module) -> "ModuleMap":
        return cls(module, module, identity(module.generators))

    @classmethod
    def zero(cls, source: Module, target: Module) -> "ModuleMap":
        return cls(source, target, zeros(target.generators, source.generators))

    # Algèbre

    def is_well_defined(self) -> bool:
        """Les relations de la source sont envoyées dans celles de la cible."""
        return self.target.contains(matmul(self.matrix, self.source.presentation))

    def compose(self, other: "ModuleMap") -> "ModuleMap":
        """self ∘ other."""
        if other.target.generators != self.source.generators:
            raise MismatchError("Composition de morphismes non composables")
        return ModuleMap(other.source, self.target, matmul(self.matrix, other.matrix))

    def __add__(self, other: "ModuleMap") -> "ModuleMap":
        return ModuleMap(self.source, self.target, self.matrix + other.matrix)

    def __sub__(self, other: "ModuleMap") -> "ModuleMap":
        return ModuleMap(self.source, self.target, self.matrix - other.matrix)

    def scaled(self, factor: Any) -> "ModuleMap":
        return ModuleMap(self.source, self.target, self.matrix * factor)

    def is_zero(self) -> bool:
        return self.target.contains(self.matrix)

    def equals(self, other: "ModuleMap") -> bool:
        return (self - other).is_zero()

    # Noyau, image, conoyau

    @cached_property
    def _stacked_smith(self) -> SmithNormalForm:
        stacked = hstack([self.matrix, self.target.presentation], self.target.generators)
        return SmithNormalForm(stacked, self.ring)

    @cached_property
    def _kernel_data(self) -> np.ndarray:
        """Vecteurs de la source engendrant la préimage des relations de la cible."""
        basis = self._stacked_smith.kernel_basis()
        return basis[: self.source.generators, :]

    def kernel(self) -> "ModuleMap":
        """Inclusion ker → source, le noyau étant sous forme minimale."""
        generators = self._kernel_data
        k = generators.shape[1]
        stacked = hstack([generators, self.source.presentation], self.source.generators)
        relations = SmithNormalForm(stacked, self.ring).kernel_basis()[:k, :]
        kernel = Module(self.ring, k, relations, True).simplified
        logger.debug("Noyau : %s générateurs → %s", k, kernel.module.generators)
        return ModuleMap(kernel.module, self.source, matmul(generators, kernel.from_new))

    def image(self) -> "ModuleMap":
        """Inclusion im → cible, l'image étant sous forme minimale."""
        image = Module(self.ring, self.source.generators, self._kernel_data, True).simplified
        return ModuleMap(image.module, self.target, matmul(self.matrix, image.from_new))

    def coimage_projection(self) -> "ModuleMap":
        """Surjection source → im compatible avec image()."""
        image = Module(self.ring, self.source.generators, self._kernel_data, True).simplified
        return ModuleMap(self.source, image.module, image.to_new)

    def cokernel(self) -> "ModuleMap":
        """Projection cible → coker, le conoyau étant sous forme minimale."""
        relations = hstack([self.target.presentation, self.matrix], self.target.generators)
        quotient = Module(self.ring, self.target.generators, relations, True).simplified
        return ModuleMap(self.target, quotient.module, quotient.to_new)

    def is_injective(self) -> bool:
        return self.kernel().source.is_zero()

    def is_surjective(self) -> bool:
        return self.cokernel().target.is_zero()

    def is_isomorphism(self) -> bool:
        return self.is_injective() and self.is_surjective()

    # Relèvements

    def solve(self, rhs: np.ndarray) -> Optional[np.ndarray]:
        """
        Trouve X avec self·X ≡ rhs modulo les relations de la cible.

        Returns:
            Matrice X (générateurs source × colonnes de rhs) ou None
        """
        if rhs.shape[1] == 0:
            return zeros(self.source.generators, 0)
        if self.target.generators == 0:
            return zeros(self.source.generators, rhs.shape[1])
        solution = self._stacked_smith.solve(self.ring.reduce(rhs))
        if solution is None:
            return None
        return solution[: self.source.generators, :]

    def lift(self, other: "ModuleMap") -> "ModuleMap":
        """
        Factorise other : S → T à travers self : K → T (other = self ∘ résultat).

        Raises:
            ValueError: Si l'image de other n'est pas dans celle de self
        """
        solution = self.solve(other.matrix)
        if solution is None:
            raise ValueError("Le morphisme ne se factorise pas à travers l'inclusion")
        return ModuleMap(other.source, self.source, solution)

    def section(self) -> np.ndarray:
        """
        Préimages des générateurs de la cible (morphisme surjectif).

        Raises:
            ValueError: Si le morphisme n'est pas surjectif
        """
        solution = self.solve(identity(self.target.generators))
        if solution is None:
            raise ValueError("Section demandée pour un morphisme non surjectif")
        return solution

    def inverse(self) -> "ModuleMap":
        """
        Inverse d'un isomorphisme.

        Raises:
            ValueError: Si le morphisme n'est pas un isomorphisme
        """
        if not self.is_injective():
            raise ValueError("Inverse demandé pour un morphisme non injectif")
        return ModuleMap(self.target, self.source, self.section())

    def descend(self, other: "ModuleMap") -> "ModuleMap":
        """
        Morphisme induit coker → X par other : T → X nul sur le noyau de self (surjectif).
        """
        return ModuleMap(self.target, other.target, matmul(other.matrix, self.section()))


def tensor_maps(f: ModuleMap, g: ModuleMap) -> ModuleMap:
    return ModuleMap(
        tensor_product(f.source, g.source), tensor_product(f.target, g.target), kron(f.matrix, g.matrix)
    )


def direct_sum_map(maps: Sequence[ModuleMap], ring: BaseRing) -> ModuleMap:
    source, _ = direct_sum([m.source for m in maps], ring)
    target, _ = direct_sum([m.target for m in maps], ring)
    return ModuleMap(source, target, block_diagonal([m.matrix for m in maps]))


@dataclass(frozen=True, eq=False)
class Homology:
    """
    Homologie ker g / im f d'une paire composable.

    Attributes:
        module: Module d'homologie
        cycles: Inclusion ker g → milieu
        projection: Projection ker g → homologie
    """

    module: Module
    cycles: ModuleMap
    projection: ModuleMap


def homology(f: ModuleMap, g: ModuleMap) -> Homology:
    """
    Homologie de A --f--> B --g--> C.

    Raises:
        ValueError: Si g ∘ f n'est pas nul
    """
    if not g.compose(f).is_zero():
        raise ValueError("Paire non composable en complexe : g ∘ f ≠ 0")
    cycles = g.kernel()
    boundaries = cycles.lift(f)
    projection = boundaries.cokernel()
    return Homology(projection.target, cycles, projection)


def is_exact(f: ModuleMap, g: ModuleMap) -> bool:
    """Exactitude en B de A → B → C (homologie nulle)."""
    return homology(f, g).module.is_zero()


def hom_module(a: Module, b: Module) -> Tuple[Module, np.ndarray]:
    """
    Hom_R(A, B) comme noyau de B^g → B^r.

    Returns:
        Tuple (module Hom, plongement vers vec(X) pour X matrice gen(B) × gen(A))
    """
    ambient = power(b, a.generators)
    constraint = ModuleMap(
        ambient,
        power(b, a.presentation.shape[1]),
        kron(a.presentation.T.copy(), identity(b.generators)),
    )
    inclusion = constraint.kernel()
    return inclusion.source, inclusion.matrix
