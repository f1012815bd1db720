"""
Groupes abéliens de type fini servant de groupes de degrés, et leurs morphismes.

Un groupe est stocké sous forme canonique Z/d_1 × … × Z/d_k × Z^r avec
d_1 | d_2 | … | d_k et d_i ≥ 2 ; ses éléments sont des tuples d'entiers réduits.
"""

from dataclasses import dataclass, field
from functools import cached_property
import itertools
import logging
import re
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .base_ring import ZZ
from .matrices import identity, matmul, zeros
from .modules import Module, ModuleMap

logger = logging.getLogger(__name__)

Degree = Tuple[int, ...]


@dataclass(frozen=True)
class DegreeWindow:
    """
    Fenêtre bornant les coordonnées libres lors d'une matérialisation.

    Attributes:
        low: Borne inférieure incluse
        high: Borne supérieure incluse
    """

    low: int
    high: int

    def __post_init__(self) -> None:
        if self.low > self.high:
            raise ValueError(f"Fenêtre de degrés vide : {self.low}..{self.high}")

    @classmethod
    def parse(cls, text: str) -> "DegreeWindow":
        """Lit une fenêtre de la forme '-2..3'."""
        match = re.fullmatch(r"\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*", text)
        if not match:
            raise ValueError(f"Fenêtre de degrés illisible : {text}")
        return cls(int(match.group(1)), int(match.group(2)))


@dataclass(frozen=True)
class GradingGroup:
    """
    Groupe de degrés Z/d_1 × … × Z/d_k × Z^r sous forme canonique.

    Attributes:
        orders: Ordre de chaque coordonnée (0 pour Z)
    """

    orders: Tuple[int, ...] = ()

    def __post_init__(self) -> None:
        orders = tuple(int(d) for d in self.orders)
        torsion = [d for d in orders if d]
        if any(d < 2 for d in torsion):
            raise ValueError(f"Ordre de coordonnée invalide : {orders}")
        if orders[: len(torsion)] != tuple(torsion):
            raise ValueError(f"La torsion doit précéder les facteurs libres : {orders}")
        if any(b % a for a, b in zip(torsion, torsion[1:])):
            raise ValueError(f"Groupe non canonique (d_i | d_i+1 requis) : {orders}")
        object.__setattr__(self, "orders", orders)

    # Constructeurs

    @classmethod
    def trivial(cls) -> "GradingGroup":
        return cls(())

    @classmethod
    def integers(cls, rank: int = 1) -> "GradingGroup":
        return cls((0,) * rank)

    @classmethod
    def cyclic(cls, order: int) -> "GradingGroup":
        return cls((order,)) if order != 1 else cls(())

    @classmethod
    def parse(cls, text: str) -> "GradingGroup":
        """
        Lit un groupe canonique : 0, Z, Z/3, Z/2+Z, Z/2+Z/4+Z^2.

        Raises:
            ValueError: Si l'écriture n'est pas canonique
        """
        label = text.strip()
        if label == "0":
            return cls.trivial()
        orders: List[int] = []
        for term in label.split("+"):
            term = term.strip()
            match = re.fullmatch(r"Z(?:\^(\d+))?", term)
            if match:
                orders.extend([0] * int(match.group(1) or 1))
                continue
            match = re.fullmatch(r"Z/(\d+)", term)
            if match:
                orders.append(int(match.group(1)))
                continue
            raise ValueError(f"Groupe de degrés illisible : {text}")
        return cls(tuple(orders))

    @classmethod
    def from_module(cls, module: Module) -> Tuple["GradingGroup", np.ndarray, np.ndarray]:
        """
        Forme canonique d'un Z-module de type fini.

        Returns:
            Tuple (groupe, coordonnées anciennes → canoniques, canoniques → anciennes)
        """
        simple = module.simplified
        group = cls(simple.module.diagonal_orders())
        return group, simple.to_new, simple.from_new

    # Propriétés

    @property
    def rank(self) -> int:
        """Nombre de coordonnées."""
        return len(self.orders)

    @property
    def free_rank(self) -> int:
        return sum(1 for d in self.orders if d == 0)

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    @property
    def cardinality(self) -> Optional[int]:
        if not self.is_finite:
            return None
        total = 1
        for d in self.orders:
            total *= d
        return total

    @property
    def label(self) -> str:
        if not self.orders:
            return "0"
        return "+".join(f"Z/{d}" if d else "Z" for d in self.orders)

    def __str__(self) -> str:
        return self.label

    @cached_property
    def as_module(self) -> Module:
        relations = zeros(self.rank, self.rank)
        for i, d in enumerate(self.orders):
            relations[i, i] = d
        return Module(ZZ, self.rank, relations, True)

    # Éléments

    def zero(self) -> Degree:
        return (0,) * self.rank

    def normalize(self, element: Sequence[int]) -> Degree:
        if len(element) != self.rank:
            raise ValueError(f"Degré hors du groupe {self.label} : {tuple(element)}")
        return tuple(int(x) % d if d else int(x) for x, d in zip(element, self.orders))

    def add(self, a: Sequence[int], b: Sequence[int]) -> Degree:
        return self.normalize([x + y for x, y in zip(a, b)])

    def neg(self, a: Sequence[int]) -> Degree:
        return self.normalize([-x for x in a])

    def sub(self, a: Sequence[int], b: Sequence[int]) -> Degree:
        return self.normalize([x - y for x, y in zip(a, b)])

    def elements(self, window: Optional[DegreeWindow] = None) -> Iterator[Degree]:
        """
        Énumère les éléments (les coordonnées libres dans la fenêtre).

        Raises:
            ValueError: Pour un groupe infini sans fenêtre
        """
        if not self.is_finite and window is None:
            raise ValueError(f"Énumération d'un groupe infini sans fenêtre : {self.label}")
        ranges = [
            range(d) if d else range(window.low, window.high + 1)  # type: ignore[union-attr]
            for d in self.orders
        ]
        for element in itertools.product(*ranges):
            yield tuple(element)


def format_degree(degree: Sequence[int]) -> str:
    return "[" + ",".join(str(x) for x in degree) + "]"


@dataclass(frozen=True, eq=False)
class GroupHom:
    """
    Morphisme de groupes de degrés donné par une matrice entière.

    Attributes:
        source: Groupe de départ
        target: Groupe d'arrivée
        matrix: Matrice rang(cible) × rang(source)
    """

    source: GradingGroup
    target: GradingGroup
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        matrix = np.asarray(self.matrix, dtype=object)
        expected = (self.target.rank, self.source.rank)
        if matrix.size == 0:
            matrix = zeros(*expected)
        if matrix.shape != expected:
            raise ValueError(f"Matrice de forme {matrix.shape} au lieu de {expected}")
        reduced = zeros(*expected)
        for (i, j), value in np.ndenumerate(matrix):
            d = self.target.orders[i]
            reduced[i, j] = int(value) % d if d else int(value)
        object.__setattr__(self, "matrix", reduced)
        for j, order in enumerate(self.source.orders):
            # ordre · e_j sans réduction dans la source
            image = self.target.normalize([order * int(reduced[i, j]) for i in range(self.target.rank)])
            if order and image != self.target.zero():
                raise ValueError(
                    f"Morphisme mal défini : l'ordre {order} de la coordonnée {j} n'est pas respecté"
                )

    # Constructeurs

    @classmethod
    def identity(cls, group: GradingGroup) -> "GroupHom":
        return cls(group, group, identity(group.rank))

    @classmethod
    def zero(cls, source: GradingGroup, target: GradingGroup) -> "GroupHom":
        return cls(source, target, zeros(target.rank, source.rank))

    # Calculs

    def apply(self, element: Sequence[int]) -> Degree:
        element = self.source.normalize(element)
        values = [
            sum(int(self.matrix[i, j]) * element[j] for j in range(self.source.rank))
            for i in range(self.target.rank)
        ]
        return self.target.normalize(values)

    def compose(self, other: "GroupHom") -> "GroupHom":
        """self ∘ other."""
        if other.target != self.source:
            raise ValueError(f"Morphismes non composables : {other.target} puis {self.source}")
        return GroupHom(other.source, self.target, matmul(self.matrix, other.matrix))

    def equals(self, other: "GroupHom") -> bool:
        if self.source != other.source or self.target != other.target:
            return False
        return all(
            self.apply(e) == other.apply(e)
            for e in (tuple(int(i == j) for i in range(self.source.rank)) for j in range(self.source.rank))
        )

    def as_module_map(self) -> ModuleMap:
        return ModuleMap(self.source.as_module, self.target.as_module, self.matrix)

    def is_isomorphism(self) -> bool:
        return self.as_module_map().is_isomorphism()

    @cached_property
    def kernel(self) -> Tuple[GradingGroup, "GroupHom"]:
        """Noyau et son inclusion."""
        inclusion = self.as_module_map().kernel()
        group = GradingGroup(inclusion.source.diagonal_orders())
        return group, GroupHom(group, self.source, inclusion.matrix)

    def preimage(self, element: Sequence[int]) -> Optional[Degree]:
        """Un antécédent de `element`, ou None."""
        target = np.array(self.target.normalize(element), dtype=object).reshape(-1, 1)
        solution = self.as_module_map().solve(target)
        if solution is None:
            return None
        return self.source.normalize([int(x) for x in solution[:, 0]])

    def fiber(self, element: Sequence[int], window: Optional[DegreeWindow] = None) -> List[Degree]:
        """
        Tous les antécédents de `element` (fibre finie ou restreinte à la fenêtre).

        Raises:
            ValueError: Si la fibre est infinie et qu'aucune fenêtre n'est donnée
        """
        base = self.preimage(element)
        if base is None:
            return []
        kernel, inclusion = self.kernel
        if kernel.is_finite:
            return sorted({self.source.add(base, inclusion.apply(k)) for k in kernel.elements()})
        if window is None:
            raise ValueError(f"Fibre infinie au-dessus de {tuple(element)}")
        return [
            candidate
            for candidate in self.source.elements(window)
            if self.apply(candidate) == self.target.normalize(element)
        ]
