"""
Provenance des modules calculés : composantes ambiantes et passage vers la partie.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Hashable, Iterable, Optional, Sequence, Tuple

import numpy as np

from .base_ring import BaseRing
from .matrices import identity, matmul, zeros
from .modules import Module, ModuleMap, direct_sum


class LayoutKind(Enum):
    """Nature de la partie par rapport à la somme ambiante."""

    DIRECT = "somme directe"
    SUB = "sous-module"
    QUOTIENT = "quotient"


@dataclass(frozen=True, eq=False)
class PartLayout:
    """
    Décrit une partie calculée comme sous-module ou quotient d'une somme directe.

    Les morphismes canoniques (restrictions, unités, changements de base) sont
    assemblés composante par composante dans la somme ambiante puis ramenés à
    la partie.

    Attributes:
        labels: Étiquettes des composantes (point, degré, chaîne…)
        modules: Module de chaque composante
        offsets: Position du premier générateur de chaque composante
        ambient: Somme directe des composantes
        part: Module décrit
        from_part: Matrice partie → ambiante (inclusion ou section)
        to_part: Matrice ambiante → partie (quotients et sommes directes)
        kind: Nature de la partie
    """

    labels: Tuple[Hashable, ...]
    modules: Tuple[Module, ...]
    offsets: Tuple[int, ...]
    ambient: Module
    part: Module
    from_part: np.ndarray = field(repr=False)
    to_part: Optional[np.ndarray] = field(default=None, repr=False)
    kind: LayoutKind = LayoutKind.DIRECT
    _index: Dict[Hashable, int] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        if len(set(self.labels)) != len(self.labels):
            raise ValueError(f"Étiquettes de composantes dupliquées : {self.labels}")
        self._index.update({label: i for i, label in enumerate(self.labels)})

    # Constructeurs

    @classmethod
    def direct(
        cls, labels: Sequence[Hashable], modules: Sequence[Module], ring: BaseRing
    ) -> "PartLayout":
        ambient, offsets = direct_sum(modules, ring)
        n = ambient.generators
        return cls(tuple(labels), tuple(modules), tuple(offsets), ambient, ambient, identity(n), identity(n))

    @classmethod
    def sub(
        cls, labels: Sequence[Hashable], modules: Sequence[Module], inclusion: ModuleMap
    ) -> "PartLayout":
        _, offsets = direct_sum(modules, inclusion.ring)
        return cls(
            tuple(labels),
            tuple(modules),
            tuple(offsets),
            inclusion.target,
            inclusion.source,
            inclusion.matrix,
            None,
            LayoutKind.SUB,
        )

    @classmethod
    def quotient(
        cls, labels: Sequence[Hashable], modules: Sequence[Module], projection: ModuleMap
    ) -> "PartLayout":
        _, offsets = direct_sum(modules, projection.ring)
        return cls(
            tuple(labels),
            tuple(modules),
            tuple(offsets),
            projection.source,
            projection.target,
            projection.section(),
            projection.matrix,
            LayoutKind.QUOTIENT,
        )

    # Accès

    def __contains__(self, label: Hashable) -> bool:
        return label in self._index

    def module_of(self, label: Hashable) -> Module:
        return self.modules[self._index[label]]

    def span(self, label: Hashable) -> slice:
        i = self._index[label]
        return slice(self.offsets[i], self.offsets[i] + self.modules[i].generators)

    def component(self, label: Hashable) -> np.ndarray:
        """Matrice partie → composante `label`."""
        return self.from_part[self.span(label), :]

    def inclusion(self) -> ModuleMap:
        return ModuleMap(self.part, self.ambient, self.from_part)

    def to_part_coordinates(self, vectors: np.ndarray) -> np.ndarray:
        """
        Ramène des vecteurs ambiants à des coordonnées dans la partie.

        Raises:
            ValueError: Si un vecteur n'appartient pas au sous-module
        """
        if self.to_part is not None:
            return matmul(self.to_part, vectors)
        solution = self.inclusion().solve(vectors)
        if solution is None:
            raise ValueError("Vecteur hors du sous-module décrit par la disposition")
        return solution


def transport(
    source: PartLayout,
    target: PartLayout,
    pieces: Iterable[Tuple[Hashable, Hashable, np.ndarray]],
) -> np.ndarray:
    """
    Matrice partie(source) → partie(target) définie composante par composante.

    Args:
        source: Disposition de départ
        target: Disposition d'arrivée
        pieces: Triplets (étiquette source, étiquette cible, matrice composante)

    Returns:
        Matrice générateurs(target.part) × générateurs(source.part)
    """
    ambient_map = zeros(target.ambient.generators, source.ambient.generators)
    for source_label, target_label, matrix in pieces:
        if source_label not in source or target_label not in target:
            continue
        rows, cols = target.span(target_label), source.span(source_label)
        ambient_map[rows, cols] = ambient_map[rows, cols] + matrix
    moved = matmul(ambient_map, source.from_part)
    return target.part.ring.reduce(target.to_part_coordinates(moved))


def assemble(
    target: PartLayout, pieces: Iterable[Tuple[Hashable, np.ndarray]], columns: int
) -> np.ndarray:
    """
    Matrice à valeurs dans partie(target) donnée composante par composante.

    Les morceaux d'une même étiquette s'additionnent ; les étiquettes absentes
    de la disposition sont ignorées.
    """
    if target.part.generators == 0:
        return zeros(0, columns)
    ambient = zeros(target.ambient.generators, columns)
    for label, matrix in pieces:
        if label in target:
            rows = target.span(label)
            ambient[rows, :] = ambient[rows, :] + matrix
    return target.part.ring.reduce(target.to_part_coordinates(ambient))


def gather(source: PartLayout, pieces: Iterable[Tuple[Hashable, np.ndarray]], rows: int) -> np.ndarray:
    """Matrice partie(source) → module de `rows` générateurs : Σ M_label · composante(label)."""
    result = zeros(rows, source.part.generators)
    for label, matrix in pieces:
        if label in source:
            result = result + matmul(matrix, source.component(label))
    return source.part.ring.reduce(result)
