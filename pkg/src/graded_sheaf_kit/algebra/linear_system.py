"""
Systèmes linéaires en blocs inconnus : transformations naturelles, Hom R-linéaires
et morphismes de complexes.

Chaque inconnue X_i est une matrice gen(N_i) × gen(S_i) représentant un morphisme
S_i → N_i ; chaque équation impose Σ L·X·R ≡ 0 dans T^c, linéarisée par
vec(L·X·R) = (Rᵀ ⊗ L)·vec(X).
"""

from dataclasses import dataclass, field
import logging
from typing import Dict, Hashable, List, Mapping, Sequence, Tuple

import numpy as np

from .base_ring import BaseRing
from .layout import PartLayout
from .matrices import identity, kron, matmul, unit_vector, unvec, vec, zeros
from .modules import Module, ModuleMap, direct_sum, power

logger = logging.getLogger(__name__)

Term = Tuple[Hashable, np.ndarray, np.ndarray]


@dataclass(frozen=True)
class UnknownBlock:
    """
    Inconnue matricielle d'un système.

    Attributes:
        key: Étiquette de l'inconnue
        source: Module de départ du morphisme cherché
        target: Module d'arrivée
    """

    key: Hashable
    source: Module
    target: Module

    @property
    def shape(self) -> Tuple[int, int]:
        return self.target.generators, self.source.generators

    @property
    def module(self) -> Module:
        return power(self.target, self.source.generators)


class LinearSystem:
    """Accumule inconnues et équations puis calcule le module des solutions."""

    def __init__(self, ring: BaseRing) -> None:
        self.ring = ring
        self._unknowns: Dict[Hashable, UnknownBlock] = {}
        self._equations: List[Tuple[Module, int, List[Term]]] = []

    def add_unknown(self, key: Hashable, source: Module, target: Module) -> None:
        """Ajoute X : source → target avec sa condition de bonne définition."""
        if key in self._unknowns:
            raise ValueError(f"Inconnue déjà déclarée : {key}")
        if source.generators == 0 or target.generators == 0:
            return
        self._unknowns[key] = UnknownBlock(key, source, target)
        relations = source.presentation
        if relations.shape[1]:
            self.add_equation(target, relations.shape[1], [(key, identity(target.generators), relations)])

    def has_unknown(self, key: Hashable) -> bool:
        return key in self._unknowns

    def add_equation(self, target: Module, columns: int, terms: Sequence[Term]) -> None:
        """
        Impose Σ L·X_key·R ≡ 0 dans target^columns.

        Les termes portant sur une inconnue absente (module nul) sont ignorés.
        """
        kept = [term for term in terms if term[0] in self._unknowns]
        if not kept or target.generators == 0 or columns == 0:
            return
        for key, left, right in kept:
            rows, cols = self._unknowns[key].shape
            if left.shape != (target.generators, rows) or right.shape != (cols, columns):
                raise ValueError(
                    f"Terme de forme incompatible pour {key} : {left.shape}, {right.shape}"
                )
        self._equations.append((target, columns, kept))

    def solve(self) -> "HomSpace":
        unknowns = list(self._unknowns.values())
        domain, offsets = direct_sum([u.module for u in unknowns], self.ring)
        position = dict(zip((u.key for u in unknowns), offsets))
        codomains = [power(target, columns) for target, columns, _ in self._equations]
        codomain, row_offsets = direct_sum(codomains, self.ring)
        matrix = zeros(codomain.generators, domain.generators)
        for (target, columns, terms), row in zip(self._equations, row_offsets):
            height = target.generators * columns
            for key, left, right in terms:
                block = kron(right.T.copy(), left)
                start = position[key]
                matrix[row : row + height, start : start + block.shape[1]] += block
        inclusion = ModuleMap(domain, codomain, matrix).kernel()
        logger.debug(
            "Système linéaire : %s inconnues, %s équations, solutions %s",
            len(unknowns),
            len(self._equations),
            inclusion.source,
        )
        return HomSpace(self.ring, tuple(unknowns), tuple(offsets), inclusion)


@dataclass(frozen=True, eq=False)
class HomSpace:
    """
    Module des solutions d'un système linéaire.

    Attributes:
        ring: Anneau de base
        unknowns: Inconnues dans l'ordre de la somme ambiante
        offsets: Position de chaque inconnue dans vec
        inclusion: Plongement solutions → ⊕ N_i^{g_i}
    """

    ring: BaseRing
    unknowns: Tuple[UnknownBlock, ...]
    offsets: Tuple[int, ...]
    inclusion: ModuleMap = field(repr=False)

    @property
    def module(self) -> Module:
        return self.inclusion.source

    def layout(self) -> PartLayout:
        return PartLayout.sub([u.key for u in self.unknowns], [u.module for u in self.unknowns], self.inclusion)

    def decode(self, vector: np.ndarray) -> Dict[Hashable, np.ndarray]:
        """Coordonnées dans le module des solutions → blocs matriciels."""
        full = self.ring.reduce(matmul(self.inclusion.matrix, vector))
        blocks = {}
        for unknown, offset in zip(self.unknowns, self.offsets):
            rows, cols = unknown.shape
            blocks[unknown.key] = unvec(full[offset : offset + rows * cols, 0], rows, cols)
        return blocks

    def basis(self) -> List[Dict[Hashable, np.ndarray]]:
        """Blocs associés à chaque générateur du module des solutions."""
        n = self.module.generators
        return [self.decode(unit_vector(n, i)) for i in range(n)]

    def encode(self, blocks: Mapping[Hashable, np.ndarray]) -> np.ndarray:
        """
        Blocs matriciels → coordonnées dans le module des solutions.

        Raises:
            ValueError: Si les blocs ne forment pas une solution
        """
        full = zeros(self.inclusion.target.generators, 1)
        for unknown, offset in zip(self.unknowns, self.offsets):
            if unknown.key in blocks:
                rows, cols = unknown.shape
                full[offset : offset + rows * cols, :] = vec(np.asarray(blocks[unknown.key], dtype=object))
        solution = self.inclusion.solve(full)
        if solution is None:
            raise ValueError("Les blocs donnés ne vérifient pas le système")
        return solution
