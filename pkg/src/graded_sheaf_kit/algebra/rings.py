"""
Anneaux gradués commutatifs de rang fini sur l'anneau de base.

L'anneau est libre sur une base homogène e_0 = 1, e_1, …, e_{n-1} ; la
multiplication est donnée par des constantes de structure e_i·e_j = Σ c_ijk e_k.
"""

from dataclasses import dataclass, field
from functools import cached_property
import logging
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .base_ring import BaseRing
from .grading import Degree, GradingGroup, GroupHom
from .graded import GradedModule
from .matrices import matmul, zeros
from .modules import Module

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class GradedRingData:
    """
    Anneau gradué commutatif unitaire de rang fini.

    Attributes:
        ring: Anneau de base
        grading: Groupe de degrés
        basis_degrees: Degré de chaque élément de base (e_0 est l'unité)
        structure: Tenseur c[i, j, k] des constantes de structure
    """

    ring: BaseRing
    grading: GradingGroup
    basis_degrees: Tuple[Degree, ...]
    structure: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        degrees = tuple(self.grading.normalize(d) for d in self.basis_degrees)
        object.__setattr__(self, "basis_degrees", degrees)
        n = len(degrees)
        if n == 0:
            raise ValueError("Un anneau gradué exige au moins l'unité")
        structure = np.asarray(self.structure, dtype=object)
        if structure.shape != (n, n, n):
            raise ValueError(f"Constantes de structure de forme {structure.shape} au lieu de {(n, n, n)}")
        object.__setattr__(self, "structure", self.ring.reduce(structure.reshape(n, n * n)).reshape(n, n, n))
        if degrees[0] != self.grading.zero():
            raise ValueError(f"L'unité doit être de degré 0 : {degrees[0]}")

    # Constructeurs

    @classmethod
    def base(cls, ring: BaseRing, grading: GradingGroup) -> "GradedRingData":
        """L'anneau de base placé en degré 0."""
        structure = np.ones((1, 1, 1), dtype=object)
        return cls(ring, grading, (grading.zero(),), structure)

    @classmethod
    def truncated_polynomial(
        cls, ring: BaseRing, grading: GradingGroup, generator_degree: Sequence[int], length: int
    ) -> "GradedRingData":
        """k[t]/t^length avec deg t = generator_degree."""
        if length < 1:
            raise ValueError(f"Longueur de troncature invalide : {length}")
        degrees = []
        current = grading.zero()
        for _ in range(length):
            degrees.append(current)
            current = grading.add(current, generator_degree)
        structure = np.zeros((length, length, length), dtype=object)
        for i in range(length):
            for j in range(length):
                if i + j < length:
                    structure[i, j, i + j] = 1
        return cls(ring, grading, tuple(degrees), structure)

    # Propriétés

    @property
    def dimension(self) -> int:
        return len(self.basis_degrees)

    def multiplication_matrix(self, index: int) -> np.ndarray:
        """Matrice de la multiplication par e_index sur la base."""
        return self.structure[index, :, :].T.copy()

    def element_matrix(self, vector: Sequence[object]) -> np.ndarray:
        """Matrice de la multiplication par Σ v_i e_i."""
        result = zeros(self.dimension, self.dimension)
        for i, value in enumerate(vector):
            if value != 0:
                result = result + value * self.multiplication_matrix(i)
        return self.ring.reduce(result)

    def multiply(self, a: Sequence[object], b: Sequence[object]) -> np.ndarray:
        vector = np.array(list(b), dtype=object).reshape(-1, 1)
        return self.ring.reduce(matmul(self.element_matrix(a), vector))[:, 0]

    @cached_property
    def positions(self) -> Dict[int, Tuple[Degree, int]]:
        """Élément de base → (degré, rang dans la partie de ce degré)."""
        counters: Dict[Degree, int] = {}
        result = {}
        for index, degree in enumerate(self.basis_degrees):
            result[index] = (degree, counters.get(degree, 0))
            counters[degree] = counters.get(degree, 0) + 1
        return result

    def basis_in_degree(self, degree: Sequence[int]) -> List[int]:
        key = self.grading.normalize(degree)
        return [i for i, d in enumerate(self.basis_degrees) if d == key]

    def as_graded_module(self) -> GradedModule:
        parts = {}
        for degree in set(self.basis_degrees):
            parts[degree] = Module.free(self.ring, len(self.basis_in_degree(degree)))
        return GradedModule(self.grading, self.ring, parts)

    def regraded(self, degree_map: GroupHom) -> "GradedRingData":
        """Même anneau, degrés envoyés par degree_map."""
        return GradedRingData(
            self.ring,
            degree_map.target,
            tuple(degree_map.apply(d) for d in self.basis_degrees),
            self.structure,
        )

    # Vérifications

    def diagnostics(self) -> List[str]:
        """Lois d'anneau gradué commutatif unitaire non respectées."""
        problems: List[str] = []
        n = self.dimension
        c = self.structure
        equal = self.ring.equal
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if not equal(c[i, j, k], c[j, i, k]):
                        problems.append(f"non commutatif : e{i}·e{j} ≠ e{j}·e{i}")
                    expected = self.grading.add(self.basis_degrees[i], self.basis_degrees[j])
                    if not equal(c[i, j, k], 0) and self.basis_degrees[k] != expected:
                        problems.append(f"degré incompatible : e{i}·e{j} a une composante sur e{k}")
                    if not equal(c[0, j, k], int(j == k)):
                        problems.append(f"e0 n'est pas l'unité sur e{j}")
        for i in range(n):
            for j in range(n):
                for l in range(n):
                    left = sum(c[i, j, m] * c[m, l, :] for m in range(n))
                    right = sum(c[j, l, m] * c[i, m, :] for m in range(n))
                    if not self.ring.matrices_equal(np.asarray(left).reshape(1, -1), np.asarray(right).reshape(1, -1)):
                        problems.append(f"non associatif : (e{i}e{j})e{l} ≠ e{i}(e{j}e{l})")
        return sorted(set(problems))


def is_ring_homomorphism(matrix: np.ndarray, source: GradedRingData, target: GradedRingData) -> List[str]:
    """
    Vérifie qu'une matrice base(source) → base(target) est un morphisme d'anneaux unitaire.

    Returns:
        Liste des défauts (vide si c'est un morphisme)
    """
    problems: List[str] = []
    ring = source.ring
    n = source.dimension
    images = [matrix[:, i] for i in range(n)]
    unit = np.zeros(target.dimension, dtype=object)
    unit[0] = 1
    if not ring.matrices_equal(images[0].reshape(1, -1), unit.reshape(1, -1)):
        problems.append("l'unité n'est pas envoyée sur l'unité")
    for i in range(n):
        for j in range(n):
            product = source.multiply(np.eye(n, dtype=object)[i], np.eye(n, dtype=object)[j])
            left = matmul(matrix, product.reshape(-1, 1))[:, 0]
            right = target.multiply(images[i], images[j])
            if not ring.matrices_equal(left.reshape(1, -1), np.asarray(right).reshape(1, -1)):
                problems.append(f"produit non respecté : e{i}·e{j}")
    return problems
