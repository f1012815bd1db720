"""
Forme normale de Smith exacte avec suivi des transformations et de leurs inverses.
"""

import logging
from typing import Any, List, Optional, Tuple

import numpy as np

from .base_ring import BaseRing
from .matrices import identity, matmul, zeros

logger = logging.getLogger(__name__)


class SmithNormalForm:
    """
    Forme normale de Smith D = U·M·V sur un anneau euclidien.

    U et V sont inversibles ; leurs inverses sont mis à jour à chaque opération
    élémentaire, ce qui évite toute inversion a posteriori.

    Attributes:
        ring: Anneau de base (arithmétique interne)
        D: Matrice diagonale d_1 | d_2 | … | d_r, 0, …
        U, V: Transformations gauche et droite
        U_inv, V_inv: Leurs inverses
    """

    def __init__(self, matrix: np.ndarray, ring: BaseRing) -> None:
        self.ring = ring
        source = ring.reduce(np.array(matrix, dtype=object).copy())
        if source.ndim != 2:
            raise ValueError(f"Matrice attendue, reçu la dimension {source.ndim}")
        rows, cols = source.shape
        self._a = source
        self._left = identity(rows)
        self._left_inv = identity(rows)
        self._right = identity(cols)
        self._right_inv = identity(cols)
        self._reduce()

    # Résultats

    @property
    def D(self) -> np.ndarray:
        return self._a

    @property
    def U(self) -> np.ndarray:
        return self._left

    @property
    def V(self) -> np.ndarray:
        return self._right

    @property
    def U_inv(self) -> np.ndarray:
        return self._left_inv

    @property
    def V_inv(self) -> np.ndarray:
        return self._right_inv

    @property
    def diagonal(self) -> List[Any]:
        return [self._a[i, i] for i in range(min(self._a.shape))]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)

    def kernel_basis(self) -> np.ndarray:
        """Colonnes engendrant le noyau de M (base sur un anneau principal)."""
        return self._right[:, self.rank :].copy()

    def solve(self, rhs: np.ndarray) -> Optional[np.ndarray]:
        """
        Résout M·X = rhs exactement.

        Args:
            rhs: Matrice de seconds membres (lignes de M × k)

        Returns:
            Une solution X, ou None si le système n'en a pas
        """
        rows, cols = self._a.shape
        if rhs.shape[0] != rows:
            raise ValueError(f"Second membre de hauteur {rhs.shape[0]} au lieu de {rows}")
        y = self.ring.reduce(matmul(self._left, rhs))
        z = zeros(cols, rhs.shape[1])
        rank = self.rank
        for i in range(rows):
            for k in range(rhs.shape[1]):
                value = y[i, k]
                if i < rank:
                    d = self._a[i, i]
                    if not self.ring.divides(d, value):
                        return None
                    z[i, k] = self.ring.divmod(value, d)[0]
                elif value != 0:
                    return None
        return self.ring.reduce(matmul(self._right, z))

    # Réduction

    def _reduce(self) -> None:
        rows, cols = self._a.shape
        for t in range(min(rows, cols)):
            if not self._diagonalize_from(t):
                break
        logger.debug("Forme de Smith %sx%s : diagonale %s", rows, cols, self.diagonal)

    def _pivot(self, t: int) -> Optional[Tuple[int, int]]:
        best: Optional[Tuple[int, int]] = None
        best_size = -1
        rows, cols = self._a.shape
        for i in range(t, rows):
            for j in range(t, cols):
                value = self._a[i, j]
                if value == 0:
                    continue
                size = self.ring.size(value)
                if best is None or size < best_size:
                    best, best_size = (i, j), size
        return best

    def _diagonalize_from(self, t: int) -> bool:
        rows, cols = self._a.shape
        while True:
            pivot = self._pivot(t)
            if pivot is None:
                return False
            self._swap_rows(t, pivot[0])
            self._swap_cols(t, pivot[1])
            clean = True
            for i in range(t + 1, rows):
                if self._a[i, t] != 0:
                    q, _ = self.ring.divmod(self._a[i, t], self._a[t, t])
                    self._add_row(i, t, -q)
                    clean = clean and self._a[i, t] == 0
            for j in range(t + 1, cols):
                if self._a[t, j] != 0:
                    q, _ = self.ring.divmod(self._a[t, j], self._a[t, t])
                    self._add_col(j, t, -q)
                    clean = clean and self._a[t, j] == 0
            if not clean:
                continue
            offender = self._find_non_divisible(t)
            if offender is not None:
                self._add_row(t, offender, 1)
                continue
            unit = self.ring.unit_normal(self._a[t, t])
            if unit != 1:
                self._scale_row(t, unit)
            return True

    def _find_non_divisible(self, t: int) -> Optional[int]:
        rows, cols = self._a.shape
        pivot = self._a[t, t]
        for i in range(t + 1, rows):
            for j in range(t + 1, cols):
                if not self.ring.divides(pivot, self._a[i, j]):
                    return i
        return None

    # Opérations élémentaires (U·M·V suivi, inverses compris)

    def _swap_rows(self, a: int, b: int) -> None:
        if a == b:
            return
        self._a[[a, b], :] = self._a[[b, a], :]
        self._left[[a, b], :] = self._left[[b, a], :]
        self._left_inv[:, [a, b]] = self._left_inv[:, [b, a]]

    def _swap_cols(self, a: int, b: int) -> None:
        if a == b:
            return
        self._a[:, [a, b]] = self._a[:, [b, a]]
        self._right[:, [a, b]] = self._right[:, [b, a]]
        self._right_inv[[a, b], :] = self._right_inv[[b, a], :]

    def _add_row(self, target: int, source: int, factor: Any) -> None:
        """ligne_target += factor · ligne_source"""
        reduce = self.ring.reduce
        self._a[target, :] = reduce(self._a[target, :] + factor * self._a[source, :])
        self._left[target, :] = reduce(self._left[target, :] + factor * self._left[source, :])
        self._left_inv[:, source] = reduce(
            self._left_inv[:, source] - factor * self._left_inv[:, target]
        )

    def _add_col(self, target: int, source: int, factor: Any) -> None:
        """colonne_target += factor · colonne_source"""
        reduce = self.ring.reduce
        self._a[:, target] = reduce(self._a[:, target] + factor * self._a[:, source])
        self._right[:, target] = reduce(self._right[:, target] + factor * self._right[:, source])
        self._right_inv[source, :] = reduce(
            self._right_inv[source, :] - factor * self._right_inv[target, :]
        )

    def _scale_row(self, row: int, unit: Any) -> None:
        reduce = self.ring.reduce
        inverse = self.ring.inverse(unit)
        self._a[row, :] = reduce(self._a[row, :] * unit)
        self._left[row, :] = reduce(self._left[row, :] * unit)
        self._left_inv[:, row] = reduce(self._left_inv[:, row] * inverse)


def smith_normal_form(matrix: np.ndarray, ring: BaseRing) -> SmithNormalForm:
    """Calcule la forme de Smith de `matrix` sur `ring`."""
    return SmithNormalForm(matrix, ring)
