"""
Utilitaires de matrices exactes (numpy, dtype object).
"""

from typing import Iterable, List, Sequence

import numpy as np


def zeros(rows: int, cols: int) -> np.ndarray:
    return np.zeros((rows, cols), dtype=object)


def identity(n: int) -> np.ndarray:
    result = zeros(n, n)
    for i in range(n):
        result[i, i] = 1
    return result


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Produit exact, y compris pour des dimensions nulles."""
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"Produit impossible : {a.shape} x {b.shape}")
    if a.shape[0] == 0 or b.shape[1] == 0 or a.shape[1] == 0:
        return zeros(a.shape[0], b.shape[1])
    return np.dot(a, b)


def chain(*factors: np.ndarray) -> np.ndarray:
    """Produit a·b·c… de gauche à droite."""
    result = factors[0]
    for factor in factors[1:]:
        result = matmul(result, factor)
    return result


def hstack(blocks: Sequence[np.ndarray], rows: int) -> np.ndarray:
    parts = [block for block in blocks if block.shape[1]]
    if not parts:
        return zeros(rows, 0)
    return np.hstack(parts).astype(object)


def vstack(blocks: Sequence[np.ndarray], cols: int) -> np.ndarray:
    parts = [block for block in blocks if block.shape[0]]
    if not parts:
        return zeros(0, cols)
    return np.vstack(parts).astype(object)


def block_diagonal(blocks: Sequence[np.ndarray]) -> np.ndarray:
    rows = sum(block.shape[0] for block in blocks)
    cols = sum(block.shape[1] for block in blocks)
    result = zeros(rows, cols)
    r = c = 0
    for block in blocks:
        result[r : r + block.shape[0], c : c + block.shape[1]] = block
        r += block.shape[0]
        c += block.shape[1]
    return result


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Produit de Kronecker : le bloc (i, j) vaut a[i, j]·b."""
    result = zeros(a.shape[0] * b.shape[0], a.shape[1] * b.shape[1])
    for (i, j), value in np.ndenumerate(a):
        if value != 0:
            result[
                i * b.shape[0] : (i + 1) * b.shape[0], j * b.shape[1] : (j + 1) * b.shape[1]
            ] = value * b
    return result


def vec(matrix: np.ndarray) -> np.ndarray:
    """Empile les colonnes (ordre Fortran) en un vecteur colonne."""
    return matrix.reshape(-1, 1, order="F")


def unvec(vector: np.ndarray, rows: int, cols: int) -> np.ndarray:
    return np.asarray(vector, dtype=object).reshape((rows, cols), order="F")


def column(values: Iterable[object]) -> np.ndarray:
    data: List[object] = list(values)
    return np.array(data, dtype=object).reshape(len(data), 1)


def unit_vector(n: int, index: int) -> np.ndarray:
    result = zeros(n, 1)
    result[index, 0] = 1
    return result


def is_zero(matrix: np.ndarray) -> bool:
    return all(value == 0 for value in matrix.flat)


def to_lists(matrix: np.ndarray) -> List[List[object]]:
    return [[value for value in row] for row in matrix]
