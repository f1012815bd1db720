"""
Oracle indépendant pour Λ ≡ 0 sur F2 : faisceaux ordinaires et sections
comptées par énumération exhaustive des familles compatibles.
"""

import itertools
import math
from typing import Dict, FrozenSet, Iterable, List, Set, Tuple

import numpy as np

Vector = Tuple[int, ...]


def _span(columns: List[Vector], size: int) -> Set[Vector]:
    found = {(0,) * size}
    for column in columns:
        found |= {tuple((a + b) % 2 for a, b in zip(v, column)) for v in found}
    return found


class StalkOracle:
    """Éléments d'une tige F2^g / im(relations), un représentant par classe."""

    def __init__(self, module):
        self.size = module.generators
        relations = np.asarray(module.presentation, dtype=object) % 2 if module.generators else None
        columns = []
        if relations is not None:
            columns = [tuple(int(v) for v in relations[:, j]) for j in range(relations.shape[1])]
        self.span = _span(columns, self.size)
        self.elements = sorted({self.canonical(v) for v in itertools.product((0, 1), repeat=self.size)})

    def canonical(self, vector: Iterable[int]) -> Vector:
        vector = tuple(int(v) % 2 for v in vector)
        return min(tuple((a + b) % 2 for a, b in zip(vector, s)) for s in self.span)


def _apply(matrix, vector: Vector) -> Vector:
    if not vector or matrix.shape[0] == 0:
        return (0,) * matrix.shape[0]
    rows = range(matrix.shape[0])
    return tuple(int(sum(int(matrix[i, j]) * vector[j] for j in range(len(vector)))) % 2 for i in rows)


def count_sections(sheaf, subset: Iterable[str]) -> int:
    """Nombre de familles (s_x) compatibles le long des couvertures internes à l'ouvert."""
    chosen: FrozenSet[str] = frozenset(subset)
    points = [p for p in sheaf.space.points if p in chosen]
    stalks: Dict[str, StalkOracle] = {p: StalkOracle(sheaf.stalks[p].part(())) for p in points}
    covers = [(a, b) for a, b in sheaf.space.poset.covers if a in chosen and b in chosen]
    total = 0
    for family in itertools.product(*(stalks[p].elements for p in points)):
        values = dict(zip(points, family))
        if all(
            stalks[b].canonical(_apply(sheaf.restrictions[(a, b)].block(()), values[a])) == values[b]
            for a, b in covers
        ):
            total += 1
    return total


def section_dimension(sheaf, subset: Iterable[str]) -> int:
    return int(round(math.log2(count_sections(sheaf, subset))))


def stalk_dimension(sheaf, x: str) -> int:
    return int(round(math.log2(len(StalkOracle(sheaf.stalks[x].part(())).elements))))


def pushforward_dimension(f, sheaf, y: str) -> int:
    """(f_*F)_y = F(f⁻¹(U_y))."""
    return section_dimension(sheaf, f.preimage(f.target.poset.up(y)))


def inverse_image_dimension(f, sheaf, x: str) -> int:
    """(f⁻¹G)_x = G_{f(x)}."""
    return stalk_dimension(sheaf, f(x))


# Tiges libres : les stratégies n'engendrent que des sommes de R_{U_x} prolongés par zéro


def _free_rank(module) -> int:
    relations = np.asarray(module.presentation, dtype=object)
    assert not any(int(v) % 2 for v in relations.flat), "tige non libre"
    return module.generators


def _rank(rows: List[int]) -> int:
    """Rang sur F2 de lignes codées en bits."""
    pivots: Dict[int, int] = {}
    for row in rows:
        while row:
            top = row.bit_length() - 1
            if top not in pivots:
                pivots[top] = row
                break
            row ^= pivots[top]
    return len(pivots)


def _block(sheaf, a: str, b: str):
    return np.asarray(sheaf.restrictions[(a, b)].block(()), dtype=object) % 2


def tensor_section_dimension(first, second, subset: Iterable[str]) -> int:
    """dim (F ⊗ G)(U) : familles s_x ∈ F_x ⊗ G_x avec (r_F ⊗ r_G) s_a = s_b."""
    chosen = frozenset(subset)
    points = [p for p in first.space.points if p in chosen]
    dims = {p: _free_rank(first.stalks[p].part(())) * _free_rank(second.stalks[p].part(())) for p in points}
    offsets, total = {}, 0
    for p in points:
        offsets[p] = total
        total += dims[p]
    rows = []
    for a, b in first.space.poset.covers:
        if a not in chosen or b not in chosen:
            continue
        matrix = np.kron(_block(first, a, b), _block(second, a, b)) if dims[a] and dims[b] else None
        for i in range(dims[b]):
            row = 1 << (offsets[b] + i)
            if matrix is not None:
                for j in range(dims[a]):
                    if int(matrix[i, j]) % 2:
                        row ^= 1 << (offsets[a] + j)
            rows.append(row)
    return total - _rank(rows)


def hom_dimension(first, second, x: str) -> int:
    """dim Hom(F|U_x, G|U_x) : inconnues φ_y, équations r_G φ_a = φ_b r_F sur les couvertures."""
    opened = first.space.poset.up(x)
    points = [p for p in first.space.points if p in opened]
    source = {p: _free_rank(first.stalks[p].part(())) for p in points}
    target = {p: _free_rank(second.stalks[p].part(())) for p in points}
    index: Dict[Tuple[str, int, int], int] = {}
    for p in points:
        for i in range(target[p]):
            for j in range(source[p]):
                index[(p, i, j)] = len(index)
    rows = []
    for a, b in first.space.poset.covers:
        if a not in opened:
            continue
        restrict_first, restrict_second = _block(first, a, b), _block(second, a, b)
        for i in range(target[b]):
            for j in range(source[a]):
                row = 0
                for k in range(target[a]):
                    if int(restrict_second[i, k]):
                        row ^= 1 << index[(a, k, j)]
                for m in range(source[b]):
                    if int(restrict_first[m, j]):
                        row ^= 1 << index[(b, i, m)]
                rows.append(row)
    return len(index) - _rank(rows)


def _proper_over(f, support: Set[str], opened: FrozenSet[str]) -> bool:
    """f(adh(s) ∩ S) fermé dans l'ouvert cible pour tout s ∈ S."""
    target = f.target.poset
    for s in support:
        image = {f(t) for t in support if f.source.poset.leq(t, s)}
        if any(z not in image and any(target.leq(z, w) for w in image) for z in opened):
            return False
    return True


def shriek_dimension(f, sheaf, y: str) -> int:
    """(f_!F)_y : sections sur f⁻¹(U_y) dont le support est propre au-dessus de U_y."""
    opened = frozenset(f.target.poset.up(y))
    chosen = f.preimage(opened)
    points = [p for p in sheaf.space.points if p in chosen]
    stalks = {p: StalkOracle(sheaf.stalks[p].part(())) for p in points}
    covers = [(a, b) for a, b in sheaf.space.poset.covers if a in chosen and b in chosen]
    total = 0
    for family in itertools.product(*(stalks[p].elements for p in points)):
        values = dict(zip(points, family))
        if not all(
            stalks[b].canonical(_apply(sheaf.restrictions[(a, b)].block(()), values[a])) == values[b]
            for a, b in covers
        ):
            continue
        if _proper_over(f, {p for p in points if any(values[p])}, opened):
            total += 1
    return int(round(math.log2(total)))


def extension_section_dimension(sheaf, subset: Iterable[str], opened: Iterable[str]) -> int:
    """dim F_Y(V) : s_x ∈ F_x sur Y ∩ V, nul ailleurs ; une flèche venant de hors de Y force s_b = 0."""
    inside, chosen = frozenset(subset), frozenset(opened)
    points = [p for p in sheaf.space.points if p in chosen and p in inside]
    stalks = {p: StalkOracle(sheaf.stalks[p].part(())) for p in points}
    total = 0
    for family in itertools.product(*(stalks[p].elements for p in points)):
        values = dict(zip(points, family))
        compatible = True
        for a, b in sheaf.space.poset.covers:
            if a not in chosen or b not in chosen or b not in inside:
                continue
            if a in inside:
                image = stalks[b].canonical(_apply(sheaf.restrictions[(a, b)].block(()), values[a]))
            else:
                image = (0,) * stalks[b].size
            if image != values[b]:
                compatible = False
                break
        total += compatible
    return int(round(math.log2(total)))
