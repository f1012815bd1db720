"""
Ensembles ordonnés finis et topologie d'Alexandrov (ouverts = parties supérieures).
"""

from dataclasses import dataclass, field
from functools import cached_property
import itertools
import logging
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Set, Tuple

import networkx as nx

from ..errors import NotLocallyClosedError, NotOpenError
from .diagnostics import Diagnostic, Severity

logger = logging.getLogger(__name__)

Point = str
Chain = Tuple[Point, ...]


def order_diagnostics(points: Iterable[Point], relations: Iterable[Tuple[Point, Point]]) -> List[Diagnostic]:
    """
    Vérifie qu'une liste de relations x < y engendre un ordre et en est la relation de couverture.
    """
    points = list(points)
    diagnostics: List[Diagnostic] = []
    if len(set(points)) != len(points):
        diagnostics.append(Diagnostic("DUPLICATE_POINT", "points", f"points répétés : {points}"))
    known = set(points)
    graph = nx.DiGraph()
    graph.add_nodes_from(points)
    for low, high in relations:
        if low not in known or high not in known:
            diagnostics.append(Diagnostic("UNKNOWN_POINT", f"{low} < {high}", "point non déclaré"))
            continue
        if low == high:
            diagnostics.append(Diagnostic("ORDER_CYCLE", f"{low} < {high}", "relation réflexive stricte"))
            continue
        graph.add_edge(low, high)
    if not nx.is_directed_acyclic_graph(graph):
        cycle = nx.find_cycle(graph)
        diagnostics.append(
            Diagnostic("ORDER_CYCLE", " -> ".join(e[0] for e in cycle), "l'ordre n'est pas antisymétrique")
        )
        return diagnostics
    reduction = nx.transitive_reduction(graph)
    for low, high in sorted(set(graph.edges) - set(reduction.edges)):
        diagnostics.append(
            Diagnostic(
                "REDUNDANT_COVER",
                f"{low} < {high}",
                "relation déjà impliquée par transitivité (pas une couverture)",
                Severity.WARNING,
            )
        )
    return diagnostics


@dataclass(frozen=True, eq=False)
class FinitePoset:
    """
    Ensemble ordonné fini ; le point x a pour plus petit ouvert U_x = {y ≥ x}.

    Attributes:
        points: Points dans l'ordre de déclaration
        relations: Relations strictes déclarées (x, y) avec x < y
    """

    points: Tuple[Point, ...]
    relations: Tuple[Tuple[Point, Point], ...] = ()
    _graph: nx.DiGraph = field(init=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "points", tuple(self.points))
        object.__setattr__(self, "relations", tuple(tuple(r) for r in self.relations))
        errors = [d for d in order_diagnostics(self.points, self.relations) if d.severity == Severity.ERROR]
        if errors:
            raise ValueError(f"Ordre invalide : {errors[0]}")
        graph = nx.DiGraph()
        graph.add_nodes_from(self.points)
        graph.add_edges_from(self.relations)
        object.__setattr__(self, "_graph", graph)

    # Structure

    @cached_property
    def closure(self) -> nx.DiGraph:
        return nx.transitive_closure_dag(self._graph)

    @cached_property
    def covers(self) -> Tuple[Tuple[Point, Point], ...]:
        """Relation de couverture (diagramme de Hasse), triée selon l'ordre des points."""
        rank = {p: i for i, p in enumerate(self.points)}
        edges = nx.transitive_reduction(self._graph).edges
        return tuple(sorted(edges, key=lambda e: (rank[e[0]], rank[e[1]])))

    @cached_property
    def _up(self) -> Dict[Point, FrozenSet[Point]]:
        return {p: frozenset({p} | set(self.closure.successors(p))) for p in self.points}

    @cached_property
    def _down(self) -> Dict[Point, FrozenSet[Point]]:
        return {p: frozenset({p} | set(self.closure.predecessors(p))) for p in self.points}

    def __contains__(self, point: object) -> bool:
        return point in self._up

    def __len__(self) -> int:
        return len(self.points)

    def check_points(self, subset: Iterable[Point]) -> FrozenSet[Point]:
        subset = frozenset(subset)
        unknown = subset - set(self.points)
        if unknown:
            raise ValueError(f"Points inconnus : {sorted(unknown)}")
        return subset

    def leq(self, x: Point, y: Point) -> bool:
        return y in self._up[x]

    def less(self, x: Point, y: Point) -> bool:
        return x != y and self.leq(x, y)

    def up(self, x: Point) -> FrozenSet[Point]:
        """Plus petit ouvert contenant x."""
        return self._up[x]

    def down(self, x: Point) -> FrozenSet[Point]:
        """Adhérence de {x}."""
        return self._down[x]

    def up_closure(self, subset: Iterable[Point]) -> FrozenSet[Point]:
        return frozenset(itertools.chain.from_iterable(self._up[p] for p in subset))

    def down_closure(self, subset: Iterable[Point]) -> FrozenSet[Point]:
        return frozenset(itertools.chain.from_iterable(self._down[p] for p in subset))

    def sorted_points(self, subset: Iterable[Point]) -> List[Point]:
        order = {p: i for i, p in enumerate(self.linear_extension)}
        return sorted(subset, key=order.__getitem__)

    @cached_property
    def linear_extension(self) -> Tuple[Point, ...]:
        """Extension linéaire déterministe (petits éléments d'abord)."""
        rank = {p: i for i, p in enumerate(self.points)}
        return tuple(nx.lexicographical_topological_sort(self._graph, key=rank.__getitem__))

    # Topologie

    def is_open(self, subset: Iterable[Point]) -> bool:
        subset = self.check_points(subset)
        return self.up_closure(subset) == subset

    def is_closed(self, subset: Iterable[Point]) -> bool:
        subset = self.check_points(subset)
        return self.down_closure(subset) == subset

    def is_locally_closed(self, subset: Iterable[Point]) -> bool:
        """Intersection d'un ouvert et d'un fermé : convexe pour l'ordre."""
        subset = self.check_points(subset)
        return self.up_closure(subset) & self.down_closure(subset) == subset

    def require_open(self, subset: Iterable[Point]) -> FrozenSet[Point]:
        subset = self.check_points(subset)
        if not self.is_open(subset):
            raise NotOpenError(f"Sous-ensemble non ouvert : {sorted(subset)}")
        return subset

    def require_locally_closed(self, subset: Iterable[Point]) -> FrozenSet[Point]:
        subset = self.check_points(subset)
        if not self.is_locally_closed(subset):
            raise NotLocallyClosedError(f"Sous-ensemble non localement fermé : {sorted(subset)}")
        return subset

    def opens(self) -> List[FrozenSet[Point]]:
        """Tous les ouverts, par taille croissante."""
        found: Set[FrozenSet[Point]] = set()
        for size in range(len(self.points) + 1):
            for subset in itertools.combinations(self.points, size):
                if self.up_closure(subset) == frozenset(subset):
                    found.add(frozenset(subset))
        return sorted(found, key=lambda s: (len(s), sorted(s)))

    def closed_subsets_of(self, subset: Iterable[Point]) -> Iterator[FrozenSet[Point]]:
        """Parties fermées relativement à `subset` (parties inférieures de subset)."""
        members = self.sorted_points(subset)
        ambient = frozenset(members)
        for size in range(len(members) + 1):
            for candidate in itertools.combinations(members, size):
                chosen = frozenset(candidate)
                if self.down_closure(chosen) & ambient == chosen:
                    yield chosen

    def locally_closed_subsets(self) -> List[FrozenSet[Point]]:
        result = []
        for size in range(1, len(self.points) + 1):
            for subset in itertools.combinations(self.points, size):
                if self.is_locally_closed(subset):
                    result.append(frozenset(subset))
        return result

    def minimal(self, subset: Iterable[Point]) -> List[Point]:
        subset = frozenset(subset)
        return self.sorted_points(p for p in subset if not any(self.less(q, p) for q in subset))

    def least(self, subset: Iterable[Point]) -> Optional[Point]:
        """Plus petit élément de `subset` s'il existe."""
        minimal = self.minimal(subset)
        if len(minimal) == 1 and self.up(minimal[0]) >= frozenset(subset):
            return minimal[0]
        return None

    def covers_within(self, subset: Iterable[Point]) -> List[Tuple[Point, Point]]:
        """Couvertures de X dont les deux extrémités sont dans `subset`."""
        subset = frozenset(subset)
        return [(x, y) for x, y in self.covers if x in subset and y in subset]

    def path(self, x: Point, y: Point) -> List[Tuple[Point, Point]]:
        """Un chemin déterministe de couvertures de x à y (x ≤ y)."""
        if not self.leq(x, y):
            raise ValueError(f"Pas de relation {x} ≤ {y}")
        steps: List[Tuple[Point, Point]] = []
        current = x
        while current != y:
            current_next = next(b for a, b in self.covers if a == current and self.leq(b, y))
            steps.append((current, current_next))
            current = current_next
        return steps

    def chains(self, subset: Iterable[Point], length: int) -> List[Chain]:
        """Chaînes strictes z_0 < … < z_length dans `subset` (ordre de la relation, pas des couvertures)."""
        members = self.sorted_points(subset)
        result: List[Chain] = []

        def extend(prefix: Chain) -> None:
            if len(prefix) == length + 1:
                result.append(prefix)
                return
            for p in members:
                if not prefix or self.less(prefix[-1], p):
                    extend(prefix + (p,))

        extend(())
        return result

    @cached_property
    def height(self) -> int:
        """Longueur (en arêtes) d'une plus longue chaîne."""
        return nx.dag_longest_path_length(self._graph) if self.points else 0

    def induced(self, subset: Iterable[Point]) -> "FinitePoset":
        """Ordre induit sur un sous-ensemble."""
        chosen = frozenset(subset)
        members = [p for p in self.points if p in chosen]
        relations = [(x, y) for x in members for y in members if self.less(x, y)]
        graph = nx.transitive_reduction(nx.DiGraph(relations)) if relations else nx.DiGraph()
        return FinitePoset(tuple(members), tuple(sorted(graph.edges)))
