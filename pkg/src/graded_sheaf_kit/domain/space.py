"""
Espaces topologiques gradués finis (X, Λ) et leurs morphismes.
"""

from dataclasses import dataclass, field
import logging
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple

from ..algebra.grading import GradingGroup, GroupHom
from ..algebra.matrices import block_diagonal, identity, matmul, vstack, zeros
from ..algebra.modules import ModuleMap, direct_sum
from ..algebra.base_ring import ZZ
from .diagnostics import Diagnostic
from .poset import FinitePoset, Point, order_diagnostics

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class OpenGrading:
    """
    Groupe des sections globales Λ(U) et ses projections vers les tiges.

    Attributes:
        open: Ouvert U
        group: Λ(U) sous forme canonique
        projections: Pour x ∈ U, le morphisme Λ(U) → Λ_x
    """

    open: FrozenSet[Point]
    group: GradingGroup
    projections: Mapping[Point, GroupHom]

    def restrict(self, degree: Tuple[int, ...], point: Point) -> Tuple[int, ...]:
        """λ|_x pour λ ∈ Λ(U)."""
        return self.projections[point].apply(degree)


@dataclass(frozen=True, eq=False)
class GradedSpace:
    """
    Espace fini muni d'un faisceau de groupes de degrés Λ.

    Attributes:
        name: Nom de l'espace
        poset: Ordre sous-jacent (topologie d'Alexandrov)
        lambdas: Tige Λ_x en chaque point
        lres: Restrictions Λ_x → Λ_y pour les relations x < y déclarées
    """

    name: str
    poset: FinitePoset
    lambdas: Mapping[Point, GradingGroup]
    lres: Mapping[Tuple[Point, Point], GroupHom] = field(default_factory=dict)
    _cache: Dict[object, object] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        missing = [p for p in self.poset.points if p not in self.lambdas]
        if missing:
            raise ValueError(f"Groupe de degrés manquant aux points : {missing}")
        for (x, y), hom in self.lres.items():
            if not self.poset.less(x, y):
                raise ValueError(f"Restriction de Λ hors de l'ordre : {x} < {y}")
            if hom.source != self.lambdas[x] or hom.target != self.lambdas[y]:
                raise ValueError(f"Restriction de Λ de {x} vers {y} entre les mauvais groupes")
        absent = [c for c in self.poset.covers if c not in self.lres]
        if absent:
            raise ValueError(f"Restrictions de Λ manquantes : {absent}")

    # Constructeurs

    @classmethod
    def point(cls, name: str = "PT", group: Optional[GradingGroup] = None, label: Point = "pt") -> "GradedSpace":
        return cls(name, FinitePoset((label,)), {label: group or GradingGroup.trivial()})

    @classmethod
    def constant(cls, name: str, poset: FinitePoset, group: GradingGroup) -> "GradedSpace":
        """Λ constant de restrictions identités."""
        return cls(
            name,
            poset,
            {p: group for p in poset.points},
            {c: GroupHom.identity(group) for c in poset.covers},
        )

    # Accès

    @property
    def points(self) -> Tuple[Point, ...]:
        return self.poset.points

    def lambda_at(self, x: Point) -> GradingGroup:
        return self.lambdas[x]

    def lambda_restriction(self, x: Point, y: Point) -> GroupHom:
        """ρ_{xy} : Λ_x → Λ_y pour x ≤ y, composé le long d'un chemin de couvertures."""
        key = ("lres", x, y)
        if key not in self._cache:
            result = GroupHom.identity(self.lambdas[x])
            for a, b in self.poset.path(x, y):
                result = self.lres[(a, b)].compose(result)
            self._cache[key] = result
        return self._cache[key]  # type: ignore[return-value]

    def open_grading(self, subset: Iterable[Point]) -> OpenGrading:
        """Λ(U) et projections (mis en cache)."""
        opened = self.poset.require_open(subset)
        key = ("open", opened)
        if key not in self._cache:
            self._cache[key] = sections_of_lambda(self, opened)
        return self._cache[key]  # type: ignore[return-value]

    def restrict_grading(self, larger: Iterable[Point], smaller: Iterable[Point]) -> GroupHom:
        """Restriction Λ(U) → Λ(V) pour des ouverts V ⊆ U."""
        big, small = self.open_grading(larger), self.open_grading(smaller)
        if not small.open <= big.open:
            raise ValueError(f"Restriction vers un ouvert non contenu : {sorted(small.open)}")
        points = self.poset.sorted_points(small.open)
        ambient, _ = direct_sum([self.lambdas[p].as_module for p in points], ZZ)
        into = ModuleMap(
            small.group.as_module,
            ambient,
            vstack([small.projections[p].matrix for p in points], small.group.rank),
        )
        family = ModuleMap(
            big.group.as_module,
            ambient,
            vstack([big.projections[p].matrix for p in points], big.group.rank),
        )
        return GroupHom(big.group, small.group, into.lift(family).matrix)

    def underlying(self) -> "GradedSpace":
        """Même espace, Λ ≡ 0."""
        trivial = GradingGroup.trivial()
        return GradedSpace(
            f"{self.name}_0",
            self.poset,
            {p: trivial for p in self.points},
            {c: GroupHom.identity(trivial) for c in self.poset.covers},
        )

    def subspace(self, subset: Iterable[Point], name: Optional[str] = None) -> "GradedSpace":
        """
        Sous-espace localement fermé muni de la restriction de Λ.

        Raises:
            NotLocallyClosedError: Si le sous-ensemble n'est pas localement fermé
        """
        chosen = self.poset.require_locally_closed(subset)
        poset = self.poset.induced(chosen)
        return GradedSpace(
            name or f"{self.name}|{''.join(sorted(chosen))}",
            poset,
            {p: self.lambdas[p] for p in poset.points},
            {(x, y): self.lambda_restriction(x, y) for x, y in poset.covers},
        )


def sections_of_lambda(space: GradedSpace, subset: Iterable[Point]) -> OpenGrading:
    """
    Λ(U) = noyau de ⊕_{x∈U} Λ_x → ⊕_{x<y couverture} Λ_y.

    Si U possède un plus petit élément x, Λ(U) = Λ_x avec les restrictions ρ_{xy}.
    """
    poset = space.poset
    opened = frozenset(subset)
    if not opened:
        return OpenGrading(opened, GradingGroup.trivial(), {})
    least = poset.least(opened)
    if least is not None:
        projections = {p: space.lambda_restriction(least, p) for p in opened}
        return OpenGrading(opened, space.lambdas[least], projections)
    points = poset.sorted_points(opened)
    groups = [space.lambdas[p] for p in points]
    ambient, offsets = direct_sum([g.as_module for g in groups], ZZ)
    position = dict(zip(points, offsets))
    edges = poset.covers_within(opened)
    targets, rows = direct_sum([space.lambdas[y].as_module for _, y in edges], ZZ)
    difference = zeros(targets.generators, ambient.generators)
    for (x, y), row in zip(edges, rows):
        height = space.lambdas[y].rank
        start_x, start_y = position[x], position[y]
        difference[row : row + height, start_x : start_x + space.lambdas[x].rank] += space.lres[(x, y)].matrix
        difference[row : row + height, start_y : start_y + height] -= identity(height)
    inclusion = ModuleMap(ambient, targets, difference).kernel()
    group = GradingGroup(inclusion.source.diagonal_orders())
    projections = {
        p: GroupHom(group, space.lambdas[p], inclusion.matrix[position[p] : position[p] + space.lambdas[p].rank, :])
        for p in points
    }
    logger.debug("Λ(%s) sur %s = %s", sorted(opened), space.name, group)
    return OpenGrading(opened, group, projections)


def validate_space(space: GradedSpace) -> List[Diagnostic]:
    """Diagnostics d'ordre et de fonctorialité de Λ."""
    diagnostics = order_diagnostics(space.points, space.poset.relations)
    poset = space.poset
    for x in poset.points:
        for y in poset.points:
            if not poset.less(x, y):
                continue
            expected = space.lambda_restriction(x, y)
            for a, b in poset.covers:
                if a == x and poset.leq(b, y):
                    candidate = space.lambda_restriction(b, y).compose(space.lres[(x, b)])
                    if not candidate.equals(expected):
                        diagnostics.append(
                            Diagnostic(
                                "NOT_FUNCTORIAL",
                                f"{space.name}: {x} < {y}",
                                f"les chemins par {b} et par le chemin canonique diffèrent",
                            )
                        )
            declared = space.lres.get((x, y))
            if declared is not None and (x, y) not in poset.covers and not declared.equals(expected):
                diagnostics.append(
                    Diagnostic("NOT_FUNCTORIAL", f"{space.name}: {x} < {y}", "restriction déclarée incohérente")
                )
    return diagnostics


@dataclass(frozen=True, eq=False)
class GradedSpaceMap:
    """
    Morphisme f : (X, Λ_X) → (Y, Λ_Y).

    Attributes:
        name: Nom du morphisme
        source: Espace X
        target: Espace Y
        points: Application continue x ↦ f(x)
        flats: f♭_x : Λ_{Y,f(x)} → Λ_{X,x}
    """

    name: str
    source: GradedSpace
    target: GradedSpace
    points: Mapping[Point, Point]
    flats: Mapping[Point, GroupHom]
    _cache: Dict[object, object] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        for x in self.source.points:
            if x not in self.points or self.points[x] not in self.target.poset:
                raise ValueError(f"Image du point {x} manquante ou inconnue")
            if x not in self.flats:
                raise ValueError(f"f♭ manquant au point {x}")
            flat = self.flats[x]
            if flat.source != self.target.lambdas[self.points[x]] or flat.target != self.source.lambdas[x]:
                raise ValueError(f"f♭ au point {x} entre les mauvais groupes")

    # Constructeurs

    @classmethod
    def identity(cls, space: GradedSpace) -> "GradedSpaceMap":
        return cls(
            f"id_{space.name}",
            space,
            space,
            {p: p for p in space.points},
            {p: GroupHom.identity(space.lambdas[p]) for p in space.points},
        )

    @classmethod
    def inclusion(cls, space: GradedSpace, subset: Iterable[Point], name: Optional[str] = None) -> "GradedSpaceMap":
        """Inclusion stricte d'un sous-espace localement fermé."""
        sub = space.subspace(subset)
        return cls(
            name or f"i_{sub.name}",
            sub,
            space,
            {p: p for p in sub.points},
            {p: GroupHom.identity(space.lambdas[p]) for p in sub.points},
        )

    @classmethod
    def to_point(cls, space: GradedSpace, target: Optional[GradedSpace] = None, name: str = "p") -> "GradedSpaceMap":
        """Projection vers un point ; f♭ nul si le point a Λ = 0."""
        target = target or GradedSpace.point()
        (label,) = target.points
        group = target.lambdas[label]
        return cls(
            name,
            space,
            target,
            {p: label for p in space.points},
            {p: GroupHom.zero(group, space.lambdas[p]) for p in space.points},
        )

    # Accès

    def __call__(self, x: Point) -> Point:
        return self.points[x]

    def preimage(self, subset: Iterable[Point]) -> FrozenSet[Point]:
        chosen = frozenset(subset)
        return frozenset(x for x in self.source.points if self.points[x] in chosen)

    def is_strict(self) -> bool:
        return all(flat.is_isomorphism() for flat in self.flats.values())

    def pulled_projection(self, y: Point, x: Point) -> GroupHom:
        """Λ_{Y,y} → Λ_{X,x} pour x ∈ f⁻¹(U_y) : f♭_x ∘ ρ_{y,f(x)}."""
        key = ("pull", y, x)
        if key not in self._cache:
            self._cache[key] = self.flats[x].compose(self.target.lambda_restriction(y, self.points[x]))
        return self._cache[key]  # type: ignore[return-value]

    def compose_after(self, other: "GradedSpaceMap") -> "GradedSpaceMap":
        """self ∘ other."""
        if other.target is not self.source and other.target.name != self.source.name:
            raise ValueError(f"Morphismes non composables : {other.name} puis {self.name}")
        return GradedSpaceMap(
            f"{self.name}∘{other.name}",
            other.source,
            self.target,
            {x: self.points[other.points[x]] for x in other.source.points},
            {x: other.flats[x].compose(self.flats[other.points[x]]) for x in other.source.points},
        )

    def diagnostics(self) -> List[Diagnostic]:
        """Continuité et naturalité de f♭."""
        problems: List[Diagnostic] = []
        source, target = self.source.poset, self.target.poset
        for x, y in source.covers:
            fx, fy = self.points[x], self.points[y]
            if not target.leq(fx, fy):
                problems.append(
                    Diagnostic("NOT_CONTINUOUS", f"{self.name}: {x} < {y}", f"{fx} ≰ {fy} dans la cible")
                )
                continue
            left = self.source.lres[(x, y)].compose(self.flats[x])
            right = self.flats[y].compose(self.target.lambda_restriction(fx, fy))
            if not left.equals(right):
                problems.append(
                    Diagnostic("FLAT_NOT_NATURAL", f"{self.name}: {x} < {y}", "f♭ ne commute pas aux restrictions")
                )
        return problems


def is_proper_on(f: GradedSpaceMap, subset: Iterable[Point], target_open: Optional[Iterable[Point]] = None) -> bool:
    """
    Vrai si pour tout s ∈ S, f(adh(s) ∩ S) est fermé dans l'ouvert cible.
    """
    chosen = frozenset(subset)
    base = frozenset(target_open) if target_open is not None else frozenset(f.target.points)
    target = f.target.poset
    for s in chosen:
        image = {f.points[t] for t in chosen if f.source.poset.leq(t, s)}
        for z in base:
            if z not in image and any(target.leq(z, w) for w in image):
                return False
    return True


def largest_proper_closed(f: GradedSpaceMap, subset: Iterable[Point], target_open: Iterable[Point]) -> FrozenSet[Point]:
    """Réunion des fermés de `subset` sur lesquels f est propre (elle-même propre)."""
    target_open = frozenset(target_open)
    result: FrozenSet[Point] = frozenset()
    for closed in f.source.poset.closed_subsets_of(subset):
        if is_proper_on(f, closed, target_open):
            result = result | closed
    return result


@dataclass(frozen=True, eq=False)
class CartesianSquare:
    """
    Carré cartésien Z = Y1 ×_X Y2.

    Attributes:
        space: Espace Z
        f_tilde: Projection Z → Y2
        g_tilde: Projection Z → Y1
        f: Morphisme Y1 → X
        g: Morphisme Y2 → X
    """

    space: GradedSpace
    f_tilde: GradedSpaceMap
    g_tilde: GradedSpaceMap
    f: GradedSpaceMap
    g: GradedSpaceMap


def fiber_product(f: GradedSpaceMap, g: GradedSpaceMap, name: Optional[str] = None) -> CartesianSquare:
    """
    Produit fibré de f : Y1 → X et g : Y2 → X.

    Λ_Z en (y1, y2) est la somme amalgamée de Λ_{Y1,y1} ← Λ_{X,x} → Λ_{Y2,y2}.

    Raises:
        ValueError: Si f et g n'ont pas la même cible
    """
    if f.target is not g.target and f.target.name != g.target.name:
        raise ValueError(f"Cibles différentes : {f.target.name} et {g.target.name}")
    y1_space, y2_space = f.source, g.source
    pairs = [(a, b) for a in y1_space.points for b in y2_space.points if f.points[a] == g.points[b]]
    label = {pair: f"{pair[0]}*{pair[1]}" for pair in pairs}
    relations = [
        (label[p], label[q])
        for p in pairs
        for q in pairs
        if p != q and y1_space.poset.leq(p[0], q[0]) and y2_space.poset.leq(p[1], q[1])
    ]
    poset = FinitePoset(tuple(label[p] for p in pairs), tuple(relations)).induced(label[p] for p in pairs)

    projections: Dict[Point, ModuleMap] = {}
    groups: Dict[Point, GradingGroup] = {}
    from_y1: Dict[Point, GroupHom] = {}
    from_y2: Dict[Point, GroupHom] = {}
    for pair in pairs:
        a, b = pair
        base = f.target.lambdas[f.points[a]]
        left, right = y1_space.lambdas[a], y2_space.lambdas[b]
        ambient, _ = direct_sum([left.as_module, right.as_module], ZZ)
        amalgam = ModuleMap(
            base.as_module,
            ambient,
            vstack([f.flats[a].matrix, -g.flats[b].matrix], base.rank),
        )
        projection = amalgam.cokernel()
        group = GradingGroup(projection.target.diagonal_orders())
        z = label[pair]
        projections[z] = projection
        groups[z] = group
        from_y1[z] = GroupHom(left, group, projection.matrix[:, : left.rank])
        from_y2[z] = GroupHom(right, group, projection.matrix[:, left.rank :])
    inverse_label = {v: k for k, v in label.items()}
    lres: Dict[Tuple[Point, Point], GroupHom] = {}
    for z, w in poset.covers:
        (a, b), (c, d) = inverse_label[z], inverse_label[w]
        moved = block_diagonal(
            [y1_space.lambda_restriction(a, c).matrix, y2_space.lambda_restriction(b, d).matrix]
        )
        into = ModuleMap(projections[z].source, projections[w].target, matmul(projections[w].matrix, moved))
        lres[(z, w)] = GroupHom(groups[z], groups[w], projections[z].descend(into).matrix)
    space = GradedSpace(name or f"{y1_space.name}x{y2_space.name}", poset, groups, lres)
    f_tilde = GradedSpaceMap(
        f"{f.name}~", space, y2_space, {label[p]: p[1] for p in pairs}, {label[p]: from_y2[label[p]] for p in pairs}
    )
    g_tilde = GradedSpaceMap(
        f"{g.name}~", space, y1_space, {label[p]: p[0] for p in pairs}, {label[p]: from_y1[label[p]] for p in pairs}
    )
    logger.info("Produit fibré %s : %s points", space.name, len(pairs))
    return CartesianSquare(space, f_tilde, g_tilde, f, g)
