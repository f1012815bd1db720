"""
Modules gradués par un groupe de degrés et morphismes gradués.
"""

from dataclasses import dataclass, field
import logging
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..errors import MismatchError
from .base_ring import BaseRing
from .grading import Degree, GradingGroup, GroupHom, format_degree
from .layout import PartLayout, transport
from .linear_system import HomSpace, LinearSystem
from .matrices import identity, kron, matmul, zeros
from .modules import Module, ModuleInvariants, ModuleMap, tensor_product

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class GradedModule:
    """
    Module gradué à support fini : degré → partie non nulle.

    Attributes:
        grading: Groupe de degrés
        ring: Anneau de base
        parts: Parties non nulles indexées par degré normalisé
        layouts: Provenance optionnelle de chaque partie
    """

    grading: GradingGroup
    ring: BaseRing
    parts: Mapping[Degree, Module] = field(default_factory=dict)
    layouts: Mapping[Degree, PartLayout] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        parts: Dict[Degree, Module] = {}
        layouts: Dict[Degree, PartLayout] = {}
        for degree, module in self.parts.items():
            key = self.grading.normalize(degree)
            if module.ring != self.ring:
                raise MismatchError(f"Partie de degré {key} sur {module.ring} au lieu de {self.ring}")
            if key in parts:
                raise ValueError(f"Degré répété : {key}")
            if module.generators and not module.is_zero():
                parts[key] = module
                if degree in self.layouts:
                    layouts[key] = self.layouts[degree]
        object.__setattr__(self, "parts", dict(sorted(parts.items())))
        object.__setattr__(self, "layouts", layouts)

    @classmethod
    def zero(cls, grading: GradingGroup, ring: BaseRing) -> "GradedModule":
        return cls(grading, ring, {})

    @classmethod
    def concentrated(
        cls, grading: GradingGroup, module: Module, degree: Optional[Sequence[int]] = None
    ) -> "GradedModule":
        """Module placé dans un seul degré (0 par défaut)."""
        key = grading.zero() if degree is None else grading.normalize(degree)
        return cls(grading, module.ring, {key: module})

    # Accès

    def support(self) -> List[Degree]:
        return list(self.parts)

    def part(self, degree: Sequence[int]) -> Module:
        return self.parts.get(self.grading.normalize(degree), Module.zero(self.ring))

    def layout(self, degree: Sequence[int]) -> Optional[PartLayout]:
        return self.layouts.get(self.grading.normalize(degree))

    def is_zero(self) -> bool:
        return not self.parts

    def invariants(self) -> Dict[Degree, ModuleInvariants]:
        return {degree: module.invariants for degree, module in self.parts.items()}

    def is_isomorphic(self, other: "GradedModule") -> bool:
        """Isomorphisme degré par degré (mêmes invariants partout)."""
        return self.grading == other.grading and self.invariants() == other.invariants()

    def __iter__(self) -> Iterator[Tuple[Degree, Module]]:
        return iter(self.parts.items())

    def __str__(self) -> str:
        if not self.parts:
            return "0"
        return " ⊕ ".join(f"{module}{format_degree(degree)}" for degree, module in self.parts.items())


@dataclass(frozen=True, eq=False)
class GradedMap:
    """
    Morphisme gradué : bloc (degré source) ↦ matrice vers la partie de degré image.

    Le degré image de λ est degree_map(λ) + shift (identité et 0 par défaut).

    Attributes:
        source: Module gradué de départ
        target: Module gradué d'arrivée
        blocks: Matrices par degré source
        degree_map: Morphisme des groupes de degrés (None : identité)
        shift: Décalage ajouté au degré image
    """

    source: GradedModule
    target: GradedModule
    blocks: Mapping[Degree, np.ndarray] = field(default_factory=dict, repr=False)
    degree_map: Optional[GroupHom] = None
    shift: Optional[Degree] = None

    def __post_init__(self) -> None:
        if self.degree_map is None and self.source.grading != self.target.grading:
            raise MismatchError(
                f"Groupes de degrés différents sans morphisme : {self.source.grading} et {self.target.grading}"
            )
        if self.degree_map is not None and (
            self.degree_map.source != self.source.grading or self.degree_map.target != self.target.grading
        ):
            raise MismatchError("Morphisme de degrés incompatible avec les modules")
        blocks: Dict[Degree, np.ndarray] = {}
        for degree, matrix in self.blocks.items():
            key = self.source.grading.normalize(degree)
            source_part = self.source.parts.get(key)
            target_part = self.target.parts.get(self.target_degree(key))
            if source_part is None or target_part is None:
                continue
            matrix = np.asarray(matrix, dtype=object)
            expected = (target_part.generators, source_part.generators)
            if matrix.shape != expected:
                raise ValueError(f"Bloc de degré {key} de forme {matrix.shape} au lieu de {expected}")
            blocks[key] = self.source.ring.reduce(matrix)
        object.__setattr__(self, "blocks", blocks)

    # Constructeurs

    @classmethod
    def identity(cls, module: GradedModule) -> "GradedMap":
        return cls(module, module, {d: identity(m.generators) for d, m in module.parts.items()})

    @classmethod
    def zero(
        cls,
        source: GradedModule,
        target: GradedModule,
        degree_map: Optional[GroupHom] = None,
        shift: Optional[Degree] = None,
    ) -> "GradedMap":
        return cls(source, target, {}, degree_map, shift)

    # Degrés

    def target_degree(self, degree: Sequence[int]) -> Degree:
        image = self.degree_map.apply(degree) if self.degree_map else self.target.grading.normalize(degree)
        if self.shift is not None:
            image = self.target.grading.add(image, self.shift)
        return image

    def block(self, degree: Sequence[int]) -> np.ndarray:
        key = self.source.grading.normalize(degree)
        if key in self.blocks:
            return self.blocks[key]
        return zeros(self.target.part(self.target_degree(key)).generators, self.source.part(key).generators)

    def module_map(self, degree: Sequence[int]) -> ModuleMap:
        return ModuleMap(self.source.part(degree), self.target.part(self.target_degree(degree)), self.block(degree))

    def is_degree_preserving(self) -> bool:
        return self.degree_map is None and not any(self.shift or ())

    # Algèbre

    def compose(self, other: "GradedMap") -> "GradedMap":
        """self ∘ other."""
        if other.target.grading != self.source.grading:
            raise MismatchError("Morphismes gradués non composables")
        blocks = {
            degree: matmul(self.block(other.target_degree(degree)), other.block(degree))
            for degree in other.source.parts
        }
        if self.degree_map is None and other.degree_map is None:
            degree_map = None
        else:
            first = other.degree_map or GroupHom.identity(other.source.grading)
            second = self.degree_map or GroupHom.identity(self.source.grading)
            degree_map = second.compose(first)
        shift = self._compose_shift(other)
        return GradedMap(other.source, self.target, blocks, degree_map, shift)

    def _compose_shift(self, other: "GradedMap") -> Optional[Degree]:
        if self.shift is None and other.shift is None:
            return None
        inner = other.shift or other.target.grading.zero()
        moved = self.degree_map.apply(inner) if self.degree_map else inner
        return self.target.grading.add(moved, self.shift or self.target.grading.zero())

    def combine(self, other: "GradedMap", factor: int = 1) -> "GradedMap":
        """self + factor·other (mêmes degrés)."""
        blocks = {d: self.block(d) + factor * other.block(d) for d in self.source.parts}
        return GradedMap(self.source, self.target, blocks, self.degree_map, self.shift)

    def scaled(self, factor: int) -> "GradedMap":
        return GradedMap(
            self.source, self.target, {d: m * factor for d, m in self.blocks.items()}, self.degree_map, self.shift
        )

    def is_zero(self) -> bool:
        return all(self.module_map(d).is_zero() for d in self.source.parts)

    def equals(self, other: "GradedMap") -> bool:
        if set(self.source.parts) != set(other.source.parts):
            return False
        for degree in self.source.parts:
            if self.target_degree(degree) != other.target_degree(degree):
                if not (self.module_map(degree).is_zero() and other.module_map(degree).is_zero()):
                    return False
                continue
            if not self.module_map(degree).equals(other.module_map(degree)):
                return False
        return True

    def is_isomorphism(self) -> bool:
        """Bijectif degré par degré (morphismes préservant le degré)."""
        if set(self.target.parts) != {self.target_degree(d) for d in self.source.parts}:
            return False
        return all(self.module_map(d).is_isomorphism() for d in self.source.parts)

    def inverse(self) -> "GradedMap":
        if not self.is_degree_preserving():
            raise ValueError("Inverse réservé aux morphismes préservant le degré")
        blocks = {d: self.module_map(d).inverse().matrix for d in self.source.parts}
        return GradedMap(self.target, self.source, blocks)

    def kernel(self) -> "GradedMap":
        """Inclusion du noyau (degré par degré)."""
        inclusions = {d: self.module_map(d).kernel() for d in self.source.parts}
        kernel = GradedModule(self.source.grading, self.source.ring, {d: m.source for d, m in inclusions.items()})
        return GradedMap(kernel, self.source, {d: inclusions[d].matrix for d in kernel.parts})

    def cokernel(self) -> "GradedMap":
        """Projection vers le conoyau ; exige un morphisme préservant le degré."""
        if not self.is_degree_preserving():
            raise ValueError("Conoyau réservé aux morphismes préservant le degré")
        projections = {d: self.module_map(d).cokernel() for d in self.target.parts}
        cokernel = GradedModule(self.target.grading, self.target.ring, {d: p.target for d, p in projections.items()})
        return GradedMap(self.target, cokernel, {d: projections[d].matrix for d in self.target.parts})


def shift_module(module: GradedModule, shift: Sequence[int]) -> GradedModule:
    """M⟨λ⟩ : la partie de degré μ vaut M_{μ+λ}."""
    grading = module.grading
    return GradedModule(
        grading,
        module.ring,
        {grading.sub(d, shift): m for d, m in module.parts.items()},
        {grading.sub(d, shift): module.layouts[d] for d in module.layouts},
    )


def direct_sum_graded(modules: Sequence[GradedModule], grading: GradingGroup, ring: BaseRing) -> GradedModule:
    """Somme directe ; chaque partie porte une disposition étiquetée par l'indice du facteur."""
    degrees = sorted({d for m in modules for d in m.parts})
    parts: Dict[Degree, Module] = {}
    layouts: Dict[Degree, PartLayout] = {}
    for degree in degrees:
        labels = [i for i, m in enumerate(modules) if degree in m.parts]
        layout = PartLayout.direct(labels, [modules[i].parts[degree] for i in labels], ring)
        parts[degree] = layout.part
        layouts[degree] = layout
    return GradedModule(grading, ring, parts, layouts)


def graded_tensor(a: GradedModule, b: GradedModule) -> GradedModule:
    """
    (A ⊗ B)_λ = ⊕_{μ+ν=λ} A_μ ⊗ B_ν, composantes étiquetées (μ, ν).

    Raises:
        MismatchError: Si les groupes ou les anneaux diffèrent
    """
    if a.grading != b.grading or a.ring != b.ring:
        raise MismatchError("Produit tensoriel de modules gradués incompatibles")
    grading = a.grading
    pieces: Dict[Degree, List[Tuple[Tuple[Degree, Degree], Module]]] = {}
    for mu, left in a.parts.items():
        for nu, right in b.parts.items():
            pieces.setdefault(grading.add(mu, nu), []).append(((mu, nu), tensor_product(left, right)))
    parts: Dict[Degree, Module] = {}
    layouts: Dict[Degree, PartLayout] = {}
    for degree, components in sorted(pieces.items()):
        layout = PartLayout.direct([c[0] for c in components], [c[1] for c in components], a.ring)
        parts[degree] = layout.part
        layouts[degree] = layout
    return GradedModule(grading, a.ring, parts, layouts)


def graded_tensor_map(f: GradedMap, g: GradedMap, source: GradedModule, target: GradedModule) -> GradedMap:
    """
    f ⊗ g entre produits tensoriels déjà calculés (dispositions (μ, ν)).

    Raises:
        MismatchError: Si f et g n'agissent pas de la même façon sur les degrés
    """
    if (f.degree_map is None) != (g.degree_map is None) or (
        f.degree_map is not None and not f.degree_map.equals(g.degree_map)  # type: ignore[arg-type]
    ):
        raise MismatchError("Produit tensoriel de morphismes de degrés différents")
    shift = None
    if f.shift is not None or g.shift is not None:
        zero = target.grading.zero()
        shift = target.grading.add(f.shift or zero, g.shift or zero)
    result = GradedMap(source, target, {}, f.degree_map, shift)
    blocks = {}
    for degree, layout in source.layouts.items():
        target_layout = target.layouts.get(result.target_degree(degree))
        if target_layout is None:
            continue
        blocks[degree] = transport(
            layout,
            target_layout,
            (
                ((mu, nu), (f.target_degree(mu), g.target_degree(nu)), kron(f.block(mu), g.block(nu)))
                for mu, nu in layout.labels
            ),
        )
    return GradedMap(source, target, blocks, f.degree_map, shift)


def graded_hom_spaces(a: GradedModule, b: GradedModule) -> Dict[Degree, HomSpace]:
    """
    Espaces Hom(A, B⟨λ⟩) préservant le degré, pour chaque λ candidat.

    Les inconnues sont étiquetées par le degré source μ (bloc A_μ → B_{μ+λ}).
    """
    if a.grading != b.grading or a.ring != b.ring:
        raise MismatchError("Hom gradué entre modules incompatibles")
    grading = a.grading
    candidates = sorted({grading.sub(nu, mu) for mu in a.parts for nu in b.parts})
    spaces: Dict[Degree, HomSpace] = {}
    for shift in candidates:
        system = LinearSystem(a.ring)
        for mu, module in a.parts.items():
            system.add_unknown(mu, module, b.part(grading.add(mu, shift)))
        space = system.solve()
        if not space.module.is_zero():
            spaces[shift] = space
    return spaces


def graded_hom(a: GradedModule, b: GradedModule) -> GradedModule:
    """Hom_gr(A, B) : en degré λ, les morphismes A → B⟨λ⟩."""
    spaces = graded_hom_spaces(a, b)
    return GradedModule(
        a.grading,
        a.ring,
        {shift: space.module for shift, space in spaces.items()},
        {shift: space.layout() for shift, space in spaces.items()},
    )
