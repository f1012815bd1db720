"""
Complexes bornés de faisceaux gradués, morphismes de complexes et résolutions.
"""

from dataclasses import dataclass, field
from enum import Enum
import logging
from typing import Dict, FrozenSet, List, Mapping, Optional

from ..algebra.base_ring import BaseRing
from ..errors import MismatchError
from .diagnostics import Diagnostic
from .sheaf import GradedSheaf, SheafMap
from .space import GradedSpace

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ComplexOfSheaves:
    """
    Complexe cohomologique borné C^n → C^{n+1}.

    Attributes:
        name: Nom
        space: Espace gradué
        ring: Anneau de base
        terms: Termes non nuls par degré cohomologique
        differentials: d^n : C^n → C^{n+1} (absent = nul)
    """

    name: str
    space: GradedSpace
    ring: BaseRing
    terms: Mapping[int, GradedSheaf] = field(default_factory=dict)
    differentials: Mapping[int, SheafMap] = field(default_factory=dict, repr=False)
    _zero: Dict[int, GradedSheaf] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        terms = {n: t for n, t in sorted(self.terms.items()) if not t.is_zero()}
        for n, term in terms.items():
            if term.ring != self.ring:
                raise MismatchError(f"Terme {n} sur {term.ring} au lieu de {self.ring}")
        object.__setattr__(self, "terms", terms)
        differentials: Dict[int, SheafMap] = {}
        for n, d in self.differentials.items():
            if n in terms and n + 1 in terms:
                if d.source is not self.terms[n] or d.target is not self.terms[n + 1]:
                    d = SheafMap(terms[n], terms[n + 1], d.components)
                differentials[n] = d
        object.__setattr__(self, "differentials", differentials)

    @classmethod
    def single(cls, sheaf: GradedSheaf, degree: int = 0, name: Optional[str] = None) -> "ComplexOfSheaves":
        """Faisceau placé en un seul degré."""
        return cls(name or sheaf.name, sheaf.space, sheaf.ring, {degree: sheaf})

    @classmethod
    def zero(cls, space: GradedSpace, ring: BaseRing, name: str = "0") -> "ComplexOfSheaves":
        return cls(name, space, ring)

    # Accès

    @property
    def degrees(self) -> List[int]:
        """Degrés de low à high inclus (vide pour le complexe nul)."""
        if not self.terms:
            return []
        return list(range(min(self.terms), max(self.terms) + 1))

    @property
    def low(self) -> int:
        return min(self.terms) if self.terms else 0

    @property
    def high(self) -> int:
        return max(self.terms) if self.terms else -1

    def term(self, n: int) -> GradedSheaf:
        if n in self.terms:
            return self.terms[n]
        if n not in self._zero:
            self._zero[n] = GradedSheaf.zero(self.space, self.ring)
        return self._zero[n]

    def differential(self, n: int) -> SheafMap:
        if n in self.differentials:
            return self.differentials[n]
        return SheafMap.zero(self.term(n), self.term(n + 1))

    def is_zero(self) -> bool:
        return not self.terms

    def renamed(self, name: str) -> "ComplexOfSheaves":
        return ComplexOfSheaves(name, self.space, self.ring, self.terms, self.differentials)

    def shifted(self, k: int) -> "ComplexOfSheaves":
        """C[k] : terme n = C^{n+k}, différentielle multipliée par (-1)^k."""
        sign = -1 if k % 2 else 1
        terms = {n - k: t for n, t in self.terms.items()}
        differentials = {n - k: d.scaled(sign) for n, d in self.differentials.items()}
        return ComplexOfSheaves(f"{self.name}[{k}]", self.space, self.ring, terms, differentials)

    def diagnostics(self) -> List[Diagnostic]:
        """d∘d = 0 et naturalité des différentielles."""
        problems: List[Diagnostic] = []
        for n, d in self.differentials.items():
            for problem in d.diagnostics():
                problems.append(Diagnostic(problem.code, f"{self.name}: d^{n} {problem.location}", problem.message))
            if n + 1 in self.differentials:
                square = self.differentials[n + 1].compose(d)
                if not square.is_zero():
                    problems.append(Diagnostic("D_SQUARED_NONZERO", f"{self.name}: degré {n}", "d∘d ≠ 0"))
        return problems


@dataclass(frozen=True, eq=False)
class ChainMap:
    """
    Morphisme de complexes.

    Attributes:
        source: Complexe de départ
        target: Complexe d'arrivée
        components: φ^n : C^n → D^n (absent = nul)
    """

    source: ComplexOfSheaves
    target: ComplexOfSheaves
    components: Mapping[int, SheafMap] = field(default_factory=dict, repr=False)

    def component(self, n: int) -> SheafMap:
        given = self.components.get(n)
        source, target = self.source.term(n), self.target.term(n)
        if given is None:
            return SheafMap.zero(source, target)
        if given.source is not source or given.target is not target:
            return SheafMap(source, target, given.components)
        return given

    def compose(self, other: "ChainMap") -> "ChainMap":
        """self ∘ other."""
        degrees = set(other.source.terms) | set(self.target.terms)
        return ChainMap(
            other.source,
            self.target,
            {n: self.component(n).compose(other.component(n)) for n in degrees},
        )

    def diagnostics(self) -> List[Diagnostic]:
        problems: List[Diagnostic] = []
        for n in sorted(self.components):
            problems.extend(self.component(n).diagnostics())
        degrees = sorted(set(self.source.degrees) | set(self.target.degrees))
        for n in degrees:
            left = self.target.differential(n).compose(self.component(n))
            right = self.component(n + 1).compose(self.source.differential(n))
            if not left.equals(right):
                problems.append(
                    Diagnostic(
                        "NOT_CHAIN_MAP",
                        f"{self.source.name} → {self.target.name}: degré {n}",
                        "d∘φ ≠ φ∘d",
                    )
                )
        return problems


class ResolutionKind(Enum):
    """Propriété certifiée d'un terme de résolution."""

    FLABBY = "flasque"
    SOFT = "mou"
    FLAT = "plat"
    INJECTIVE = "injectif"


@dataclass(frozen=True, eq=False)
class Resolution:
    """
    Résolution d'un complexe : quasi-isomorphisme vers (droite) ou depuis (gauche) un complexe.

    Attributes:
        resolved: Complexe résolu
        complex: Complexe résolvant
        augmentation: resolved → complex (résolution à droite) ou complex → resolved (à gauche)
        term_kinds: Propriétés certifiées de chaque terme
        right: True pour une résolution à droite (Godement), False à gauche (plate)
    """

    resolved: ComplexOfSheaves
    complex: ComplexOfSheaves
    augmentation: ChainMap
    term_kinds: Mapping[int, FrozenSet[ResolutionKind]] = field(default_factory=dict)
    right: bool = True

    @property
    def length(self) -> int:
        return len(self.complex.degrees)

    def kinds(self) -> FrozenSet[ResolutionKind]:
        """Propriétés communes à tous les termes."""
        if not self.term_kinds:
            return frozenset(ResolutionKind)
        result = frozenset(ResolutionKind)
        for kinds in self.term_kinds.values():
            result &= kinds
        return result
