"""
Suites de lois exécutées par `graded-sheaf check`.

Chaque suite tire ses instances d'un InstanceGenerator initialisé avec la
graine donnée. Avec inject_fault, le morphisme canonique de la première
instance qui en possède un bloc non nul est altéré (un bloc de tige mis à
zéro) avant la certification.
"""

from dataclasses import dataclass, field
import logging
from typing import Callable, Dict, Iterable, List, Optional, Sequence

import pandas as pd

from ..algebra.base_ring import BaseRing
from ..algebra.graded import GradedMap
from ..algebra.grading import DegreeWindow, GradingGroup
from ..algebra.matrices import is_zero, zeros
from ..domain.complexes import ChainMap
from ..domain.poset import FinitePoset, Point
from ..domain.sheaf import SheafMap
from ..domain.space import GradedSpace
from .abelian import basic_exact_sequence
from .adjunction import base_change_map, certify_adjunction, certify_base_change, sheaf_adjoint_pair
from .derived import (
    basic_triangle,
    derived_base_change_check,
    flat_resolution,
    projection_formula_check,
    resolution_certificate,
)
from .duality import (
    DualityConfig,
    biduality_check,
    duality_identities_check,
    dualizing_complex,
    dualizing_is_invertible,
    soft_flat_resolution_of_R,
    upper_shriek_adjunction_check,
)
from .generators import InstanceGenerator
from .reports import Certificate, summarize
from .ringed_ops import check_module_adjunction

logger = logging.getLogger(__name__)

SUITES = ("adjunction", "base-change", "projection", "triangle", "duality")

PSEUDO_CIRCLE = FinitePoset(
    ("c1", "c2", "o1", "o2"), (("c1", "o1"), ("c1", "o2"), ("c2", "o1"), ("c2", "o2"))
)


def corrupt_map(
    phi: SheafMap, points: Optional[Iterable[Point]] = None, zero_degree_only: bool = False
) -> Optional[SheafMap]:
    """
    Copie de φ dont le premier bloc de tige non nul est mis à zéro.

    Args:
        phi: Morphisme à altérer
        points: Points candidats (tous par défaut)
        zero_degree_only: Ne toucher qu'au bloc du degré nul

    Returns:
        Le morphisme altéré, ou None si aucun bloc candidat n'est non nul
    """
    for x in points if points is not None else phi.source.space.points:
        component = phi.component(x)
        zero = phi.source.space.lambdas[x].zero()
        for degree, block in component.blocks.items():
            if zero_degree_only and degree != zero:
                continue
            if block.size and not is_zero(block):
                blocks = dict(component.blocks)
                blocks[degree] = zeros(*block.shape)
                components = dict(phi.components)
                components[x] = GradedMap(
                    component.source, component.target, blocks, component.degree_map, component.shift
                )
                logger.debug("Bloc altéré en %s, degré %s", x, degree)
                return SheafMap(phi.source, phi.target, components, phi.degree)
    return None


def corrupt_chain(chain: ChainMap) -> Optional[ChainMap]:
    for n in sorted(chain.components):
        altered = corrupt_map(chain.component(n))
        if altered is not None:
            components = dict(chain.components)
            components[n] = altered
            return ChainMap(chain.source, chain.target, components)
    return None


@dataclass
class SuiteResult:
    """Certificats d'une suite."""

    suite: str
    certificates: List[Certificate] = field(default_factory=list)
    fault_injected: bool = False

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.certificates)

    @property
    def failures(self) -> List[Certificate]:
        return [c for c in self.certificates if not c.passed]

    def summary(self) -> pd.DataFrame:
        return summarize(self.certificates)

    def require(self) -> "SuiteResult":
        """
        Raises:
            LawViolation: Pour le premier certificat en échec
        """
        for certificate in self.certificates:
            certificate.require()
        return self


class SuiteRunner:
    """Exécute les suites de lois sur des instances aléatoires reproductibles."""

    def __init__(
        self,
        seed: int = 1,
        count: int = 25,
        ring: Optional[BaseRing] = None,
        gradings: Optional[Sequence[GradingGroup]] = None,
        max_points: int = 4,
        inject_fault: bool = False,
        window: Optional[DegreeWindow] = None,
    ):
        self.seed = seed
        self.count = count
        self.ring = ring or BaseRing.prime_field(2)
        self.gradings = list(gradings) if gradings else [GradingGroup.trivial()]
        self.max_points = max_points
        self.inject_fault = inject_fault
        self.window = window
        self._handlers: Dict[str, Callable[[InstanceGenerator, "_Fault"], List[Certificate]]] = {
            "adjunction": self._adjunction,
            "base-change": self._base_change,
            "projection": self._projection,
            "triangle": self._triangle,
            "duality": self._duality,
        }

    def generator(self, max_points: Optional[int] = None) -> InstanceGenerator:
        return InstanceGenerator(self.seed, self.ring, self.gradings, max_points or self.max_points)

    def run(self, suite: str) -> List[SuiteResult]:
        """
        Raises:
            ValueError: Si la suite est inconnue
        """
        if suite == "all":
            names = list(SUITES)
        elif suite in self._handlers:
            names = [suite]
        else:
            raise ValueError(f"Suite inconnue : {suite} (choix : {', '.join(SUITES)}, all)")
        results = []
        for name in names:
            fault = _Fault(self.inject_fault)
            generator = self.generator(min(self.max_points, 3) if name == "duality" else None)
            certificates = self._handlers[name](generator, fault)
            result = SuiteResult(name, certificates, fault.used)
            logger.info(
                "Suite %s : %s certificats, %s échecs", name, len(certificates), len(result.failures)
            )
            results.append(result)
        return results

    # Suites

    def _adjunction(self, generator: InstanceGenerator, fault: "_Fault") -> List[Certificate]:
        certificates = []
        for _ in range(self.count):
            instance = generator.map_instance()
            pair = sheaf_adjoint_pair(instance.f)
            # η_y en degré nul, y dans l'image de f : ε ∘ f⁻¹η = id le détecte
            image = sorted(set(instance.f.points.values()))
            unit = fault.apply(pair.unit(instance.target_sheaf), points=image, zero_degree_only=True)
            certificate = certify_adjunction(pair, instance.target_sheaf, instance.source_sheaf, unit=unit)
            certificate.instance = instance.label
            certificates.append(certificate)
        for _ in range(self.count):
            instance = generator.module_instance()
            certificate = check_module_adjunction(instance.f, instance.source_module, instance.target_module)
            certificate.instance = instance.label
            certificates.append(certificate)
        return certificates

    def _base_change(self, generator: InstanceGenerator, fault: "_Fault") -> List[Certificate]:
        certificates = []
        for _ in range(self.count):
            instance = generator.square_instance()
            try:
                phi = fault.apply(base_change_map(instance.square, instance.sheaf))
            except ValueError as error:
                failed = Certificate("base-change", instance=instance.label)
                certificates.append(failed.fail(f"morphisme canonique mal défini : {error}"))
            else:
                certificates.append(certify_base_change(phi, instance.label))
            certificates.append(derived_base_change_check(instance.square, instance.sheaf, self.window))
        return certificates

    def _projection(self, generator: InstanceGenerator, fault: "_Fault") -> List[Certificate]:
        certificates = []
        for _ in range(self.count):
            instance = generator.map_instance()
            resolution = flat_resolution(instance.target_sheaf)
            augmentation = fault.apply_chain(resolution.augmentation)
            certificates.append(
                resolution_certificate(resolution, self.window, augmentation, law="flat-resolution")
            )
            certificates.append(
                projection_formula_check(instance.f, instance.source_sheaf, instance.target_sheaf, self.window)
            )
        return certificates

    def _triangle(self, generator: InstanceGenerator, fault: "_Fault") -> List[Certificate]:
        certificates = []
        for _ in range(self.count):
            instance = generator.open_instance()
            sequence = basic_exact_sequence(instance.sheaf, instance.opened)
            exact = Certificate("basic-exact-sequence", instance=instance.label)
            for problem in sequence.failures():
                exact.fail(problem)
            certificates.append(exact)
            triangle = basic_triangle(instance.sheaf, instance.opened)
            certificates.append(triangle.certificate(fault.apply_chain(triangle.comparison)))
        return certificates

    def _duality(self, generator: InstanceGenerator, fault: "_Fault") -> List[Certificate]:
        config = DualityConfig(self.ring, window=self.window)
        certificates = [config.certificate()]
        for _ in range(min(self.count, 5)):
            instance = generator.map_instance()
            f = instance.f
            resolution = soft_flat_resolution_of_R(f.source, self.ring, self.window)
            augmentation = fault.apply_chain(resolution.augmentation)
            certificates.append(
                resolution_certificate(resolution, self.window, augmentation, law="soft-flat-resolution")
            )
            certificates.append(
                upper_shriek_adjunction_check(f, instance.source_sheaf, instance.target_sheaf, self.window)
            )
            dualizing = dualizing_complex(f.source, config)
            if dualizing_is_invertible(dualizing):
                certificates.append(biduality_check(instance.source_sheaf, dualizing))
            other = generator.sheaf(f.target)
            certificates.extend(duality_identities_check(f, instance.target_sheaf, other, config))
        # biduality sur le pseudo-cercle, où ω_X = k[1]
        circle = GradedSpace.constant(f"S1_{self.seed}", PSEUDO_CIRCLE, GradingGroup.trivial())
        certificates.append(biduality_check(generator.sheaf(circle), dualizing_complex(circle, config)))
        return certificates


class _Fault:
    """Altération unique, sur le premier morphisme qui s'y prête."""

    def __init__(self, enabled: bool):
        self.enabled = enabled
        self.used = False

    def apply(
        self, phi: SheafMap, points: Optional[Iterable[Point]] = None, zero_degree_only: bool = False
    ) -> SheafMap:
        if not self.enabled or self.used:
            return phi
        altered = corrupt_map(phi, points, zero_degree_only)
        if altered is None:
            return phi
        self.used = True
        return altered

    def apply_chain(self, chain: ChainMap) -> ChainMap:
        if not self.enabled or self.used:
            return chain
        altered = corrupt_chain(chain)
        if altered is None:
            return chain
        self.used = True
        return altered
