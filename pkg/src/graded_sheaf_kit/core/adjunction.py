"""
Adjonction f⁻¹ ⊣ f_*, changement de base non dérivé et compatibilités de f⁻¹.

Les unités, coünités et morphismes de changement de base sont construits
explicitement composante par composante, puis certifiés : naturalité,
identités triangulaires, bijection des ensembles de morphismes.
"""

from dataclasses import dataclass
import logging
from typing import Any, Callable, Optional, Tuple

from ..algebra.graded import GradedMap, GradedModule
from ..algebra.layout import assemble, gather
from ..algebra.linear_system import HomSpace
from ..algebra.matrices import hstack, kron, matmul
from ..algebra.modules import ModuleMap
from ..domain.sheaf import GradedSheaf, SheafMap
from ..domain.space import CartesianSquare, GradedSpaceMap
from .functors import (
    hom_space,
    inverse_image_gr,
    inverse_image_map,
    map_from_blocks,
    map_to_blocks,
    pushforward_family,
    pushforward_gr,
    pushforward_map,
    shriek_pushforward_gr,
    tensor_sheaf,
)
from .reports import Certificate, isomorphism_certificate
from .sections import global_sections, section_module

logger = logging.getLogger(__name__)


# Unité et coünité de f⁻¹ ⊣ f_*


def adjunction_unit(f: GradedSpaceMap, sheaf: GradedSheaf) -> SheafMap:
    """
    η_G : G → f_* f⁻¹G.

    En y et degré μ, g ↦ (x ↦ ρ_{y,f(x)} g), rangé dans la composante
    μ' = ρ_{y,f(x)} μ de (f⁻¹G)_x.
    """
    pulled = inverse_image_gr(f, sheaf)
    pushed = pushforward_gr(f, pulled)
    components = {}
    for y in f.target.points:
        blocks = {}
        for mu, module in sheaf.stalks[y].parts.items():
            layout = pushed.stalks[y].layout(mu)
            if layout is None:
                continue
            family = pushforward_family(f, y, mu)
            pieces = []
            for x in layout.labels:
                restriction = sheaf.restriction(y, f(x))
                inner = pulled.stalks[x].layout(family[x])
                if inner is None:
                    continue
                placed = assemble(inner, [(restriction.target_degree(mu), restriction.block(mu))], module.generators)
                pieces.append((x, placed))
            blocks[mu] = assemble(layout, pieces, module.generators)
        components[y] = GradedMap(sheaf.stalks[y], pushed.stalks[y], blocks)
    return SheafMap(sheaf, pushed, components)


def adjunction_counit(f: GradedSpaceMap, sheaf: GradedSheaf) -> SheafMap:
    """ε_F : f⁻¹ f_* F → F, évaluation d'une section au point x."""
    pushed = pushforward_gr(f, sheaf)
    pulled = inverse_image_gr(f, pushed)
    components = {}
    for x in f.source.points:
        blocks = {}
        for lam, layout in pulled.stalks[x].layouts.items():
            rows = sheaf.stalks[x].part(lam).generators
            pieces = []
            for mu in layout.labels:
                sections_layout = pushed.stalks[f(x)].layout(mu)
                if sections_layout is not None and x in sections_layout:
                    pieces.append((mu, sections_layout.component(x)))
            blocks[lam] = gather(layout, pieces, rows)
        components[x] = GradedMap(pulled.stalks[x], sheaf.stalks[x], blocks)
    return SheafMap(pulled, sheaf, components)


@dataclass(frozen=True, eq=False)
class AdjointPair:
    """
    Paire adjointe L ⊣ R donnée par ses foncteurs, unités et espaces de morphismes.

    Les objets sont des faisceaux gradués ou des faisceaux de modules ; `underlying`
    renvoie le faisceau gradué porteur des morphismes.

    Attributes:
        name: Nom de la loi certifiée
        left: L sur les objets
        right: R sur les objets
        left_map: L sur les morphismes
        right_map: R sur les morphismes
        unit: G ↦ η_G : G → R L G
        counit: F ↦ ε_F : L R F → F
        hom: Module des morphismes (linéaires pour la structure considérée)
        underlying: Faisceau gradué sous-jacent à un objet
    """

    name: str
    left: Callable[[Any], Any]
    right: Callable[[Any], Any]
    left_map: Callable[[SheafMap], SheafMap]
    right_map: Callable[[SheafMap], SheafMap]
    unit: Callable[[Any], SheafMap]
    counit: Callable[[Any], SheafMap]
    hom: Callable[[Any, Any], HomSpace]
    underlying: Callable[[Any], GradedSheaf]


def sheaf_adjoint_pair(f: GradedSpaceMap) -> AdjointPair:
    return AdjointPair(
        name="sheaf-adjunction",
        left=lambda g: inverse_image_gr(f, g),
        right=lambda h: pushforward_gr(f, h),
        left_map=lambda psi: inverse_image_map(f, psi),
        right_map=lambda phi: pushforward_map(f, phi),
        unit=lambda g: adjunction_unit(f, g),
        counit=lambda h: adjunction_counit(f, h),
        hom=hom_space,
        underlying=lambda obj: obj,
    )


def hom_bijection(pair: AdjointPair, source: Any, target: Any, unit: SheafMap) -> ModuleMap:
    """
    Hom(L G, F) → Hom(G, R F), φ ↦ R(φ) ∘ η_G, sur les générateurs du premier module.

    Raises:
        ValueError: Si l'image d'un générateur n'est pas un morphisme
    """
    left_obj, right_obj = pair.left(source), pair.right(target)
    domain = pair.hom(left_obj, target)
    codomain = pair.hom(source, right_obj)
    columns = []
    for blocks in domain.basis():
        phi = map_from_blocks(pair.underlying(left_obj), pair.underlying(target), blocks)
        image = pair.right_map(phi).compose(unit)
        columns.append(codomain.encode(map_to_blocks(image)))
    matrix = hstack(columns, codomain.module.generators)
    return ModuleMap(domain.module, codomain.module, matrix)


def certify_adjunction(
    pair: AdjointPair,
    source: Any,
    target: Any,
    unit: Optional[SheafMap] = None,
    counit: Optional[SheafMap] = None,
) -> Certificate:
    """
    Identités triangulaires et bijection Hom(L G, F) ≅ Hom(G, R F).

    Args:
        pair: Paire adjointe
        source: G, objet de la catégorie d'arrivée de L
        target: F, objet de la catégorie d'arrivée de R
        unit: η_G à certifier (calculée si absente)
        counit: ε_F à certifier (calculée si absente)
    """
    eta = unit if unit is not None else pair.unit(source)
    epsilon = counit if counit is not None else pair.counit(target)
    certificate = Certificate(pair.name, instance=f"{pair.underlying(source).name}, {pair.underlying(target).name}")
    for label, phi in (("unité", eta), ("coünité", epsilon)):
        for problem in phi.diagnostics():
            certificate.fail(f"{label} : {problem.code} {problem.location}")

    left_obj = pair.left(source)
    first = pair.counit(left_obj).compose(pair.left_map(eta))
    if not first.equals(SheafMap.identity(pair.underlying(left_obj))):
        certificate.fail("ε_{L G} ∘ L(η_G) ≠ id")
    right_obj = pair.right(target)
    second = pair.right_map(epsilon).compose(pair.unit(right_obj))
    if not second.equals(SheafMap.identity(pair.underlying(right_obj))):
        certificate.fail("R(ε_F) ∘ η_{R F} ≠ id")

    try:
        bijection = hom_bijection(pair, source, target, eta)
    except ValueError as error:
        return certificate.fail(f"φ ↦ R(φ) ∘ η ne tombe pas dans Hom : {error}")
    if not bijection.is_isomorphism():
        certificate.fail(f"Hom(L G, F) = {bijection.source} → Hom(G, R F) = {bijection.target} non bijective")
    if bijection.source.cardinality != bijection.target.cardinality:
        certificate.fail(
            f"cardinaux différents : {bijection.source.cardinality} ≠ {bijection.target.cardinality}"
        )
    logger.debug("Adjonction %s : %s", pair.name, "ok" if certificate.passed else certificate.details)
    return certificate


def check_sheaf_adjunction(f: GradedSpaceMap, first: GradedSheaf, second: GradedSheaf) -> Certificate:
    """
    Certifie f⁻¹ ⊣ f_* pour F sur X (first) et G sur Y (second).

    Returns:
        Certificat "sheaf-adjunction"
    """
    return certify_adjunction(sheaf_adjoint_pair(f), second, first)


# Changement de base non dérivé


def base_change_map(square: CartesianSquare, sheaf: GradedSheaf) -> SheafMap:
    """
    g⁻¹ f_! F → f̃_! g̃⁻¹ F sur Y2.

    Une section s de f_!F de degré μ au-dessus de U_{g(b)} est envoyée sur la
    famille t_{a*b'} = s_a, rangée dans la composante f♭_a ρ_{g(b),f(a)} μ de
    (g̃⁻¹F)_{a*b'}.

    Raises:
        ValueError: Si une famille image ne vérifie pas la condition de support
    """
    f, g = square.f, square.g
    f_tilde, g_tilde = square.f_tilde, square.g_tilde
    shrieked = shriek_pushforward_gr(f, sheaf)
    left = inverse_image_gr(g, shrieked)
    pulled = inverse_image_gr(g_tilde, sheaf)
    right = shriek_pushforward_gr(f_tilde, pulled)
    components = {}
    for b in g.source.points:
        blocks = {}
        for lam, layout in left.stalks[b].layouts.items():
            target_layout = right.stalks[b].layout(lam)
            if target_layout is None:
                continue
            columns = layout.part.generators
            family = pushforward_family(f_tilde, b, lam)
            pieces = []
            for z in target_layout.labels:
                a = g_tilde(z)
                inner = pulled.stalks[z].layout(family[z])
                if inner is None:
                    continue
                placed = []
                for mu in layout.labels:
                    sections_layout = shrieked.stalks[g(b)].layout(mu)
                    if sections_layout is None or a not in sections_layout:
                        continue
                    nu = f.pulled_projection(g(b), a).apply(mu)
                    placed.append((nu, matmul(sections_layout.component(a), layout.component(mu))))
                pieces.append((z, assemble(inner, placed, columns)))
            blocks[lam] = assemble(target_layout, pieces, columns)
        components[b] = GradedMap(left.stalks[b], right.stalks[b], blocks)
    return SheafMap(left, right, components)


def certify_base_change(phi: SheafMap, instance: str = "") -> Certificate:
    return isomorphism_certificate("base-change", phi, instance)


def base_change_check(square: CartesianSquare, sheaf: GradedSheaf) -> Certificate:
    """Certifie g⁻¹ ∘ f_! ≅ f̃_! ∘ g̃⁻¹ sur F par le morphisme canonique."""
    instance = f"{square.f.name}, {square.g.name}, {sheaf.name}"
    try:
        phi = base_change_map(square, sheaf)
    except ValueError as error:
        return Certificate("base-change", instance=instance).fail(f"morphisme canonique mal défini : {error}")
    return certify_base_change(phi, instance)


# f⁻¹ et produit tensoriel


def inverse_tensor_map(f: GradedSpaceMap, first: GradedSheaf, second: GradedSheaf) -> SheafMap:
    """f⁻¹F ⊗ f⁻¹G → f⁻¹(F ⊗ G) : F_μ ⊗ G_ν va dans la composante (μ, ν) du degré μ + ν."""
    left_pulled, right_pulled = inverse_image_gr(f, first), inverse_image_gr(f, second)
    source = tensor_sheaf(left_pulled, right_pulled)
    product = tensor_sheaf(first, second)
    target = inverse_image_gr(f, product)
    components = {}
    for x in f.source.points:
        below = product.stalks[f(x)]
        blocks = {}
        for lam, layout in source.stalks[x].layouts.items():
            outer = target.stalks[x].layout(lam)
            if outer is None:
                continue
            pieces = []
            for alpha, beta in layout.labels:
                left_layout = left_pulled.stalks[x].layout(alpha)
                right_layout = right_pulled.stalks[x].layout(beta)
                columns = layout.module_of((alpha, beta)).generators
                placed = []
                for mu in left_layout.labels:
                    for nu in right_layout.labels:
                        kappa = below.grading.add(mu, nu)
                        inner = below.layout(kappa)
                        if inner is None:
                            continue
                        piece = kron(left_layout.component(mu), right_layout.component(nu))
                        placed.append((kappa, assemble(inner, [((mu, nu), piece)], columns)))
                pieces.append(((alpha, beta), assemble(outer, placed, columns)))
            blocks[lam] = gather(layout, pieces, outer.part.generators)
        components[x] = GradedMap(source.stalks[x], target.stalks[x], blocks)
    return SheafMap(source, target, components)


def inverse_tensor_check(f: GradedSpaceMap, first: GradedSheaf, second: GradedSheaf) -> Certificate:
    """Certifie f⁻¹F ⊗ f⁻¹G ≅ f⁻¹(F ⊗ G)."""
    return isomorphism_certificate(
        "inverse-tensor", inverse_tensor_map(f, first, second), f"{f.name}, {first.name}, {second.name}"
    )


# Sections globales d'une image directe


@dataclass(frozen=True, eq=False)
class GlobalSectionsComparison:
    """
    Γ(Y, f_*F) comparé à Γ(X, F).

    Attributes:
        pushed: Γ(Y, f_*F), gradué par Λ(Y)
        direct: Γ(X, F), gradué par Λ(X)
        certificate: Identification degré par degré Γ(Y, f_*F)_μ ≅ Γ(X, F)_{f♭μ}
    """

    pushed: GradedModule
    direct: GradedModule
    certificate: Certificate

    @property
    def totals_differ(self) -> bool:
        """Vrai si les modules non gradués ⊕_μ et ⊕_λ diffèrent."""
        return _total(self.pushed) != _total(self.direct)


def _total(module: GradedModule) -> Tuple[int, Tuple[int, ...]]:
    rank = sum(m.invariants.rank for m in module.parts.values())
    divisors = sorted(d for m in module.parts.values() for d in m.invariants.divisors)
    return rank, tuple(divisors)


def global_sections_remark_witness(f: GradedSpaceMap, sheaf: GradedSheaf) -> GlobalSectionsComparison:
    """
    Γ(Y, f_*F) ne voit que les degrés de la forme f♭(μ) : quand f♭ n'est pas
    surjectif, les deux modules totaux diffèrent.
    """
    pushed_sheaf = pushforward_gr(f, sheaf)
    pushed = global_sections(pushed_sheaf)
    direct = global_sections(sheaf)
    base = f.target.open_grading(f.target.points)
    certificate = Certificate("global-sections", instance=f"{f.name}, {sheaf.name}")
    degrees = base.group.elements() if base.group.is_finite else iter(pushed.parts)
    for mu in degrees:
        family = {x: f.flats[x].apply(base.restrict(mu, f(x))) for x in f.source.points}
        expected, _ = section_module(sheaf, f.source.points, family)
        if not expected.is_isomorphic(pushed.part(mu)):
            certificate.fail(f"degré {list(mu)} : {pushed.part(mu)} au lieu de {expected}")
    return GlobalSectionsComparison(pushed, direct, certificate)
