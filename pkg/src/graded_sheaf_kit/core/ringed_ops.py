"""
Opérations sur les faisceaux de R-modules : ⊗_R, Hom_R, images directe et
réciproque de modules, adjonction f^* ⊣ f_*.

Le produit tensoriel relatif est calculé tige par tige comme quotient de
graded_tensor par les relations e_i·m ⊗ n − m ⊗ e_i·n ; ses dispositions sont
de type QUOTIENT, étiquetées (μ, ν) comme celles du produit tensoriel sur k.
"""

import logging
from typing import Dict, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..algebra.graded import GradedMap, GradedModule, graded_tensor, graded_tensor_map
from ..algebra.grading import Degree, DegreeWindow
from ..algebra.layout import PartLayout, assemble, gather, transport
from ..algebra.linear_system import HomSpace, LinearSystem
from ..algebra.matrices import chain, hstack, identity, kron, matmul, unit_vector, zeros
from ..algebra.modules import Module, ModuleMap
from ..domain.poset import Point
from ..domain.ringed import RingedMap, RModuleSheaf, multiplication_map
from ..domain.sheaf import GradedSheaf, SheafMap
from ..domain.space import GradedSpaceMap
from ..errors import MismatchError
from .adjunction import AdjointPair, certify_adjunction
from .functors import (
    global_shifts,
    hom_candidates,
    inverse_image_gr,
    inverse_image_map,
    natural_system,
    pushforward_family,
    pushforward_gr,
    pushforward_map,
)
from .reports import Certificate, compare_tables, invariant_table

logger = logging.getLogger(__name__)

Actions = Sequence[GradedMap]


# Produit tensoriel relatif


def relative_tensor_stalk(
    left: GradedModule, left_actions: Actions, right: GradedModule, right_actions: Actions
) -> GradedModule:
    """
    M ⊗_R N pour deux modules sur le même anneau gradué (actions indexées par sa base).

    Raises:
        MismatchError: Si les deux familles d'actions n'ont pas la même longueur
    """
    if len(left_actions) != len(right_actions):
        raise MismatchError("Actions de deux anneaux différents")
    product = graded_tensor(left, right)
    grading, ring = product.grading, product.ring
    parts: Dict[Degree, Module] = {}
    layouts: Dict[Degree, PartLayout] = {}
    for lam, layout in product.layouts.items():
        columns = []
        for a, b in zip(left_actions, right_actions):
            shift = a.shift or grading.zero()
            for mu, m in left.parts.items():
                for nu, n in right.parts.items():
                    if grading.add(grading.add(mu, nu), shift) != lam:
                        continue
                    pieces = [
                        ((a.target_degree(mu), nu), kron(a.block(mu), identity(n.generators))),
                        ((mu, b.target_degree(nu)), -kron(identity(m.generators), b.block(nu))),
                    ]
                    columns.append(assemble(layout, pieces, m.generators * n.generators))
        relations = ring.reduce(hstack(columns, layout.part.generators))
        projection = ModuleMap(Module.free(ring, relations.shape[1]), layout.part, relations).cokernel()
        if projection.target.is_zero():
            continue
        parts[lam] = projection.target
        layouts[lam] = PartLayout.quotient(layout.labels, layout.modules, projection)
    return GradedModule(grading, ring, parts, layouts)


def _relative_tensor_sheaf(
    name: str,
    left: GradedSheaf,
    left_actions: Mapping[Point, Actions],
    right: GradedSheaf,
    right_actions: Mapping[Point, Actions],
) -> GradedSheaf:
    space = left.space
    stalks = {
        x: relative_tensor_stalk(left.stalks[x], left_actions[x], right.stalks[x], right_actions[x])
        for x in space.points
    }
    restrictions = {
        (x, y): graded_tensor_map(left.restrictions[(x, y)], right.restrictions[(x, y)], stalks[x], stalks[y])
        for x, y in space.poset.covers
    }
    return GradedSheaf(name, space, left.ring, stalks, restrictions)


def _require_same_ringed(first: RModuleSheaf, second: RModuleSheaf) -> None:
    if first.ringed is not second.ringed and first.ringed.name != second.ringed.name:
        raise MismatchError(f"{first.name} et {second.name} ne sont pas des modules sur le même anneau")


def tensor_over_R(first: RModuleSheaf, second: RModuleSheaf) -> RModuleSheaf:
    """
    F ⊗_R G, muni de l'action de R sur le premier facteur.

    Raises:
        MismatchError: Si F et G vivent sur des espaces annelés différents
    """
    _require_same_ringed(first, second)
    key = ("tensor_R", second.sheaf)
    if key in first.sheaf._cache:
        return first.sheaf._cache[key]  # type: ignore[return-value]
    sheaf = _relative_tensor_sheaf(
        f"{first.name}⊗_R{second.name}", first.sheaf, first.actions, second.sheaf, second.actions
    )
    actions = {
        x: tuple(
            graded_tensor_map(a, GradedMap.identity(second.sheaf.stalks[x]), sheaf.stalks[x], sheaf.stalks[x])
            for a in first.actions[x]
        )
        for x in sheaf.space.points
    }
    result = RModuleSheaf(first.ringed, sheaf, actions)
    first.sheaf._cache[key] = result
    return result


# Hom R-linéaires


def _add_linearity(
    system: LinearSystem,
    source: RModuleSheaf,
    target: RModuleSheaf,
    points: Sequence[Point],
    shifts: Optional[Mapping[Point, Degree]],
) -> None:
    """φ_z(e_i·m) = e_i·φ_z(m) pour chaque z et chaque e_i de R_z."""
    space = source.sheaf.space
    for z in points:
        lambdas = space.lambdas[z]
        for i in range(source.ringed.rings[z].dimension):
            a, b = source.action(z, i), target.action(z, i)
            for mu, module in source.sheaf.stalks[z].parts.items():
                moved = lambdas.add(mu, shifts[z]) if shifts else mu
                image = target.sheaf.stalks[z].part(b.target_degree(moved))
                system.add_equation(
                    image,
                    module.generators,
                    [
                        ((z, a.target_degree(mu)), identity(image.generators), a.block(mu)),
                        ((z, mu), -b.block(moved), identity(module.generators)),
                    ],
                )


def module_hom_space(
    source: RModuleSheaf, target: RModuleSheaf, degree: Optional[Sequence[int]] = None
) -> HomSpace:
    """Hom_R(F, G⟨λ⟩) : transformations naturelles R-linéaires de degré λ."""
    _require_same_ringed(source, target)
    space = source.sheaf.space
    shifts = global_shifts(space, degree)
    key = ("hom_R", target.sheaf, tuple(sorted(shifts.items())) if shifts else ())
    if key not in source.sheaf._cache:
        points = space.poset.sorted_points(space.points)
        system = natural_system(source.sheaf, target.sheaf, points, shifts)
        _add_linearity(system, source, target, points, shifts)
        source.sheaf._cache[key] = system.solve()
    return source.sheaf._cache[key]  # type: ignore[return-value]


def hom_over_R(source: RModuleSheaf, target: RModuleSheaf, window: Optional[DegreeWindow] = None) -> RModuleSheaf:
    """
    Hom_R(F, G) : en x, les transformations R-linéaires sur U_x, avec
    (r·φ)_z = ρ_{xz}(r)·φ_z.

    Raises:
        InfiniteSupport: Si Λ_x est infini sans fenêtre de degrés
    """
    _require_same_ringed(source, target)
    key = ("hom_R_sheaf", target.sheaf, window)
    if key in source.sheaf._cache:
        return source.sheaf._cache[key]  # type: ignore[return-value]
    ringed = source.ringed
    space = source.sheaf.space
    stalks: Dict[Point, GradedModule] = {}
    shifts_at: Dict[Tuple[Point, Degree], Dict[Point, Degree]] = {}
    for x in space.points:
        opened = space.poset.sorted_points(space.poset.up(x))
        parts: Dict[Degree, Module] = {}
        layouts: Dict[Degree, PartLayout] = {}
        for lam in hom_candidates(source.sheaf, target.sheaf, x, window):
            shifts = {z: space.lambda_restriction(x, z).apply(lam) for z in opened}
            system = natural_system(source.sheaf, target.sheaf, opened, shifts)
            _add_linearity(system, source, target, opened, shifts)
            solutions = system.solve()
            if not solutions.module.is_zero():
                parts[lam], layouts[lam] = solutions.module, solutions.layout()
                shifts_at[(x, lam)] = shifts
        stalks[x] = GradedModule(space.lambdas[x], source.sheaf.ring, parts, layouts)

    restrictions = {}
    for x, y in space.poset.covers:
        lres = space.lres[(x, y)]
        smaller = space.poset.up(y)
        blocks = {}
        for lam, layout in stalks[x].layouts.items():
            target_layout = stalks[y].layout(lres.apply(lam))
            if target_layout is None:
                continue
            blocks[lam] = transport(
                layout,
                target_layout,
                (
                    (label, label, identity(layout.module_of(label).generators))
                    for label in layout.labels
                    if label[0] in smaller
                ),
            )
        restrictions[(x, y)] = GradedMap(stalks[x], stalks[y], blocks, lres)
    sheaf = GradedSheaf(f"Hom_R({source.name},{target.name})", space, source.sheaf.ring, stalks, restrictions)

    actions: Dict[Point, Tuple[GradedMap, ...]] = {}
    for x in space.points:
        ring = ringed.rings[x]
        stalk = stalks[x]
        acts = []
        for i, d in enumerate(ring.basis_degrees):
            blocks = {}
            for lam, layout in stalk.layouts.items():
                target_layout = stalk.layout(ring.grading.add(lam, d))
                if target_layout is None:
                    continue
                pieces = []
                for z, mu in layout.labels:
                    element = ringed.ring_restriction(x, z)[:, i]
                    acting = target.act_element(z, element, space.lambda_restriction(x, z).apply(d))
                    moved = space.lambdas[z].add(mu, shifts_at[(x, lam)][z])
                    n = source.sheaf.stalks[z].part(mu).generators
                    pieces.append(((z, mu), (z, mu), kron(identity(n), acting.block(moved))))
                blocks[lam] = transport(layout, target_layout, pieces)
            acts.append(GradedMap(stalk, stalk, blocks, None, d))
        actions[x] = tuple(acts)
    result = RModuleSheaf(ringed, sheaf, actions)
    source.sheaf._cache[key] = result
    return result


# Images directe et réciproque de modules


def module_pushforward(f: RingedMap, module: RModuleSheaf, window: Optional[DegreeWindow] = None) -> RModuleSheaf:
    """
    f_*F comme R_Y-module : (e_i·s)_x = f♯_x(ρ_{y,f(x)} e_i)·s_x.

    Raises:
        InfiniteSupport: Si le support de f_*F est infini sans fenêtre
    """
    key = ("module_push", f, window)
    if key in module.sheaf._cache:
        return module.sheaf._cache[key]  # type: ignore[return-value]
    g = f.space_map
    pushed = pushforward_gr(g, module.sheaf, window)
    base = f.source.base_ring
    actions: Dict[Point, Tuple[GradedMap, ...]] = {}
    for y in g.target.points:
        ring = f.target.rings[y]
        stalk = pushed.stalks[y]
        acts = []
        for i, d in enumerate(ring.basis_degrees):
            blocks = {}
            for mu, layout in stalk.layouts.items():
                target_layout = stalk.layout(ring.grading.add(mu, d))
                if target_layout is None:
                    continue
                family = pushforward_family(g, y, mu)
                pieces = []
                for x in layout.labels:
                    image = base.reduce(matmul(f.sharps[x], f.target.ring_restriction(y, g(x))))[:, i]
                    acting = module.act_element(x, image, g.pulled_projection(y, x).apply(d))
                    pieces.append((x, x, acting.block(family[x])))
                blocks[mu] = transport(layout, target_layout, pieces)
            acts.append(GradedMap(stalk, stalk, blocks, None, d))
        actions[y] = tuple(acts)
    result = RModuleSheaf(f.target, pushed, actions)
    module.sheaf._cache[key] = result
    return result


def pulled_actions(f: GradedSpaceMap, module: RModuleSheaf) -> Dict[Point, Tuple[GradedMap, ...]]:
    """Action de f⁻¹R_Y sur f⁻¹G : e_i agit sur (f⁻¹G)_x avec le décalage f♭_x(deg e_i)."""
    pulled = inverse_image_gr(f, module.sheaf)
    actions = {}
    for x in f.source.points:
        stalk = pulled.stalks[x]
        acts = []
        for a in module.actions[f(x)]:
            shift = f.flats[x].apply(a.shift)
            blocks = {}
            for lam, layout in stalk.layouts.items():
                target_layout = stalk.layout(stalk.grading.add(lam, shift))
                if target_layout is not None:
                    blocks[lam] = transport(
                        layout, target_layout, ((mu, a.target_degree(mu), a.block(mu)) for mu in layout.labels)
                    )
            acts.append(GradedMap(stalk, stalk, blocks, None, shift))
        actions[x] = tuple(acts)
    return actions


def _structure_actions(f: RingedMap) -> Tuple[Dict[Point, Tuple[GradedMap, ...]], Dict[Point, Tuple[GradedMap, ...]]]:
    """
    Sur R_X : multiplications par les e_k de R_X, et par les f♯(e_i) des e_i de R_{Y,f(x)}.
    """
    structure = f.source.structure_sheaf()
    own: Dict[Point, Tuple[GradedMap, ...]] = {}
    through: Dict[Point, Tuple[GradedMap, ...]] = {}
    for x in f.space_map.source.points:
        ring = f.source.rings[x]
        stalk = structure.stalks[x]
        products = [multiplication_map(ring, k) for k in range(ring.dimension)]
        own[x] = tuple(GradedMap(stalk, stalk, p.blocks, None, p.shift) for p in products)
        sharp = f.sharps[x]
        acts = []
        for i, d in enumerate(f.target.rings[f.space_map(x)].basis_degrees):
            shift = f.space_map.flats[x].apply(d)
            blocks = {}
            for beta, part in stalk.parts.items():
                block = zeros(stalk.part(ring.grading.add(beta, shift)).generators, part.generators)
                for k, product in enumerate(products):
                    if sharp[k, i] != 0:
                        block = block + sharp[k, i] * product.block(beta)
                blocks[beta] = block
            acts.append(GradedMap(stalk, stalk, blocks, None, shift))
        through[x] = tuple(acts)
    return own, through


def module_pullback(f: RingedMap, module: RModuleSheaf) -> RModuleSheaf:
    """
    f^*G = f⁻¹G ⊗_{f⁻¹R_Y} R_X, muni de l'action de R_X sur le second facteur.

    Raises:
        MismatchError: Si G n'est pas un module sur l'anneau but de f
    """
    if module.ringed is not f.target and module.ringed.name != f.target.name:
        raise MismatchError(f"{module.name} n'est pas un module sur {f.target.name}")
    key = ("module_pull", f)
    if key in module.sheaf._cache:
        return module.sheaf._cache[key]  # type: ignore[return-value]
    g = f.space_map
    pulled = inverse_image_gr(g, module.sheaf)
    structure = f.source.structure_sheaf()
    own, through = _structure_actions(f)
    sheaf = _relative_tensor_sheaf(f"{g.name}^*{module.name}", pulled, pulled_actions(g, module), structure, through)
    actions = {
        x: tuple(
            graded_tensor_map(GradedMap.identity(pulled.stalks[x]), act, sheaf.stalks[x], sheaf.stalks[x])
            for act in own[x]
        )
        for x in g.source.points
    }
    result = RModuleSheaf(f.source, sheaf, actions)
    module.sheaf._cache[key] = result
    return result


def module_pullback_map(f: RingedMap, psi: SheafMap, source: RModuleSheaf, target: RModuleSheaf) -> SheafMap:
    """f^*ψ = f⁻¹ψ ⊗ id pour ψ : G → G' R_Y-linéaire."""
    first, second = module_pullback(f, source), module_pullback(f, target)
    pulled = inverse_image_map(f.space_map, psi)
    structure = f.source.structure_sheaf()
    components = {}
    for x in f.space_map.source.points:
        identity_part = GradedMap.identity(structure.stalks[x])
        components[x] = graded_tensor_map(
            pulled.components[x], identity_part, first.sheaf.stalks[x], second.sheaf.stalks[x]
        )
    return SheafMap(first.sheaf, second.sheaf, components)


# Unité et coünité de f^* ⊣ f_*


def module_unit(f: RingedMap, module: RModuleSheaf) -> SheafMap:
    """η_G : G → f_* f^* G, g ↦ (x ↦ ρ_{y,f(x)} g ⊗ 1)."""
    g = f.space_map
    pulled_module = module_pullback(f, module)
    pushed = module_pushforward(f, pulled_module).sheaf
    pulled = inverse_image_gr(g, module.sheaf)
    structure = f.source.structure_sheaf()
    components = {}
    for y in g.target.points:
        blocks = {}
        for mu, part in module.sheaf.stalks[y].parts.items():
            layout = pushed.stalks[y].layout(mu)
            if layout is None:
                continue
            columns = part.generators
            family = pushforward_family(g, y, mu)
            pieces = []
            for x in layout.labels:
                restriction = module.sheaf.restriction(y, g(x))
                alpha = family[x]
                inner = pulled.stalks[x].layout(alpha)
                outer = pulled_module.sheaf.stalks[x].layout(alpha)
                if inner is None or outer is None:
                    continue
                placed = assemble(inner, [(restriction.target_degree(mu), restriction.block(mu))], columns)
                zero = structure.stalks[x].grading.zero()
                one = unit_vector(structure.stalks[x].part(zero).generators, 0)
                pieces.append((x, assemble(outer, [((alpha, zero), kron(placed, one))], columns)))
            blocks[mu] = assemble(layout, pieces, columns)
        components[y] = GradedMap(module.sheaf.stalks[y], pushed.stalks[y], blocks)
    return SheafMap(module.sheaf, pushed, components)


def _evaluation(sections: GradedModule, layout: PartLayout, x: Point, rows: int) -> np.ndarray:
    """(f⁻¹f_*F)_α → F_α : composante en x de chaque section."""
    pieces = []
    for mu in layout.labels:
        inner = sections.layout(mu)
        if inner is not None and x in inner:
            pieces.append((mu, inner.component(x)))
    return gather(layout, pieces, rows)


def module_counit(f: RingedMap, module: RModuleSheaf) -> SheafMap:
    """ε_F : f^* f_* F → F, s ⊗ r ↦ r·s_x."""
    g = f.space_map
    pushed = module_pushforward(f, module).sheaf
    source = module_pullback(f, module_pushforward(f, module)).sheaf
    pulled = inverse_image_gr(g, pushed)
    ring_at = f.source.rings
    components = {}
    for x in g.source.points:
        blocks = {}
        for lam, layout in source.stalks[x].layouts.items():
            rows = module.sheaf.stalks[x].part(lam).generators
            pieces = []
            for alpha, beta in layout.labels:
                left = pulled.stalks[x].layout(alpha)
                if left is None:
                    continue
                evaluation = _evaluation(pushed.stalks[g(x)], left, x, module.sheaf.stalks[x].part(alpha).generators)
                size = left.part.generators
                indices = ring_at[x].basis_in_degree(beta)
                total = zeros(rows, size * len(indices))
                for p, k in enumerate(indices):
                    selector = kron(identity(size), unit_vector(len(indices), p).T.copy())
                    total = total + chain(module.action(x, k).block(alpha), evaluation, selector)
                pieces.append(((alpha, beta), total))
            blocks[lam] = gather(layout, pieces, rows)
        components[x] = GradedMap(source.stalks[x], module.sheaf.stalks[x], blocks)
    return SheafMap(source, module.sheaf, components)


def module_adjoint_pair(f: RingedMap) -> AdjointPair:
    """
    f^* ⊣ f_* sur les faisceaux de modules.

    Les modules rencontrés sont mémorisés par faisceau sous-jacent, pour
    retrouver les actions quand f^* est appliqué à un morphisme.
    """
    known: Dict[int, RModuleSheaf] = {}

    def remember(module: RModuleSheaf) -> RModuleSheaf:
        known[id(module.sheaf)] = module
        return module

    def left(module: RModuleSheaf) -> RModuleSheaf:
        remember(module)
        return remember(module_pullback(f, module))

    def right(module: RModuleSheaf) -> RModuleSheaf:
        remember(module)
        return remember(module_pushforward(f, module))

    def left_map(psi: SheafMap) -> SheafMap:
        return module_pullback_map(f, psi, known[id(psi.source)], known[id(psi.target)])

    def unit(module: RModuleSheaf) -> SheafMap:
        right(left(module))
        return module_unit(f, module)

    def counit(module: RModuleSheaf) -> SheafMap:
        left(right(module))
        return module_counit(f, module)

    return AdjointPair(
        name="module-adjunction",
        left=left,
        right=right,
        left_map=left_map,
        right_map=lambda phi: pushforward_map(f.space_map, phi),
        unit=unit,
        counit=counit,
        hom=module_hom_space,
        underlying=lambda module: module.sheaf,
    )


def check_module_adjunction(f: RingedMap, first: RModuleSheaf, second: RModuleSheaf) -> Certificate:
    """
    Certifie f^* ⊣ f_* pour F un R_X-module (first) et G un R_Y-module (second).

    Returns:
        Certificat "module-adjunction"
    """
    return certify_adjunction(module_adjoint_pair(f), second, first)


# Vérifications de cohérence


def action_degree_bookkeeping_check(f: RingedMap, module: RModuleSheaf) -> Certificate:
    """
    Sur f_*F, e_i·m se calcule point par point dans F au degré
    f♭_x ρ(μ) + deg f♯ρ(e_i) = f♭_x ρ(μ + deg e_i), et l'action obtenue est une
    structure de module.
    """
    g = f.space_map
    certificate = Certificate("action-degrees", instance=f"{f.name}, {module.name}")
    pushed = module_pushforward(f, module)
    for problem in pushed.diagnostics():
        certificate.fail(f"{problem.code} {problem.location} : {problem.message}")
    base = f.source.base_ring
    for y in g.target.points:
        ring = f.target.rings[y]
        stalk = pushed.sheaf.stalks[y]
        for i, d in enumerate(ring.basis_degrees):
            acting = pushed.action(y, i)
            for mu, layout in stalk.layouts.items():
                lam = ring.grading.add(mu, d)
                target_layout = stalk.layout(lam)
                if target_layout is None:
                    continue
                before, after = pushforward_family(g, y, mu), pushforward_family(g, y, lam)
                for x in layout.labels:
                    image = base.reduce(matmul(f.sharps[x], f.target.ring_restriction(y, g(x))))[:, i]
                    if all(base.is_zero(v) for v in image):
                        continue
                    local = module.sheaf.stalks[x].grading
                    moved = local.add(before[x], g.pulled_projection(y, x).apply(d))
                    if moved != after[x]:
                        certificate.fail(f"en {y}, e{i}, point {x} : {list(moved)} ≠ {list(after[x])}")
                        continue
                    if x not in target_layout:
                        continue
                    direct = matmul(
                        module.act_element(x, image, g.pulled_projection(y, x).apply(d)).block(before[x]),
                        layout.component(x),
                    )
                    computed = matmul(target_layout.component(x), acting.block(mu))
                    if not base.matrices_equal(direct, computed):
                        certificate.fail(f"en {y}, e{i}, degré {list(mu)} : composante {x} incorrecte")
    return certificate


def module_inverse_tensor_check(f: GradedSpaceMap, first: RModuleSheaf, second: RModuleSheaf) -> Certificate:
    """f⁻¹F ⊗_{f⁻¹R} f⁻¹G et f⁻¹(F ⊗_R G) ont les mêmes tables d'invariants."""
    left = _relative_tensor_sheaf(
        f"{f.name}⁻¹{first.name}⊗{f.name}⁻¹{second.name}",
        inverse_image_gr(f, first.sheaf),
        pulled_actions(f, first),
        inverse_image_gr(f, second.sheaf),
        pulled_actions(f, second),
    )
    right = inverse_image_gr(f, tensor_over_R(first, second).sheaf)
    return compare_tables(
        "inverse-tensor-ringed",
        invariant_table(left),
        invariant_table(right),
        f"{f.name}, {first.name}, {second.name}",
    )

