"""
Format texte des descriptions (.gsk).

Un fichier est une suite d'enregistrements d'une ligne ; un en-tête ouvre un
bloc que les lignes suivantes complètent jusqu'au prochain en-tête :

    space LINE3                    # en-tête d'espace
    point a
    cover a c                      # a < c
    lambda c Z/3
    lres a c [[1]]

    sheaf F on LINE3 over F2
    stalkmod c [1] k^2
    stalkpres a [0] 2 [[2],[0]]    # générateurs puis matrice des relations
    res a c [0] [[1,0]]

    map j U LINE3
    send u c [[1]]

    ringed A on LINE3 over F2
    ring a [[0],[1]] [[[1,0],[0,1]],[[0,1],[0,0]]]
    rres a c [[1,0],[0,1]]

    module M on A sheaf F
    act a 1 [0] [[0,0],[1,0]]

    complex C on LINE3 over F2
    term 0 F
    diff 0 a [0] [[1]]

Les degrés et matrices sont des listes YAML en style flux ; une matrice vide
s'écrit []. Les références (espace d'un faisceau, faisceau d'un complexe…)
doivent désigner un objet déclaré plus haut.
"""

from dataclasses import dataclass, field
from fractions import Fraction
import logging
from pathlib import Path
import re
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import yaml

from ..algebra.base_ring import BaseRing
from ..algebra.graded import GradedMap, GradedModule
from ..algebra.grading import Degree, GradingGroup, GroupHom, format_degree
from ..algebra.matrices import identity, is_zero, to_lists, zeros
from ..algebra.modules import Module
from ..algebra.rings import GradedRingData
from ..domain.complexes import ComplexOfSheaves
from ..domain.diagnostics import Diagnostic, has_errors
from ..domain.poset import FinitePoset, Point, order_diagnostics
from ..domain.ringed import RingedGradedSpace, RModuleSheaf
from ..domain.sheaf import GradedSheaf, SheafMap
from ..domain.space import GradedSpace, GradedSpaceMap, validate_space
from ..errors import DescriptionError

logger = logging.getLogger(__name__)

HEADERS = ("space", "sheaf", "map", "ringed", "module", "complex")

# Nombre de jetons attendus après le mot-clé, par bloc
RECORDS: Dict[str, Dict[str, int]] = {
    "space": {"point": 1, "cover": 2, "lambda": 2, "lres": 3},
    "sheaf": {"stalkmod": 2, "stalkpres": 4, "res": 4},
    "map": {"send": 3},
    "ringed": {"ring": 3, "rres": 3},
    "module": {"act": 4},
    "complex": {"term": 2, "diff": 4},
}


@dataclass
class Workspace:
    """
    Objets nommés chargés depuis des fichiers de description.

    Attributes:
        spaces: Espaces gradués
        sheaves: Faisceaux gradués
        maps: Morphismes d'espaces gradués
        ringed: Espaces annelés
        modules: Faisceaux de modules sur un espace annelé
        complexes: Complexes de faisceaux
        diagnostics: Défauts structurels relevés au chargement
    """

    spaces: Dict[str, GradedSpace] = field(default_factory=dict)
    sheaves: Dict[str, GradedSheaf] = field(default_factory=dict)
    maps: Dict[str, GradedSpaceMap] = field(default_factory=dict)
    ringed: Dict[str, RingedGradedSpace] = field(default_factory=dict)
    modules: Dict[str, RModuleSheaf] = field(default_factory=dict)
    complexes: Dict[str, ComplexOfSheaves] = field(default_factory=dict)
    diagnostics: List[Diagnostic] = field(default_factory=list)

    @property
    def is_clean(self) -> bool:
        return not has_errors(self.diagnostics)

    def names(self) -> List[str]:
        return [
            *self.spaces,
            *self.sheaves,
            *self.maps,
            *self.ringed,
            *self.modules,
            *self.complexes,
        ]

    def lookup(self, name: str) -> Any:
        """
        Objet de ce nom, quelle que soit sa catégorie.

        Raises:
            KeyError: Si le nom est inconnu
        """
        for table in (self.sheaves, self.complexes, self.modules, self.maps, self.ringed, self.spaces):
            if name in table:
                return table[name]
        raise KeyError(f"Objet inconnu : {name} (connus : {', '.join(self.names())})")

    def merge(self, other: "Workspace") -> "Workspace":
        for table, extra in (
            (self.spaces, other.spaces),
            (self.sheaves, other.sheaves),
            (self.maps, other.maps),
            (self.ringed, other.ringed),
            (self.modules, other.modules),
            (self.complexes, other.complexes),
        ):
            table.update(extra)
        self.diagnostics.extend(other.diagnostics)
        return self


# Lecture des jetons


def tokenize(line: str) -> List[str]:
    """Découpe une ligne en jetons ; les listes entre crochets restent entières."""
    tokens: List[str] = []
    current: List[str] = []
    depth = 0
    for char in line:
        if char == "#" and depth == 0:
            break
        if char == "[":
            depth += 1
        elif char == "]":
            depth -= 1
            if depth < 0:
                raise ValueError("crochet fermant sans ouvrant")
        if char.isspace() and depth == 0:
            if current:
                tokens.append("".join(current))
                current = []
            continue
        current.append(char)
    if depth:
        raise ValueError("crochet non refermé")
    if current:
        tokens.append("".join(current))
    return tokens


def _entry(value: Any) -> Union[int, Fraction]:
    if isinstance(value, bool):
        raise ValueError(f"coefficient invalide : {value}")
    if isinstance(value, int):
        return value
    if isinstance(value, str) and re.fullmatch(r"-?\d+/\d+", value.strip()):
        return Fraction(value.strip())
    raise ValueError(f"coefficient invalide : {value}")


def parse_matrix(text: str, shape: Optional[Tuple[int, int]] = None) -> np.ndarray:
    """
    Lit une matrice [[…],[…]] (lignes) ; [] désigne la matrice vide de la forme attendue.

    Raises:
        ValueError: Si le texte n'est pas une liste de lignes de même longueur
    """
    rows = yaml.safe_load(text)
    if not isinstance(rows, list) or any(not isinstance(r, list) for r in rows):
        raise ValueError(f"matrice illisible : {text}")
    if not rows or all(not r for r in rows):
        if shape is not None and 0 not in shape:
            raise ValueError(f"matrice vide au lieu de {shape[0]}×{shape[1]}")
        return zeros(*(shape or (len(rows), 0)))
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise ValueError(f"lignes de longueurs différentes : {text}")
    matrix = np.array([[_entry(v) for v in row] for row in rows], dtype=object)
    if shape is not None and matrix.shape != shape:
        raise ValueError(f"matrice {matrix.shape[0]}×{matrix.shape[1]} au lieu de {shape[0]}×{shape[1]}")
    return matrix


def parse_degree(text: str) -> Degree:
    values = yaml.safe_load(text)
    if isinstance(values, int) and not isinstance(values, bool):
        return (values,)
    if not isinstance(values, list) or any(not isinstance(v, int) or isinstance(v, bool) for v in values):
        raise ValueError(f"degré illisible : {text}")
    return tuple(values)


def format_matrix(matrix: np.ndarray) -> str:
    rows = to_lists(matrix)
    return "[" + ",".join("[" + ",".join(_format_entry(v) for v in row) + "]" for row in rows) + "]"


def _format_entry(value: Any) -> str:
    if isinstance(value, Fraction) and value.denominator != 1:
        return f"'{value.numerator}/{value.denominator}'"
    return str(int(value))


def format_module(module: Module) -> str:
    return str(module.invariants).replace(" ", "")


# Blocs en cours de lecture


@dataclass
class _Block:
    kind: str
    name: str
    line: int
    header: List[str]
    records: List[Tuple[int, str, List[str]]] = field(default_factory=list)


class DescriptionParser:
    """
    Lecteur de fichiers de description vers un Workspace.

    Les erreurs de syntaxe et de référence lèvent DescriptionError avec le
    numéro de ligne ; les défauts structurels (ordre, fonctorialité, degrés
    incompatibles) sont relevés comme diagnostics.
    """

    def __init__(self, workspace: Optional[Workspace] = None, source: str = ""):
        self.workspace = workspace or Workspace()
        self.source = source
        self._invalid: Dict[str, str] = {}

    def error(self, message: str, line: Optional[int]) -> DescriptionError:
        return DescriptionError(message, line, self.source)

    def diagnose(self, code: str, location: str, message: str) -> None:
        self.workspace.diagnostics.append(Diagnostic(code, location, message))

    # Lecture

    def parse(self, text: str) -> Workspace:
        """
        Raises:
            DescriptionError: Pour une ligne illisible ou une référence inconnue
        """
        blocks: List[_Block] = []
        for number, raw in enumerate(text.splitlines(), start=1):
            try:
                tokens = tokenize(raw)
            except ValueError as error:
                raise self.error(str(error), number) from error
            if not tokens:
                continue
            keyword = tokens[0]
            if keyword in HEADERS:
                if len(tokens) < 2:
                    raise self.error(f"en-tête {keyword} sans nom", number)
                blocks.append(_Block(keyword, tokens[1], number, tokens[2:]))
                continue
            if not blocks:
                raise self.error(f"enregistrement {keyword} hors de tout bloc", number)
            block = blocks[-1]
            arity = RECORDS[block.kind].get(keyword)
            if arity is None:
                raise self.error(f"enregistrement {keyword} inconnu dans un bloc {block.kind}", number)
            if keyword not in ("stalkmod",) and len(tokens) - 1 != arity:
                raise self.error(f"{keyword} attend {arity} arguments, {len(tokens) - 1} donnés", number)
            if keyword == "stalkmod":
                if len(tokens) < 4:
                    raise self.error("stalkmod attend un point, un degré et un module", number)
                tokens = tokens[:3] + ["".join(tokens[3:])]
            block.records.append((number, keyword, tokens[1:]))
        for block in blocks:
            self._build(block)
        logger.debug("%s blocs lus depuis %s", len(blocks), self.source or "<texte>")
        return self.workspace

    def _build(self, block: _Block) -> None:
        if block.name in self.workspace.names() or block.name in self._invalid:
            raise self.error(f"nom déjà utilisé : {block.name}", block.line)
        builder = getattr(self, f"_build_{block.kind}")
        try:
            builder(block)
        except DescriptionError:
            raise
        except ValueError as error:
            self._invalid[block.name] = str(error)
            self.diagnose("CONSTRUCTION", f"{block.kind} {block.name}", str(error))

    def _require(self, table: Dict[str, Any], name: str, kind: str, block: _Block) -> Optional[Any]:
        """Objet référencé, ou None s'il est invalide (le bloc est alors ignoré)."""
        if name in table:
            return table[name]
        if name in self._invalid:
            self._invalid[block.name] = f"dépend de {name}"
            self.diagnose("INVALID_DEPENDENCY", f"{block.kind} {block.name}", f"{kind} {name} invalide")
            return None
        raise self.error(f"{kind} inconnu : {name}", block.line)

    def _header(self, block: _Block, words: Sequence[str]) -> List[str]:
        """Arguments de l'en-tête de la forme `<nom> mot1 x mot2 y`."""
        values = []
        for i, word in enumerate(words):
            if len(block.header) < 2 * i + 2 or block.header[2 * i] != word:
                expected = " ".join(f"{w} <…>" for w in words)
                raise self.error(f"en-tête attendu : {block.kind} {block.name} {expected}", block.line)
            values.append(block.header[2 * i + 1])
        return values

    def _ring(self, label: str, line: int) -> BaseRing:
        try:
            return BaseRing.parse(label)
        except ValueError as error:
            raise self.error(str(error), line) from error

    def _degree(self, text: str, group: GradingGroup, line: int) -> Degree:
        try:
            return group.normalize(parse_degree(text))
        except ValueError as error:
            raise self.error(str(error), line) from error

    def _matrix(self, text: str, line: int, shape: Optional[Tuple[int, int]] = None) -> np.ndarray:
        try:
            return parse_matrix(text, shape)
        except (ValueError, yaml.YAMLError) as error:
            raise self.error(str(error), line) from error

    # Espaces

    def _build_space(self, block: _Block) -> None:
        points: List[Point] = []
        covers: List[Tuple[Point, Point]] = []
        groups: Dict[Point, GradingGroup] = {}
        lres_text: Dict[Tuple[Point, Point], Tuple[int, str]] = {}
        for line, keyword, args in block.records:
            if keyword == "point":
                points.append(args[0])
            elif keyword == "cover":
                covers.append((args[0], args[1]))
            elif keyword == "lambda":
                try:
                    groups[args[0]] = GradingGroup.parse(args[1])
                except ValueError as error:
                    raise self.error(str(error), line) from error
            else:
                lres_text[(args[0], args[1])] = (line, args[2])
        problems = order_diagnostics(points, covers)
        for problem in problems:
            self.workspace.diagnostics.append(
                Diagnostic(problem.code, f"{block.name}: {problem.location}", problem.message, problem.severity)
            )
        if has_errors(problems):
            self._invalid[block.name] = "ordre invalide"
            return
        poset = FinitePoset(tuple(points), tuple(covers))
        unknown = sorted(set(groups) - set(points))
        if unknown:
            raise self.error(f"lambda en des points inconnus : {unknown}", block.line)
        lambdas = {p: groups.get(p, GradingGroup.trivial()) for p in points}
        lres: Dict[Tuple[Point, Point], GroupHom] = {}
        for pair, (line, text) in lres_text.items():
            if pair not in poset.covers:
                location = f"{block.name}: {pair[0]} < {pair[1]}"
                self.diagnose("NOT_A_COVER", location, "restriction de Λ hors des couvertures")
                continue
            low, high = lambdas[pair[0]], lambdas[pair[1]]
            matrix = self._matrix(text, line)
            try:
                lres[pair] = GroupHom(low, high, matrix)
            except ValueError as error:
                self.diagnose("BAD_LAMBDA_RESTRICTION", f"{block.name}: {pair[0]} < {pair[1]}", str(error))
        for pair in poset.covers:
            if pair in lres or pair in lres_text:
                continue
            low, high = lambdas[pair[0]], lambdas[pair[1]]
            if low == high:
                lres[pair] = GroupHom.identity(low)
            elif not low.rank or not high.rank:
                lres[pair] = GroupHom.zero(low, high)
            else:
                self.diagnose("MISSING_LAMBDA_RESTRICTION", f"{block.name}: {pair[0]} < {pair[1]}", f"{low} → {high}")
        if len(lres) != len(poset.covers):
            self._invalid[block.name] = "restrictions de Λ invalides"
            return
        space = GradedSpace(block.name, poset, lambdas, lres)
        self.workspace.diagnostics.extend(d for d in validate_space(space) if d.code != "REDUNDANT_COVER")
        self.workspace.spaces[block.name] = space

    # Faisceaux

    def _build_sheaf(self, block: _Block) -> None:
        space_name, ring_label = self._header(block, ("on", "over"))
        space = self._require(self.workspace.spaces, space_name, "espace", block)
        if space is None:
            return
        ring = self._ring(ring_label, block.line)
        parts: Dict[Point, Dict[Degree, Module]] = {x: {} for x in space.points}
        blocks: Dict[Tuple[Point, Point], Dict[Degree, np.ndarray]] = {}
        pending = []
        mismatched = False
        for line, keyword, args in block.records:
            x = args[0]
            if x not in space.poset:
                raise self.error(f"point inconnu de {space.name} : {x}", line)
            if keyword == "res":
                pending.append((line, args))
                continue
            degree = self._degree(args[1], space.lambdas[x], line)
            if keyword == "stalkmod":
                try:
                    parts[x][degree] = Module.parse(args[2], ring)
                except ValueError as error:
                    raise self.error(str(error), line) from error
            else:
                if not args[2].isdigit():
                    raise self.error(f"nombre de générateurs invalide : {args[2]}", line)
                generators = int(args[2])
                relations = self._matrix(args[3], line)
                if relations.size == 0:
                    relations = zeros(generators, 0)
                elif relations.shape[0] != generators:
                    raise self.error(f"relations de {relations.shape[0]} lignes pour {generators} générateurs", line)
                parts[x][degree] = Module(ring, generators, relations)
        stalks = {x: GradedModule(space.lambdas[x], ring, p) for x, p in parts.items()}
        for line, args in pending:
            low, high = args[0], args[1]
            if high not in space.poset:
                raise self.error(f"point inconnu de {space.name} : {high}", line)
            location = f"{block.name}: {low} → {high}"
            if (low, high) not in space.poset.covers:
                self.diagnose("NOT_A_COVER", location, "restriction hors des couvertures")
                continue
            degree = self._degree(args[2], space.lambdas[low], line)
            image = space.lres[(low, high)].apply(degree)
            source_part = stalks[low].part(degree)
            target_part = stalks[high].part(image)
            matrix = self._matrix(args[3], line)
            expected = (target_part.generators, source_part.generators)
            if matrix.size == 0 and 0 in expected:
                continue
            if matrix.shape != expected:
                mismatched = True
                self.diagnose(
                    "DEGREE_MISMATCH",
                    f"{location}, degré {format_degree(degree)}",
                    f"bloc {matrix.shape[0]}×{matrix.shape[1]} vers le degré {format_degree(image)}, "
                    f"attendu {expected[0]}×{expected[1]}",
                )
                continue
            blocks.setdefault((low, high), {})[degree] = matrix
        if mismatched:
            self._invalid[block.name] = "blocs de restriction incompatibles"
            return
        restrictions = {
            pair: GradedMap(stalks[pair[0]], stalks[pair[1]], matrices, space.lres[pair])
            for pair, matrices in blocks.items()
        }
        sheaf = GradedSheaf(block.name, space, ring, stalks, restrictions)
        self.workspace.diagnostics.extend(sheaf.diagnostics())
        self.workspace.sheaves[block.name] = sheaf

    # Morphismes

    def _build_map(self, block: _Block) -> None:
        if len(block.header) != 2:
            raise self.error(f"en-tête attendu : map {block.name} <source> <cible>", block.line)
        source = self._require(self.workspace.spaces, block.header[0], "espace", block)
        target = self._require(self.workspace.spaces, block.header[1], "espace", block)
        if source is None or target is None:
            return
        images: Dict[Point, Point] = {}
        flats: Dict[Point, GroupHom] = {}
        for line, _, args in block.records:
            x, y = args[0], args[1]
            if x not in source.poset or y not in target.poset:
                raise self.error(f"send {x} {y} : point inconnu", line)
            images[x] = y
            flats[x] = GroupHom(target.lambdas[y], source.lambdas[x], self._matrix(args[2], line))
        f = GradedSpaceMap(block.name, source, target, images, flats)
        self.workspace.diagnostics.extend(f.diagnostics())
        self.workspace.maps[block.name] = f

    # Structures annelées

    def _build_ringed(self, block: _Block) -> None:
        space_name, ring_label = self._header(block, ("on", "over"))
        space = self._require(self.workspace.spaces, space_name, "espace", block)
        if space is None:
            return
        base = self._ring(ring_label, block.line)
        rings = {x: GradedRingData.base(base, space.lambdas[x]) for x in space.points}
        restrictions: Dict[Tuple[Point, Point], np.ndarray] = {}
        for line, keyword, args in block.records:
            if keyword == "ring":
                x = args[0]
                if x not in space.poset:
                    raise self.error(f"point inconnu de {space.name} : {x}", line)
                degrees = yaml.safe_load(args[1])
                structure = yaml.safe_load(args[2])
                if not isinstance(degrees, list) or not isinstance(structure, list):
                    raise self.error("table des degrés ou des constantes de structure illisible", line)
                try:
                    basis = tuple(parse_degree(str(d)) for d in degrees)
                    values = np.array(structure, dtype=object)
                except ValueError as error:
                    raise self.error(str(error), line) from error
                rings[x] = GradedRingData(base, space.lambdas[x], basis, values)
            else:
                restrictions[(args[0], args[1])] = self._matrix(args[2], line)
        for pair in space.poset.covers:
            if pair not in restrictions and rings[pair[0]].dimension == rings[pair[1]].dimension == 1:
                restrictions[pair] = identity(1)
        ringed = RingedGradedSpace(block.name, space, rings, restrictions)
        self.workspace.diagnostics.extend(ringed.diagnostics())
        self.workspace.ringed[block.name] = ringed

    def _build_module(self, block: _Block) -> None:
        ringed_name, sheaf_name = self._header(block, ("on", "sheaf"))
        ringed = self._require(self.workspace.ringed, ringed_name, "espace annelé", block)
        sheaf = self._require(self.workspace.sheaves, sheaf_name, "faisceau", block)
        if ringed is None or sheaf is None:
            return
        given: Dict[Tuple[Point, int], Dict[Degree, np.ndarray]] = {}
        for line, _, args in block.records:
            x = args[0]
            if x not in sheaf.space.poset or not args[1].isdigit():
                raise self.error(f"act {args[0]} {args[1]} : point ou indice invalide", line)
            degree = self._degree(args[2], sheaf.space.lambdas[x], line)
            given.setdefault((x, int(args[1])), {})[degree] = self._matrix(args[3], line)
        actions = {}
        for x in sheaf.space.points:
            ring = ringed.rings[x]
            stalk = sheaf.stalks[x]
            maps = []
            for index in range(ring.dimension):
                shift = ring.basis_degrees[index]
                if (x, index) in given:
                    maps.append(GradedMap(stalk, stalk, given[(x, index)], None, shift))
                elif index == 0:
                    maps.append(GradedMap.identity(stalk))
                else:
                    maps.append(GradedMap.zero(stalk, stalk, None, shift))
            actions[x] = tuple(maps)
        module = RModuleSheaf(ringed, sheaf, actions)
        self.workspace.diagnostics.extend(module.diagnostics())
        self.workspace.modules[block.name] = module

    # Complexes

    def _build_complex(self, block: _Block) -> None:
        space_name, ring_label = self._header(block, ("on", "over"))
        space = self._require(self.workspace.spaces, space_name, "espace", block)
        if space is None:
            return
        ring = self._ring(ring_label, block.line)
        terms: Dict[int, GradedSheaf] = {}
        pending = []
        for line, keyword, args in block.records:
            if not re.fullmatch(r"-?\d+", args[0]):
                raise self.error(f"indice de complexe invalide : {args[0]}", line)
            n = int(args[0])
            if keyword == "term":
                sheaf = self._require(self.workspace.sheaves, args[1], "faisceau", block)
                if sheaf is None:
                    return
                if sheaf.space is not space:
                    raise self.error(f"{sheaf.name} n'est pas sur {space.name}", line)
                terms[n] = sheaf
            else:
                pending.append((line, n, args))
        components: Dict[int, Dict[Point, Dict[Degree, np.ndarray]]] = {}
        for line, n, args in pending:
            if n not in terms or n + 1 not in terms:
                raise self.error(f"différentielle d^{n} sans ses termes", line)
            x = args[1]
            if x not in space.poset:
                raise self.error(f"point inconnu de {space.name} : {x}", line)
            degree = self._degree(args[2], space.lambdas[x], line)
            components.setdefault(n, {}).setdefault(x, {})[degree] = self._matrix(args[3], line)
        differentials = {}
        for n, per_point in components.items():
            source, target = terms[n], terms[n + 1]
            maps = {
                x: GradedMap(source.stalks[x], target.stalks[x], per_point.get(x, {}))
                for x in space.points
            }
            differentials[n] = SheafMap(source, target, maps)
        complex_ = ComplexOfSheaves(block.name, space, ring, terms, differentials)
        self.workspace.diagnostics.extend(complex_.diagnostics())
        self.workspace.complexes[block.name] = complex_


def parse_text(text: str, source: str = "", workspace: Optional[Workspace] = None) -> Workspace:
    """
    Raises:
        DescriptionError: Pour une erreur de syntaxe ou de référence
    """
    return DescriptionParser(workspace, source).parse(text)


def load_workspace(paths: Iterable[Union[str, Path]]) -> Workspace:
    """Charge plusieurs fichiers dans un même Workspace, dans l'ordre donné."""
    workspace = Workspace()
    for path in paths:
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as error:
            raise DescriptionError(f"lecture impossible : {error.strerror}", None, str(path)) from error
        parse_text(text, str(path), workspace)
        logger.info("Description %s chargée", path)
    return workspace


# Écriture


def _is_canonical(module: Module) -> bool:
    candidate = Module.from_invariants(module.ring, module.invariants)
    if candidate.generators != module.generators or candidate.relations.shape != module.relations.shape:
        return False
    return bool(np.array_equal(candidate.relations, module.relations))


def _space_lines(space: GradedSpace) -> List[str]:
    lines = [f"space {space.name}"]
    lines.extend(f"point {p}" for p in space.points)
    lines.extend(f"cover {lo} {hi}" for lo, hi in space.poset.covers)
    lines.extend(f"lambda {p} {space.lambdas[p].label}" for p in space.points if space.lambdas[p].rank)
    for (lo, hi), hom in space.lres.items():
        if hom.matrix.size:
            lines.append(f"lres {lo} {hi} {format_matrix(hom.matrix)}")
    return lines


def _sheaf_lines(sheaf: GradedSheaf) -> List[str]:
    lines = [f"sheaf {sheaf.name} on {sheaf.space.name} over {sheaf.ring.label}"]
    for x in sheaf.space.points:
        for degree, module in sorted(sheaf.stalks[x].parts.items()):
            if _is_canonical(module):
                lines.append(f"stalkmod {x} {format_degree(degree)} {format_module(module)}")
            else:
                lines.append(
                    f"stalkpres {x} {format_degree(degree)} {module.generators} {format_matrix(module.relations)}"
                )
    for (lo, hi), restriction in sheaf.restrictions.items():
        for degree, matrix in sorted(restriction.blocks.items()):
            if matrix.size and not is_zero(matrix):
                lines.append(f"res {lo} {hi} {format_degree(degree)} {format_matrix(matrix)}")
    return lines


def _map_lines(f: GradedSpaceMap) -> List[str]:
    lines = [f"map {f.name} {f.source.name} {f.target.name}"]
    for x in f.source.points:
        lines.append(f"send {x} {f(x)} {format_matrix(f.flats[x].matrix)}")
    return lines


def _ringed_lines(ringed: RingedGradedSpace) -> List[str]:
    lines = [f"ringed {ringed.name} on {ringed.space.name} over {ringed.base_ring.label}"]
    for x, ring in ringed.rings.items():
        if ring.dimension == 1:
            continue
        degrees = "[" + ",".join(format_degree(d) for d in ring.basis_degrees) + "]"
        structure = "[" + ",".join(format_matrix(ring.structure[i]) for i in range(ring.dimension)) + "]"
        lines.append(f"ring {x} {degrees} {structure}")
    for (lo, hi), matrix in ringed.restrictions.items():
        if matrix.shape != (1, 1):
            lines.append(f"rres {lo} {hi} {format_matrix(matrix)}")
    return lines


def _module_lines(name: str, module: RModuleSheaf) -> List[str]:
    lines = [f"module {name} on {module.ringed.name} sheaf {module.sheaf.name}"]
    for x, actions in module.actions.items():
        for index, action in enumerate(actions[1:], start=1):
            for degree, matrix in sorted(action.blocks.items()):
                if matrix.size and not is_zero(matrix):
                    lines.append(f"act {x} {index} {format_degree(degree)} {format_matrix(matrix)}")
    return lines


def _complex_lines(complex_: ComplexOfSheaves) -> List[str]:
    lines = [f"complex {complex_.name} on {complex_.space.name} over {complex_.ring.label}"]
    lines.extend(f"term {n} {term.name}" for n, term in complex_.terms.items())
    for n, d in complex_.differentials.items():
        for x in complex_.space.points:
            for degree, matrix in sorted(d.component(x).blocks.items()):
                if matrix.size and not is_zero(matrix):
                    lines.append(f"diff {n} {x} {format_degree(degree)} {format_matrix(matrix)}")
    return lines


def serialize(workspace: Workspace) -> str:
    """Texte relu par parse_text en un Workspace équivalent."""
    sections: List[List[str]] = []
    sections.extend(_space_lines(s) for s in workspace.spaces.values())
    sections.extend(_sheaf_lines(s) for s in workspace.sheaves.values())
    sections.extend(_map_lines(f) for f in workspace.maps.values())
    sections.extend(_ringed_lines(r) for r in workspace.ringed.values())
    sections.extend(_module_lines(name, m) for name, m in workspace.modules.items())
    sections.extend(_complex_lines(c) for c in workspace.complexes.values())
    return "\n\n".join("\n".join(lines) for lines in sections) + "\n"


def dump_workspace(workspace: Workspace, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_text(serialize(workspace), encoding="utf-8")
    logger.info("Description écrite dans %s", path)
    return path


def workspace_signature(workspace: Workspace) -> Dict[str, Any]:
    """Résumé comparable d'un Workspace : invariants des tiges et blocs non nuls par objet."""
    signature: Dict[str, Any] = {}
    for name, space in workspace.spaces.items():
        signature[f"space:{name}"] = (
            space.points,
            tuple(space.poset.covers),
            tuple(space.lambdas[p].label for p in space.points),
            tuple((pair, tuple(map(tuple, to_lists(hom.matrix)))) for pair, hom in sorted(space.lres.items())),
        )
    for name, sheaf in workspace.sheaves.items():
        stalks = tuple(
            (x, d, m.generators, tuple(map(tuple, to_lists(m.relations))))
            for x in sheaf.space.points
            for d, m in sorted(sheaf.stalks[x].parts.items())
        )
        blocks = tuple(
            (pair, d, tuple(map(tuple, to_lists(matrix))))
            for pair, restriction in sorted(sheaf.restrictions.items())
            for d, matrix in sorted(restriction.blocks.items())
            if not is_zero(matrix)
        )
        signature[f"sheaf:{name}"] = (sheaf.space.name, sheaf.ring.label, stalks, blocks)
    for name, f in workspace.maps.items():
        signature[f"map:{name}"] = tuple(
            (x, f(x), tuple(map(tuple, to_lists(f.flats[x].matrix)))) for x in f.source.points
        )
    for name, ringed in workspace.ringed.items():
        signature[f"ringed:{name}"] = tuple(
            (x, r.basis_degrees, tuple(map(tuple, to_lists(r.structure.reshape(r.dimension, -1)))))
            for x, r in ringed.rings.items()
        )
    for name, module in workspace.modules.items():
        signature[f"module:{name}"] = tuple(
            (x, i, d, tuple(map(tuple, to_lists(matrix))))
            for x, actions in module.actions.items()
            for i, action in enumerate(actions)
            for d, matrix in sorted(action.blocks.items())
            if not is_zero(matrix)
        )
    for name, complex_ in workspace.complexes.items():
        signature[f"complex:{name}"] = (
            tuple((n, t.name) for n, t in complex_.terms.items()),
            tuple(
                (n, x, d, tuple(map(tuple, to_lists(matrix))))
                for n, diff in complex_.differentials.items()
                for x in complex_.space.points
                for d, matrix in sorted(diff.component(x).blocks.items())
                if not is_zero(matrix)
            ),
        )
    return signature
