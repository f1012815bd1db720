"""
Interface en ligne de commande de graded-sheaf-kit.

    graded-sheaf validate -f line3 -f fixtures/sierpinski.gsk
    graded-sheaf compute pushforward j F -f line3 --degree-window -2..3
    graded-sheaf compute cohomology k -f pseudo_circle
    graded-sheaf check all --seed 1 --count 25
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

from . import __version__
from .algebra.grading import DegreeWindow
from .core.derived import cohomology_table
from .core.duality import DualityConfig, global_cohomology, upper_shriek, verdier_dual
from .core.functors import pushforward_gr, shriek_pushforward_gr
from .core.reports import invariant_table
from .core.sections import global_sections, sections
from .core.suites import SUITES, SuiteRunner
from .domain.complexes import ComplexOfSheaves
from .domain.sheaf import GradedSheaf
from .domain.space import GradedSpaceMap
from .errors import DescriptionError, GradedSheafError
from .io.config import KitSettings, load_settings
from .io.export import Report, cohomology_modules_table, module_table, reports_json
from .io.text_format import Workspace, load_workspace

logger = logging.getLogger(__name__)

FIXTURES_PATH = Path(__file__).parent / "fixtures"

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

COMPUTE_KINDS = ("sections", "stalk", "cohomology", "pushforward", "shriek", "dual", "upper-shriek")


class UsageError(Exception):
    """Arguments incohérents avec le Workspace chargé."""


def resolve_file(name: str) -> Path:
    """Chemin donné, ou fixture livrée de ce nom (avec ou sans .gsk)."""
    path = Path(name)
    if path.exists():
        return path
    for candidate in (FIXTURES_PATH / name, FIXTURES_PATH / f"{name}.gsk"):
        if candidate.exists():
            return candidate
    raise DescriptionError("fichier introuvable", None, name)


def parse_window(text: Optional[str]) -> Optional[DegreeWindow]:
    if text is None:
        return None
    try:
        return DegreeWindow.parse(text)
    except ValueError as error:
        raise argparse.ArgumentTypeError(str(error)) from error


def emit(reports: Sequence[Report], as_json: bool) -> None:
    if as_json:
        if len(reports) == 1:
            print(reports[0].to_json())
        else:
            print(reports_json(reports))
        return
    for report in reports:
        print(report.to_text())
        print()


# validate


def cmd_validate(files: Sequence[str]) -> Report:
    workspace = load_workspace(resolve_file(f) for f in files)
    report = Report("validate", "workspace", ", ".join(files), diagnostics=list(workspace.diagnostics))
    report.notes.append(f"{len(workspace.names())} objets : {', '.join(workspace.names())}")
    return report


# compute


class ComputeDispatcher:
    """Exécute un calcul nommé sur les objets d'un Workspace."""

    def __init__(self, workspace: Workspace, window: Optional[DegreeWindow] = None):
        self.workspace = workspace
        self.window = window
        self.handlers: Dict[str, Callable[[List[str]], Report]] = {
            "sections": self.sections,
            "stalk": self.stalk,
            "cohomology": self.cohomology,
            "pushforward": self.pushforward,
            "shriek": self.shriek,
            "dual": self.dual,
            "upper-shriek": self.upper_shriek,
        }

    def run(self, kind: str, names: List[str]) -> Report:
        if kind not in self.handlers:
            raise UsageError(f"calcul inconnu : {kind}")
        logger.info("Calcul %s sur %s", kind, names)
        return self.handlers[kind](names)

    def _get(self, name: str, expected: type, label: str) -> object:
        try:
            value = self.workspace.lookup(name)
        except KeyError as error:
            raise UsageError(error.args[0]) from error
        if not isinstance(value, expected):
            raise UsageError(f"{name} n'est pas {label}")
        return value

    def _sheaf(self, name: str) -> GradedSheaf:
        return self._get(name, GradedSheaf, "un faisceau")  # type: ignore[return-value]

    def _value(self, name: str) -> object:
        return self._get(name, (GradedSheaf, ComplexOfSheaves), "un faisceau ou un complexe")  # type: ignore[arg-type]

    def _map(self, name: str) -> GradedSpaceMap:
        return self._get(name, GradedSpaceMap, "un morphisme")  # type: ignore[return-value]

    @staticmethod
    def _arity(names: List[str], count: int, usage: str) -> None:
        if len(names) != count:
            raise UsageError(f"usage : compute {usage}")

    def sections(self, names: List[str]) -> Report:
        if len(names) not in (1, 2):
            raise UsageError("usage : compute sections F [a,b,…]")
        sheaf = self._sheaf(names[0])
        if len(names) == 1:
            module = global_sections(sheaf, self.window)
            where = "X"
        else:
            subset = [p for p in names[1].split(",") if p]
            module = sections(sheaf, subset, self.window)
            where = "{" + ",".join(subset) + "}"
        return Report("compute", "sections", f"{sheaf.name}({where})", module_table(module, where))

    def stalk(self, names: List[str]) -> Report:
        self._arity(names, 2, "stalk F x")
        sheaf = self._sheaf(names[0])
        if names[1] not in sheaf.space.poset:
            raise UsageError(f"point inconnu de {sheaf.space.name} : {names[1]}")
        return Report("compute", "stalk", f"{sheaf.name}_{names[1]}", module_table(sheaf.stalk(names[1]), names[1]))

    def cohomology(self, names: List[str]) -> Report:
        self._arity(names, 1, "cohomology F")
        value = self._value(names[0])
        if isinstance(value, GradedSheaf):
            modules = global_cohomology(value, self.window)
            return Report("compute", "cohomology", f"H^*(X, {value.name})", cohomology_modules_table(modules))
        return Report("compute", "cohomology", f"H^*({names[0]})", cohomology_table(value))  # type: ignore[arg-type]

    def pushforward(self, names: List[str]) -> Report:
        self._arity(names, 2, "pushforward f F")
        f, sheaf = self._map(names[0]), self._sheaf(names[1])
        pushed = pushforward_gr(f, sheaf, self.window)
        return Report("compute", "pushforward", f"{f.name}_* {sheaf.name}", invariant_table(pushed))

    def shriek(self, names: List[str]) -> Report:
        self._arity(names, 2, "shriek f F")
        f, sheaf = self._map(names[0]), self._sheaf(names[1])
        pushed = shriek_pushforward_gr(f, sheaf, self.window)
        return Report("compute", "shriek", f"{f.name}_! {sheaf.name}", invariant_table(pushed))

    def dual(self, names: List[str]) -> Report:
        self._arity(names, 1, "dual F")
        value = self._value(names[0])
        ring = value.ring  # type: ignore[attr-defined]
        dual = verdier_dual(value, config=DualityConfig(ring, window=self.window))  # type: ignore[arg-type]
        return Report("compute", "dual", f"D({names[0]})", cohomology_table(dual))

    def upper_shriek(self, names: List[str]) -> Report:
        self._arity(names, 2, "upper-shriek f G")
        f, value = self._map(names[0]), self._value(names[1])
        result = upper_shriek(f, value, self.window)  # type: ignore[arg-type]
        return Report("compute", "upper-shriek", f"{f.name}^! {names[1]}", cohomology_table(result))


def cmd_compute(kind: str, names: List[str], files: Sequence[str], window: Optional[DegreeWindow]) -> Report:
    workspace = load_workspace(resolve_file(f) for f in files)
    if not workspace.is_clean:
        report = Report("compute", kind, " ".join(names), diagnostics=list(workspace.diagnostics))
        report.notes.append("⚠️ Workspace invalide : calcul abandonné")
        return report
    report = ComputeDispatcher(workspace, window).run(kind, names)
    if window is not None:
        report.notes.append(f"fenêtre de degrés {window.low}..{window.high}")
    return report


# check


def cmd_check(suite: str, settings: KitSettings, inject_fault: bool = False) -> List[Report]:
    runner = SuiteRunner(
        seed=settings.seed,
        count=settings.count,
        ring=settings.base_field,
        gradings=settings.gradings,
        max_points=settings.max_points,
        inject_fault=inject_fault,
        window=settings.window,
    )
    reports = []
    for result in runner.run(suite):
        notes = [f"graine {settings.seed}, {settings.count} instances"]
        if result.fault_injected:
            notes.append("⚠️ défaut injecté")
        reports.append(Report("check", result.suite, certificates=result.certificates, notes=notes))
    return reports


# Point d'entrée


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="Rapport JSON")
    common.add_argument("--debug", action="store_true", help="Journal détaillé et traces")
    common.add_argument("--verbose", action="store_true", help="Journal des étapes")
    common.add_argument("--degree-window", type=parse_window, help="Fenêtre de degrés, ex. -2..3")

    parser = argparse.ArgumentParser(
        prog="graded-sheaf", description="Calcul exact sur les espaces gradués finis"
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    validate = commands.add_parser("validate", parents=[common], help="Valide des fichiers de description")
    validate.add_argument("files", nargs="*", help="Fichiers .gsk ou noms de fixtures")
    validate.add_argument("-f", "--file", action="append", default=[], help="Fichier .gsk ou fixture")

    compute = commands.add_parser("compute", parents=[common], help="Calcule un invariant")
    compute.add_argument("kind", choices=COMPUTE_KINDS)
    compute.add_argument("names", nargs="+", help="Objets (morphisme puis faisceau, faisceau puis point…)")
    compute.add_argument("-f", "--file", action="append", required=True, help="Fichier .gsk ou fixture")

    check = commands.add_parser("check", parents=[common], help="Vérifie des lois sur des instances aléatoires")
    check.add_argument("suite", choices=SUITES + ("all",))
    check.add_argument("--seed", type=int, help="Graine")
    check.add_argument("--count", type=int, help="Nombre d'instances par loi")
    check.add_argument("--max-points", type=int, help="Nombre maximal de points")
    check.add_argument("--config", type=Path, help="Réglages YAML")
    check.add_argument("--inject-fault", action="store_true", help="Altère un morphisme canonique")
    return parser


def configure_logging(debug: bool, verbose: bool) -> None:
    level = logging.DEBUG if debug else logging.INFO if verbose else logging.WARNING
    logging.basicConfig(level=level, format="%(levelname)s %(name)s : %(message)s")


def run(args: argparse.Namespace) -> int:
    if args.command == "validate":
        files = list(args.files) + list(args.file)
        if not files:
            raise UsageError("usage : validate FICHIER… ou -f FICHIER")
        reports = [cmd_validate(files)]
    elif args.command == "compute":
        reports = [cmd_compute(args.kind, args.names, args.file, args.degree_window)]
    else:
        settings = load_settings(args.config).overridden(
            seed=args.seed, count=args.count, max_points=args.max_points, window=args.degree_window
        )
        reports = cmd_check(args.suite, settings, args.inject_fault)
    emit(reports, args.json)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAILURE


def join_window_values(argv: Sequence[str]) -> List[str]:
    """--degree-window -2..3 devient --degree-window=-2..3 (argparse lit -2..3 comme une option)."""
    joined: List[str] = []
    tokens = iter(argv)
    for token in tokens:
        if token == "--degree-window":
            value = next(tokens, None)
            joined.append(token if value is None else f"{token}={value}")
        else:
            joined.append(token)
    return joined


def main(argv: Optional[Sequence[str]] = None) -> None:
    """Point d'entrée principal."""
    parser = build_parser()
    args = parser.parse_args(join_window_values(sys.argv[1:] if argv is None else argv))
    configure_logging(args.debug, args.verbose)

    try:
        code = run(args)
    except KeyboardInterrupt:
        print("\n👋 Calcul interrompu.")
        sys.exit(EXIT_OK)
    except (DescriptionError, UsageError) as e:
        print(f"❌ Erreur : {e}", file=sys.stderr)
        sys.exit(EXIT_USAGE)
    except GradedSheafError as e:
        print(f"❌ Erreur : {e}", file=sys.stderr)
        sys.exit(EXIT_FAILURE)
    except Exception as e:
        print(f"\n❌ Erreur : {e}", file=sys.stderr)
        if args.debug:
            import traceback

            traceback.print_exc()
        sys.exit(EXIT_FAILURE)
    sys.exit(code)


if __name__ == "__main__":
    main()
