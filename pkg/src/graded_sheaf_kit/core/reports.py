"""
Certificats de lois et tables d'invariants (pandas).

Une table d'invariants a une ligne par (point, degré) de partie non nulle, avec
le rang et les diviseurs élémentaires ; deux objets sont déclarés isomorphes
degré par degré quand leurs tables coïncident exactement.
"""

from dataclasses import dataclass, field
import logging
from typing import Iterable, List, Mapping, Optional

import pandas as pd

from ..algebra.grading import format_degree
from ..domain.complexes import ComplexOfSheaves
from ..domain.sheaf import GradedSheaf, SheafMap
from ..errors import LawViolation

logger = logging.getLogger(__name__)

TABLE_COLUMNS = ["point", "degree", "rank", "divisors"]
COMPLEX_COLUMNS = ["n"] + TABLE_COLUMNS


@dataclass
class Certificate:
    """
    Résultat d'une vérification de loi.

    Attributes:
        law: Nom de la loi
        passed: True si toutes les vérifications ont réussi
        details: Messages d'échec (ou de contexte)
        instance: Description de l'instance testée
        tables: Tables d'invariants des deux membres, si pertinentes
    """

    law: str
    passed: bool = True
    details: List[str] = field(default_factory=list)
    instance: str = ""
    tables: Mapping[str, pd.DataFrame] = field(default_factory=dict, repr=False)

    def fail(self, message: str) -> "Certificate":
        self.passed = False
        self.details.append(message)
        return self

    def merge(self, other: "Certificate") -> "Certificate":
        if not other.passed:
            self.passed = False
            self.details.extend(f"{other.law}: {d}" for d in other.details)
        return self

    def require(self) -> "Certificate":
        """
        Raises:
            LawViolation: Si la vérification a échoué
        """
        if not self.passed:
            logger.warning("Loi %s violée sur %s", self.law, self.instance)
            raise LawViolation(self.law, "; ".join(self.details) or self.instance)
        return self


def invariant_table(sheaf: GradedSheaf) -> pd.DataFrame:
    """Table (point, degré, rang, diviseurs) des tiges non nulles."""
    rows = []
    for x in sheaf.space.points:
        for degree, module in sheaf.stalks[x].parts.items():
            invariants = module.invariants
            rows.append(
                {
                    "point": x,
                    "degree": format_degree(degree),
                    "rank": invariants.rank,
                    "divisors": " ".join(str(d) for d in invariants.divisors),
                }
            )
    return _sorted(pd.DataFrame(rows, columns=TABLE_COLUMNS), TABLE_COLUMNS)


def stacked_table(tables: Mapping[int, pd.DataFrame]) -> pd.DataFrame:
    """Concatène des tables indexées par un degré cohomologique."""
    frames = [table.assign(n=n) for n, table in sorted(tables.items()) if not table.empty]
    if not frames:
        return pd.DataFrame(columns=COMPLEX_COLUMNS)
    return _sorted(pd.concat(frames, ignore_index=True)[COMPLEX_COLUMNS], COMPLEX_COLUMNS)


def terms_table(complex_: ComplexOfSheaves) -> pd.DataFrame:
    return stacked_table({n: invariant_table(t) for n, t in complex_.terms.items()})


def _sorted(table: pd.DataFrame, columns: List[str]) -> pd.DataFrame:
    if table.empty:
        return table.reset_index(drop=True)
    return table.sort_values(columns, kind="mergesort").reset_index(drop=True)


def tables_equal(first: pd.DataFrame, second: pd.DataFrame) -> bool:
    if first.empty and second.empty:
        return True
    if list(first.columns) != list(second.columns) or len(first) != len(second):
        return False
    return bool((first.astype(str).values == second.astype(str).values).all())


def table_difference(first: pd.DataFrame, second: pd.DataFrame) -> List[str]:
    """Lignes présentes d'un seul côté (pour les messages d'échec)."""
    if first.empty and second.empty:
        return []
    merged = first.astype(str).merge(second.astype(str), how="outer", indicator=True)
    lines = []
    for _, row in merged[merged["_merge"] != "both"].iterrows():
        side = "gauche" if row["_merge"] == "left_only" else "droite"
        values = ", ".join(f"{c}={row[c]}" for c in first.columns)
        lines.append(f"{side} seulement : {values}")
    return lines


def compare_tables(law: str, left: pd.DataFrame, right: pd.DataFrame, instance: str = "") -> Certificate:
    certificate = Certificate(law, instance=instance, tables={"gauche": left, "droite": right})
    if not tables_equal(left, right):
        certificate.passed = False
        certificate.details.extend(table_difference(left, right) or ["tables différentes"])
    return certificate


def total_rank(table: pd.DataFrame, point: Optional[str] = None) -> int:
    """Somme des rangs (dimension totale sur un corps)."""
    if table.empty:
        return 0
    chosen = table if point is None else table[table["point"] == point]
    return int(chosen["rank"].sum())


def summarize(certificates: Iterable[Certificate]) -> pd.DataFrame:
    """Une ligne par loi : instances, succès, échecs."""
    rows = {}
    for certificate in certificates:
        row = rows.setdefault(certificate.law, {"law": certificate.law, "instances": 0, "passed": 0, "failed": 0})
        row["instances"] += 1
        row["passed" if certificate.passed else "failed"] += 1
    return pd.DataFrame(list(rows.values()), columns=["law", "instances", "passed", "failed"])


def isomorphism_certificate(law: str, phi: SheafMap, instance: str = "") -> Certificate:
    """Naturalité de φ puis bijectivité tige par tige ; le premier défaut est nommé."""
    certificate = Certificate(law, instance=instance)
    for problem in phi.diagnostics():
        certificate.fail(f"{problem.code} {problem.location}")
    if phi.degree is not None:
        return certificate.fail(f"morphisme de degré {list(phi.degree)}")
    source, target = phi.source, phi.target
    for x in source.space.points:
        component = phi.components[x]
        degrees = sorted(set(source.stalks[x].parts) | set(target.stalks[x].parts))
        for d in degrees:
            if not component.module_map(d).is_isomorphism():
                certificate.fail(
                    f"pas un isomorphisme en {x}, degré {format_degree(d)} : "
                    f"{source.stalks[x].part(d)} → {target.stalks[x].part(d)}"
                )
                return certificate
    return certificate
