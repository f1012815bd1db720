"""
Rapports des commandes compute et check : tables pandas et JSON stable.
"""

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

import numpy as np
import pandas as pd

from ..algebra.graded import GradedModule
from ..algebra.grading import format_degree
from ..core.reports import COMPLEX_COLUMNS, TABLE_COLUMNS, Certificate, summarize
from ..domain.diagnostics import Diagnostic

logger = logging.getLogger(__name__)


class ReportEncoder(json.JSONEncoder):
    """Encodeur JSON des valeurs exactes et des enregistrements du moteur."""

    def default(self, obj: Any) -> Any:
        if isinstance(obj, Fraction):
            return str(obj) if obj.denominator != 1 else obj.numerator
        if isinstance(obj, np.integer):
            return int(obj)
        if isinstance(obj, np.ndarray):
            return obj.tolist()
        if isinstance(obj, pd.DataFrame):
            return table_records(obj)
        if isinstance(obj, Certificate):
            return {"law": obj.law, "passed": obj.passed, "instance": obj.instance, "details": list(obj.details)}
        if isinstance(obj, Diagnostic):
            return {
                "code": obj.code,
                "location": obj.location,
                "message": obj.message,
                "severity": obj.severity.value,
            }
        if isinstance(obj, Enum):
            return obj.value
        if isinstance(obj, Path):
            return str(obj)
        return super().default(obj)


def table_records(table: pd.DataFrame) -> List[Dict[str, Any]]:
    """Lignes dans l'ordre des colonnes ; les entiers numpy deviennent des int."""
    records = []
    for row in table.itertuples(index=False):
        record = {}
        for column, value in zip(table.columns, row):
            record[column] = int(value) if isinstance(value, (np.integer, int)) else str(value)
        records.append(record)
    return records


def module_table(module: GradedModule, point: str = "X") -> pd.DataFrame:
    """Table (point, degré, rang, diviseurs) d'un module gradué, rangée sous un point fictif."""
    rows = [
        {
            "point": point,
            "degree": format_degree(degree),
            "rank": m.invariants.rank,
            "divisors": " ".join(str(d) for d in m.invariants.divisors),
        }
        for degree, m in sorted(module.parts.items())
    ]
    return pd.DataFrame(rows, columns=TABLE_COLUMNS)


def cohomology_modules_table(modules: Dict[int, GradedModule], point: str = "X") -> pd.DataFrame:
    """Table (n, point, degré, rang, diviseurs) de modules indexés par un degré cohomologique."""
    frames = [module_table(m, point).assign(n=n) for n, m in sorted(modules.items()) if not m.is_zero()]
    if not frames:
        return pd.DataFrame(columns=COMPLEX_COLUMNS)
    return pd.concat(frames, ignore_index=True)[COMPLEX_COLUMNS]


@dataclass
class Report:
    """
    Résultat d'une commande, imprimable en texte ou en JSON.

    Attributes:
        command: Commande (compute, check, validate)
        kind: Calcul ou suite concernée
        subject: Objet(s) concernés
        table: Invariants par point et degré (colonne n pour les complexes)
        certificates: Certificats de lois
        diagnostics: Diagnostics de validation
        notes: Lignes libres (paramètres, avertissements)
    """

    command: str
    kind: str
    subject: str = ""
    table: pd.DataFrame = field(default_factory=lambda: pd.DataFrame(columns=TABLE_COLUMNS))
    certificates: List[Certificate] = field(default_factory=list)
    diagnostics: List[Diagnostic] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.certificates) and not any(
            d.severity.value == "erreur" for d in self.diagnostics
        )

    def to_dict(self) -> Dict[str, Any]:
        """Clés dans un ordre fixe."""
        data: Dict[str, Any] = {
            "command": self.command,
            "kind": self.kind,
            "subject": self.subject,
            "passed": self.passed,
            "table": table_records(self.table),
        }
        if self.certificates:
            data["summary"] = table_records(summarize(self.certificates))
            data["certificates"] = self.certificates
        if self.diagnostics:
            data["diagnostics"] = self.diagnostics
        if self.notes:
            data["notes"] = list(self.notes)
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), cls=ReportEncoder, indent=2, ensure_ascii=False)

    def to_text(self) -> str:
        lines = [f"{self.command} {self.kind}" + (f" : {self.subject}" if self.subject else "")]
        lines.extend(self.notes)
        if not self.table.empty:
            lines.append(self.table.to_string(index=False))
        elif not self.certificates and not self.diagnostics:
            lines.append("(objet nul)")
        if self.certificates:
            lines.append(summarize(self.certificates).to_string(index=False))
            for certificate in self.certificates:
                if not certificate.passed:
                    lines.append(f"❌ {certificate.law} [{certificate.instance}]")
                    lines.extend(f"   {detail}" for detail in certificate.details[:5])
        for diagnostic in self.diagnostics:
            marker = "❌" if diagnostic.severity.value == "erreur" else "⚠️"
            lines.append(f"{marker} {diagnostic}")
        lines.append("✅ Succès" if self.passed else "❌ Échec")
        return "\n".join(lines)

    def write(self, path: Path, as_json: bool = True) -> Path:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_json() if as_json else self.to_text(), encoding="utf-8")
        logger.info("Rapport écrit dans %s", path)
        return path


def combine_reports(reports: Sequence[Report]) -> Dict[str, Any]:
    return {"reports": [r.to_dict() for r in reports], "passed": all(r.passed for r in reports)}


def reports_json(reports: Iterable[Report]) -> str:
    return json.dumps(combine_reports(list(reports)), cls=ReportEncoder, indent=2, ensure_ascii=False)


def certificates_report(kind: str, certificates: Sequence[Certificate], notes: Optional[List[str]] = None) -> Report:
    return Report("check", kind, certificates=list(certificates), notes=list(notes or []))
