"""
Diagnostics structurels renvoyés par les validateurs.
"""

from dataclasses import dataclass
from enum import Enum
from typing import List, Sequence


class Severity(Enum):
    """Gravité d'un diagnostic."""

    ERROR = "erreur"
    WARNING = "avertissement"


@dataclass(frozen=True)
class Diagnostic:
    """
    Défaut constaté par un validateur.

    Attributes:
        code: Identifiant stable (ORDER_CYCLE, NOT_FUNCTORIAL…)
        location: Objet concerné (espace, faisceau, paire de points, degré)
        message: Description lisible
        severity: Gravité
    """

    code: str
    location: str
    message: str
    severity: Severity = Severity.ERROR

    def __str__(self) -> str:
        return f"[{self.code}] {self.location} : {self.message}"


def has_errors(diagnostics: Sequence[Diagnostic]) -> bool:
    return any(d.severity == Severity.ERROR for d in diagnostics)


def format_diagnostics(diagnostics: Sequence[Diagnostic]) -> List[str]:
    return [str(d) for d in diagnostics]
