"""
Réglages des suites de lois, lus depuis un fichier YAML.
"""

from dataclasses import dataclass, field, replace
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import yaml

from ..algebra.base_ring import BaseRing
from ..algebra.grading import DegreeWindow, GradingGroup

logger = logging.getLogger(__name__)

DEFAULT_SETTINGS_PATH = Path(__file__).parent.parent / "suites" / "default.yaml"


@dataclass(frozen=True)
class KitSettings:
    """
    Paramètres d'une exécution de `graded-sheaf check`.

    Attributes:
        seed: Graine du générateur d'instances
        count: Nombre d'instances par loi
        max_points: Nombre maximal de points des espaces tirés
        gradings: Groupes de degrés possibles
        base_field: Corps des coefficients (clé YAML `field`)
        window: Fenêtre de degrés (None : matérialisation finie exigée)
    """

    seed: int = 1
    count: int = 25
    max_points: int = 4
    gradings: Tuple[GradingGroup, ...] = field(
        default_factory=lambda: (GradingGroup.trivial(), GradingGroup.cyclic(2), GradingGroup.cyclic(3))
    )
    base_field: BaseRing = field(default_factory=lambda: BaseRing.prime_field(2))
    window: Optional[DegreeWindow] = None

    def __post_init__(self) -> None:
        if self.count < 1:
            raise ValueError(f"Nombre d'instances invalide : {self.count}")
        if self.max_points < 1:
            raise ValueError(f"Nombre de points invalide : {self.max_points}")
        if not self.gradings:
            raise ValueError("Aucun groupe de degrés")

    def overridden(self, **values: Any) -> "KitSettings":
        """Copie où les valeurs non None remplacent celles du fichier."""
        return replace(self, **{k: v for k, v in values.items() if v is not None})

    def to_dict(self) -> Dict[str, Any]:
        return {
            "seed": self.seed,
            "count": self.count,
            "max_points": self.max_points,
            "gradings": [g.label for g in self.gradings],
            "field": self.base_field.label,
            "window": f"{self.window.low}..{self.window.high}" if self.window else None,
        }


def settings_from_dict(data: Dict[str, Any]) -> KitSettings:
    """
    Raises:
        ValueError: Pour une clé inconnue ou une valeur illisible
    """
    known = {"seed", "count", "max_points", "gradings", "field", "window"}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ValueError(f"Clés de réglage inconnues : {unknown}")
    values: Dict[str, Any] = {}
    for key in ("seed", "count", "max_points"):
        if key in data:
            values[key] = int(data[key])
    if "gradings" in data:
        values["gradings"] = tuple(GradingGroup.parse(str(g)) for g in data["gradings"])
    if "field" in data:
        ring = BaseRing.parse(str(data["field"]))
        if not ring.is_field:
            raise ValueError(f"Les suites exigent un corps : {ring}")
        values["base_field"] = ring
    if data.get("window") is not None:
        values["window"] = DegreeWindow.parse(str(data["window"]))
    return KitSettings(**values)


def load_settings(path: Optional[Union[str, Path]] = None) -> KitSettings:
    """
    Charge les réglages (fichier livré par défaut).

    Raises:
        ValueError: Si le fichier est illisible ou mal formé
    """
    path = Path(path) if path is not None else DEFAULT_SETTINGS_PATH
    try:
        with open(path, "r", encoding="utf-8") as file:
            data = yaml.safe_load(file) or {}
    except (OSError, yaml.YAMLError) as error:
        raise ValueError(f"Réglages illisibles : {path} ({error})") from error
    if not isinstance(data, dict):
        raise ValueError(f"Réglages mal formés : {path}")
    settings = settings_from_dict(data.get("check", data))
    logger.debug("Réglages chargés depuis %s : %s", path, settings.to_dict())
    return settings
