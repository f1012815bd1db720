"""
Exceptions du moteur de faisceaux gradués.
"""

from typing import Any, Hashable, Optional, Sequence


class GradedSheafError(ValueError):
    """Erreur de base du moteur (sous-classe de ValueError)."""


class MismatchError(GradedSheafError):
    """Anneaux de base, groupes de degrés ou espaces incompatibles."""


class InfiniteSupport(GradedSheafError):
    """
    Support de degrés infini lors d'une matérialisation.

    Attributes:
        point: Point où la fibre infinie a été détectée
        degree: Degré dont la préimage est infinie
    """

    def __init__(
        self, point: Optional[Hashable], degree: Optional[Sequence[int]], message: str = ""
    ) -> None:
        self.point = point
        self.degree = tuple(degree) if degree is not None else None
        detail = message or "ensemble de degrés candidats infini"
        super().__init__(
            f"Support infini au point {point}, degré {self.degree} : {detail} "
            "(la tige serait une somme directe indexée par tous les entiers ; "
            "utiliser --degree-window)"
        )


class FlatnessUndecided(GradedSheafError):
    """Noyau de coupure non plat sur un anneau qui n'est pas un corps."""

    def __init__(self, point: Optional[Hashable], degree: Optional[Sequence[int]]) -> None:
        self.point = point
        self.degree = tuple(degree) if degree is not None else None
        super().__init__(
            f"Platitude indécidable au point {point}, degré {self.degree} : "
            "le noyau de coupure a de la torsion"
        )


class NonFieldBase(GradedSheafError):
    """Opération réservée aux anneaux de base qui sont des corps."""

    def __init__(self, ring: Any) -> None:
        self.ring = ring
        super().__init__(f"L'anneau de base doit être un corps : {ring}")


class NotOpenError(GradedSheafError):
    """Le sous-ensemble n'est pas ouvert (pas une partie supérieure)."""


class NotLocallyClosedError(GradedSheafError):
    """Le sous-ensemble n'est pas localement fermé."""


class NotProperError(GradedSheafError):
    """Morphisme non propre là où f_! = f_* est requis."""


class DescriptionError(GradedSheafError):
    """
    Erreur de lecture d'un fichier de description.

    Attributes:
        line_number: Numéro de ligne (1-indexé) ou None
    """

    def __init__(self, message: str, line_number: Optional[int] = None, source: str = "") -> None:
        self.line_number = line_number
        self.source = source
        where = f"{source}:{line_number}" if line_number is not None else source
        super().__init__(f"{where} : {message}" if where else message)


class LawViolation(GradedSheafError):
    """
    Certificat de loi en échec.

    Attributes:
        law: Nom de la loi vérifiée
        details: Description du premier défaut trouvé
    """

    def __init__(self, law: str, details: str) -> None:
        self.law = law
        self.details = details
        super().__init__(f"Loi '{law}' violée : {details}")
