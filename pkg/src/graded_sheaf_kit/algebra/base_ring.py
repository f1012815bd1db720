"""
Anneaux de base commutatifs : entiers, entiers modulo n, corps premiers et rationnels.
"""

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
import math
import re
from typing import Any, Optional, Tuple

import numpy as np


class RingKind(Enum):
    """Types d'anneaux de base supportés."""

    INTEGERS = "Z"
    INTEGERS_MOD = "Z/n"
    PRIME_FIELD = "F_p"
    RATIONALS = "Q"


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


@dataclass(frozen=True)
class BaseRing:
    """
    Anneau de base R sur lequel vivent tous les modules.

    Les calculs sur Z/n se font dans Z en ajoutant les relations n·I à chaque
    présentation ; les corps font de l'élimination exacte.

    Attributes:
        kind: Type d'anneau
        modulus: n pour Z/n, p pour F_p, 0 sinon
    """

    kind: RingKind
    modulus: int = 0

    def __post_init__(self) -> None:
        if self.kind == RingKind.INTEGERS_MOD and self.modulus < 2:
            raise ValueError(f"Le module de Z/n doit être ≥ 2 : {self.modulus}")
        if self.kind == RingKind.PRIME_FIELD and not _is_prime(self.modulus):
            raise ValueError(f"F_p exige un nombre premier : {self.modulus}")
        if self.kind in (RingKind.INTEGERS, RingKind.RATIONALS) and self.modulus != 0:
            raise ValueError(f"Module inattendu pour {self.kind.value} : {self.modulus}")

    # Constructeurs

    @classmethod
    def integers(cls) -> "BaseRing":
        return cls(RingKind.INTEGERS)

    @classmethod
    def integers_mod(cls, n: int) -> "BaseRing":
        return cls(RingKind.INTEGERS_MOD, n)

    @classmethod
    def prime_field(cls, p: int) -> "BaseRing":
        return cls(RingKind.PRIME_FIELD, p)

    @classmethod
    def rationals(cls) -> "BaseRing":
        return cls(RingKind.RATIONALS)

    @classmethod
    def parse(cls, text: str) -> "BaseRing":
        """
        Lit une étiquette d'anneau : Z, Z/6, F2, F_3, Q.

        Raises:
            ValueError: Si l'étiquette n'est pas reconnue
        """
        label = text.strip()
        if label == "Z":
            return cls.integers()
        if label == "Q":
            return cls.rationals()
        match = re.fullmatch(r"Z/(\d+)", label)
        if match:
            return cls.integers_mod(int(match.group(1)))
        match = re.fullmatch(r"F_?(\d+)", label)
        if match:
            return cls.prime_field(int(match.group(1)))
        raise ValueError(f"Anneau de base inconnu : {text}")

    # Propriétés

    @property
    def label(self) -> str:
        if self.kind == RingKind.INTEGERS:
            return "Z"
        if self.kind == RingKind.RATIONALS:
            return "Q"
        if self.kind == RingKind.INTEGERS_MOD:
            return f"Z/{self.modulus}"
        return f"F{self.modulus}"

    def __str__(self) -> str:
        return self.label

    @property
    def is_field(self) -> bool:
        """Vrai pour F_p, Q et Z/p avec p premier."""
        if self.kind in (RingKind.PRIME_FIELD, RingKind.RATIONALS):
            return True
        return self.kind == RingKind.INTEGERS_MOD and _is_prime(self.modulus)

    @property
    def arithmetic_is_field(self) -> bool:
        """Vrai si l'arithmétique interne est celle d'un corps (F_p, Q)."""
        return self.kind in (RingKind.PRIME_FIELD, RingKind.RATIONALS)

    @property
    def torsion(self) -> int:
        """n pour Z/n (relations implicites n·I), 0 sinon."""
        return self.modulus if self.kind == RingKind.INTEGERS_MOD else 0

    @property
    def characteristic(self) -> int:
        return self.modulus if self.kind != RingKind.RATIONALS else 0

    @property
    def cardinality(self) -> Optional[int]:
        """Cardinal de l'anneau, None s'il est infini."""
        if self.kind in (RingKind.INTEGERS_MOD, RingKind.PRIME_FIELD):
            return self.modulus
        return None

    # Arithmétique élémentaire

    def normalize(self, value: Any) -> Any:
        """Représentant canonique d'un élément de l'arithmétique interne."""
        if self.kind == RingKind.PRIME_FIELD:
            return int(value) % self.modulus
        if self.kind == RingKind.RATIONALS:
            return Fraction(value)
        if isinstance(value, Fraction):
            if value.denominator != 1:
                raise ValueError(f"Coefficient non entier : {value}")
            return int(value)
        return int(value)

    def is_zero(self, value: Any) -> bool:
        return self.normalize(value) == 0

    def is_unit(self, value: Any) -> bool:
        value = self.normalize(value)
        if self.arithmetic_is_field:
            return value != 0
        return value in (1, -1)

    def inverse(self, value: Any) -> Any:
        value = self.normalize(value)
        if not self.is_unit(value):
            raise ValueError(f"Élément non inversible : {value}")
        if self.kind == RingKind.PRIME_FIELD:
            return pow(value, -1, self.modulus)
        if self.kind == RingKind.RATIONALS:
            return 1 / value
        return value

    def size(self, value: Any) -> int:
        """Jauge euclidienne utilisée pour choisir les pivots."""
        if self.arithmetic_is_field:
            return 0 if self.normalize(value) != 0 else -1
        return abs(int(value))

    def divmod(self, a: Any, b: Any) -> Tuple[Any, Any]:
        """
        Division euclidienne a = q·b + r avec r plus petit que b.

        Raises:
            ZeroDivisionError: Si b est nul
        """
        a, b = self.normalize(a), self.normalize(b)
        if b == 0:
            raise ZeroDivisionError("division par zéro")
        if self.arithmetic_is_field:
            return self.normalize(a * self.inverse(b)), self.normalize(0)
        return a // b, a % b

    def divides(self, a: Any, b: Any) -> bool:
        a, b = self.normalize(a), self.normalize(b)
        if a == 0:
            return b == 0
        if self.arithmetic_is_field:
            return True
        return b % a == 0

    def unit_normal(self, value: Any) -> Any:
        """Unité u telle que u·value soit le représentant normalisé."""
        value = self.normalize(value)
        if value == 0:
            return self.normalize(1)
        if self.arithmetic_is_field:
            return self.inverse(value)
        return -1 if value < 0 else 1

    def equal(self, a: Any, b: Any) -> bool:
        """Égalité dans R (modulo n pour Z/n)."""
        diff = self.normalize(a) - self.normalize(b)
        if self.torsion:
            return diff % self.torsion == 0
        return self.normalize(diff) == 0

    # Matrices

    def matrix(self, data: Any, rows: Optional[int] = None, cols: Optional[int] = None) -> np.ndarray:
        """Convertit en matrice numpy à coefficients exacts (dtype object)."""
        array = np.array(data, dtype=object)
        if array.size == 0:
            shape = (rows or 0, cols or 0)
            return np.zeros(shape, dtype=object)
        if array.ndim == 1:
            array = array.reshape(1, -1) if rows in (None, 1) else array.reshape(-1, 1)
        result = np.empty(array.shape, dtype=object)
        for index, value in np.ndenumerate(array):
            result[index] = self.normalize(value)
        if rows is not None and cols is not None and result.shape != (rows, cols):
            raise ValueError(f"Dimensions {result.shape} au lieu de {(rows, cols)}")
        return result

    def reduce(self, array: np.ndarray) -> np.ndarray:
        """Réduit une matrice dans l'arithmétique interne (modulo p pour F_p)."""
        if self.kind == RingKind.PRIME_FIELD and array.size:
            return array % self.modulus
        return array

    def matrices_equal(self, a: np.ndarray, b: np.ndarray) -> bool:
        """Égalité coefficient par coefficient dans R."""
        if a.shape != b.shape:
            return False
        return all(self.equal(x, y) for x, y in zip(a.flat, b.flat))


ZZ = BaseRing.integers()
QQ = BaseRing.rationals()
