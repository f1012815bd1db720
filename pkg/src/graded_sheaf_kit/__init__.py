"""
graded-sheaf-kit - Calcul exact sur les espaces topologiques gradués finis.

Ce package implémente les faisceaux gradués sur les ensembles ordonnés finis
(topologie d'Alexandrov) : sections, images directes et inverses, produit
tensoriel, Hom, structures annelées, catégorie dérivée et dualité, avec des
certificats vérifiant les lois sur des instances aléatoires reproductibles.
"""

__version__ = "1.0.0"
__author__ = "Graded Sheaf Kit Team"
__email__ = "contact@graded-sheaf-kit.org"

from .algebra import *
from .domain import *
from .core import *
from .io import *
