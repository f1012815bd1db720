"""
Configuration pytest pour graded-sheaf-kit.
"""

import pytest
from pathlib import Path

from src.graded_sheaf_kit.algebra.base_ring import BaseRing
from src.graded_sheaf_kit.algebra.grading import GradingGroup, GroupHom
from src.graded_sheaf_kit.domain.poset import FinitePoset
from src.graded_sheaf_kit.domain.sheaf import GradedSheaf
from src.graded_sheaf_kit.domain.space import GradedSpace, GradedSpaceMap
from src.graded_sheaf_kit.io.text_format import load_workspace

FIXTURES = Path(__file__).parent.parent / "src" / "graded_sheaf_kit" / "fixtures"


@pytest.fixture(scope="session")
def fixtures_path():
    """Répertoire des descriptions livrées."""
    return FIXTURES


@pytest.fixture(scope="session")
def f2():
    return BaseRing.prime_field(2)


@pytest.fixture(scope="session")
def pt_workspace():
    """Le point PT, Λ = 0."""
    return load_workspace([FIXTURES / "pt.gsk"])


@pytest.fixture(scope="session")
def line3():
    """LINE3 : c < u-, c < u+, Λ_c = Z/3, avec j : U → LINE3 et p : LINE3 → PT."""
    return load_workspace([FIXTURES / "line3.gsk"])


@pytest.fixture(scope="session")
def line3_z():
    """LINE3 avec Λ_c = Z."""
    return load_workspace([FIXTURES / "line3_z.gsk"])


@pytest.fixture(scope="session")
def sierpinski():
    return load_workspace([FIXTURES / "sierpinski.gsk"])


@pytest.fixture(scope="session")
def pseudo_circle():
    """Pseudo-cercle c1, c2 < o1, o2 et faisceau constant k."""
    return load_workspace([FIXTURES / "pseudo_circle.gsk"])


@pytest.fixture(scope="session")
def line3_ringed():
    """LINE3 annelé par k[t]/t² (deg t = 1) en c."""
    return load_workspace([FIXTURES / "line3_ringed.gsk"])


@pytest.fixture(scope="session")
def collapse(line3, sierpinski):
    """q : LINE3 → S2, c ↦ c et u± ↦ o ; propre, comme p : S2 → PT."""
    source, target = line3.spaces["LINE3"], sierpinski.spaces["S2"]
    return GradedSpaceMap(
        "q",
        source,
        target,
        {"c": "c", "u-": "o", "u+": "o"},
        {x: GroupHom.zero(GradingGroup.trivial(), source.lambdas[x]) for x in source.points},
    )


@pytest.fixture(scope="session")
def gluing_witness(f2):
    """
    V : c < u1, c < u2 avec Λ ≡ Z/2 et k constant en degré 0.

    Sur U1 ∪ U2 = {u1, u2}, Λ(U) = Z/2 × Z/2 : le préfaisceau non gradué
    ⊕_λ F(U)_λ a trop de sections pour recoller.
    """
    poset = FinitePoset(("c", "u1", "u2"), (("c", "u1"), ("c", "u2")))
    space = GradedSpace.constant("V", poset, GradingGroup.cyclic(2))
    return GradedSheaf.constant(space, f2)


# Configuration des markers pytest
def pytest_configure(config):
    """Configuration des markers personnalisés."""
    config.addinivalue_line("markers", "integration: marque les tests d'intégration")
    config.addinivalue_line("markers", "slow: marque les tests lents")
    config.addinivalue_line("markers", "unit: marque les tests unitaires")
