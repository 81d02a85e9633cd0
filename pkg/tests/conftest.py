import pytest

from bratteli import EquippedGraph, central_equipment
from bratteli.zoo import pascal, unordered_pairs, young


def equip(g) -> EquippedGraph:
    return EquippedGraph(g, central_equipment(g))


@pytest.fixture(scope="session")
def pascal8() -> EquippedGraph:
    return equip(pascal(8))


@pytest.fixture(scope="session")
def pascal16() -> EquippedGraph:
    return equip(pascal(16))


@pytest.fixture(scope="session")
def young6() -> EquippedGraph:
    return equip(young(6))


@pytest.fixture(scope="session")
def pairs3() -> EquippedGraph:
    # level sizes 1, 3, 6, 21, 231
    return equip(unordered_pairs(4, 3))
