import numpy as np
import pytest

from bratteli import CapExceeded, dimensions
from bratteli.zoo import (
    KINDS,
    GraphSpec,
    make,
    pascal,
    random_graph,
    unordered_pairs,
    young,
)

# classical values: p(0)..p(10) and a few standard-tableaux counts
PARTITION_COUNTS = [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42]
TABLEAUX_DIMS = {
    (2, 1): 2,
    (2, 2): 2,
    (3, 1): 3,
    (2, 1, 1): 3,
    (3, 2): 5,
    (4, 2): 9,
    (3, 2, 1): 16,
    (1, 1, 1, 1): 1,
}


def test_pascal_sizes_and_kinds():
    assert KINDS == ("pascal", "young", "unordered_pairs", "random")
    g = pascal(10)
    assert list(g.level_sizes) == list(range(1, 12))


def test_young_sizes_match_partition_numbers():
    g = young(10)
    assert list(g.level_sizes) == PARTITION_COUNTS


def test_young_labels_and_dims():
    g = young(6)
    dims = dimensions(g)
    seen = {}
    for n in range(7):
        for i in range(g.level_size(n)):
            seen[g.label((n, i))] = dims[n][i]
    for shape, d in TABLEAUX_DIMS.items():
        assert seen[shape] == d, shape
    # dims at level n sum-of-squares = n! (RSK)
    import math

    for n in range(7):
        assert sum(d * d for d in dims[n]) == math.factorial(n)


def test_unordered_pairs_sizes_and_labels():
    g = unordered_pairs(4, 3)
    assert list(g.level_sizes) == [1, 3, 6, 21, 231]
    # level 2 holds multisets over the 3 level-1 vertices
    labels = {g.label((2, i)) for i in range(6)}
    assert labels == {(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)}
    # {a,a} has one predecessor, {a,b} two
    assert len(g.preds(2, 0)) in (1, 2)
    sizes = sorted(len(g.preds(2, i)) for i in range(6))
    assert sizes == [1, 1, 1, 2, 2, 2]


def test_unordered_pairs_cap():
    with pytest.raises(CapExceeded):
        unordered_pairs(5, 3, level_cap=20_000)


def test_random_graph_determinism_and_density():
    a = random_graph(5, seed=7, density=0.4)
    b = random_graph(5, seed=7, density=0.4)
    assert list(a.level_sizes) == list(b.level_sizes)
    assert list(a.edges()) == list(b.edges())
    c = random_graph(5, seed=8, density=0.4)
    assert list(a.edges()) != list(c.edges())
    full = random_graph(4, seed=1, density=1.0)
    for n in range(1, full.depth):
        assert full.edge_count(n - 1) == full.level_size(n - 1) * full.level_size(n)


def test_graphspec_validation():
    assert GraphSpec(kind="pascal", depth=4).to_dict() == {"kind": "pascal", "depth": 4}
    with pytest.raises(ValueError):
        GraphSpec(kind="hexagonal", depth=4)
    with pytest.raises(ValueError):
        GraphSpec(kind="unordered_pairs", depth=4)  # missing base
    with pytest.raises(ValueError):
        GraphSpec(kind="unordered_pairs", depth=4, base=1)
    with pytest.raises(ValueError):
        GraphSpec(kind="random", depth=4, density=0.0)
    with pytest.raises(ValueError):
        GraphSpec(kind="pascal", depth=0)


def test_make_dispatch():
    for kind, kw in [
        ("pascal", {}),
        ("young", {}),
        ("unordered_pairs", {"base": 3}),
        ("random", {"seed": 3, "density": 0.5}),
    ]:
        g = make(GraphSpec(kind=kind, depth=3, **kw))
        assert g.depth == 4
    same = make(GraphSpec(kind="random", depth=3, seed=3, density=0.5))
    assert list(same.edges()) == list(
        make(GraphSpec(kind="random", depth=3, seed=3, density=0.5)).edges()
    )


def test_make_respects_level_cap():
    with pytest.raises(CapExceeded):
        make(GraphSpec(kind="unordered_pairs", depth=5, base=3), level_cap=10_000)


def test_pascal_deep_build_is_fast():
    import time

    t0 = time.perf_counter()
    g = pascal(3000)
    assert g.level_size(3000) == 3001
    assert time.perf_counter() - t0 < 2.0


def test_every_vertex_connected():
    for g in (pascal(6), young(6), unordered_pairs(3, 3), random_graph(6, seed=2)):
        for n in range(1, g.depth):
            for v in range(g.level_size(n)):
                assert len(g.preds(n, v)) >= 1
        for n in range(g.depth - 1):
            for u in range(g.level_size(n)):
                assert len(g.succs(n, u)) >= 1
