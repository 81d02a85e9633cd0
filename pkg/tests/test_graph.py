from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bratteli import (
    CapExceeded,
    FinitePath,
    GradedGraph,
    VertexId,
    count_paths,
    dimensions,
    enumerate_paths,
)
from bratteli.zoo import pascal, random_graph


def test_pascal_structure():
    g = pascal(6)
    assert g.depth == 7
    assert list(g.level_sizes) == list(range(1, 8))
    # predecessors of (n,k) are (n-1,k-1) and (n-1,k), clipped at the border
    assert list(g.preds(5, 0)) == [0]
    assert sorted(g.preds(5, 3)) == [2, 3]
    assert list(g.preds(5, 5)) == [4]
    assert sorted(g.succs(3, 1)) == [1, 2]


def test_from_pred_lists_roundtrip():
    g = GradedGraph.from_pred_lists([[[0], [0]], [[0, 1], [1]]])
    assert list(g.level_sizes) == [1, 2, 2]
    assert sorted(g.preds(2, 0)) == [0, 1]
    assert list(g.preds(2, 1)) == [1]
    assert list(g.succs(1, 0)) == [0]
    assert sorted(g.succs(1, 1)) == [0, 1]
    assert g.edge_count(0) == 2 and g.edge_count(1) == 3


def test_pred_succ_blocks_agree(pascal8, young6):
    for eg in (pascal8, young6):
        g = eg.graph
        for n in range(1, g.depth):
            indptr, indices = g.pred_block(n)
            for v in range(g.level_size(n)):
                assert list(indices[indptr[v] : indptr[v + 1]]) == list(g.preds(n, v))
            for u in range(g.level_size(n - 1)):
                assert sorted(g.succs(n - 1, u)) == sorted(
                    v
                    for v in range(g.level_size(n))
                    if u in indices[indptr[v] : indptr[v + 1]]
                )


def test_edges_listing():
    g = pascal(3)
    triples = list(g.edges())
    assert (0, 0, 0) in triples and (0, 0, 1) in triples
    assert len(triples) == sum(g.edge_count(n) for n in range(g.depth - 1))


def test_count_paths_binomial(pascal8):
    g = pascal8.graph
    for n in range(1, 9):
        for k in range(n + 1):
            assert count_paths(g, (0, 0), (n, k)) == comb(n, k)
    # interior pair: paths (2,1) -> (6,3) choose 2 of 4 remaining steps
    assert count_paths(g, (2, 1), (6, 3)) == comb(4, 2)
    assert count_paths(g, (2, 0), (1, 0)) == 0  # wrong direction


def test_count_paths_matches_enumeration(pascal8, young6):
    for eg in (pascal8, young6):
        g = eg.graph
        for u in [(0, 0), (1, 0), (2, 1)]:
            for v_level in (4, 5):
                for v_idx in range(g.level_size(v_level)):
                    v = (v_level, v_idx)
                    paths = enumerate_paths(g, u, v)
                    assert len(paths) == count_paths(g, u, v)
                    for p in paths:
                        assert p.start_level == u[0]
                        assert p.indices[0] == u[1] and p.indices[-1] == v_idx
                        for a, b in zip(p.vertices(), p.vertices()[1:]):
                            assert a.index in g.preds(b.level, b.index)
                    assert len({p.indices for p in paths}) == len(paths)


def test_dimensions_pascal(pascal8):
    dims = dimensions(pascal8.graph)
    for n in range(9):
        assert dims[n] == [comb(n, k) for k in range(n + 1)]


def test_enumerate_paths_cap(pascal8):
    with pytest.raises(CapExceeded):
        enumerate_paths(pascal8.graph, (0, 0), (8, 4), cap=10)


def test_check_vertex_and_path_errors(pascal8):
    g = pascal8.graph
    assert g.check_vertex((3, 2)) == VertexId(3, 2)
    with pytest.raises(ValueError):
        g.check_vertex((9, 0))
    with pytest.raises(ValueError):
        g.check_vertex((3, 7))
    g.check_path(FinitePath(0, (0, 0, 1)))
    with pytest.raises(ValueError):
        g.check_path(FinitePath(0, (0, 0, 2)))  # (2,2) is not above (1,0)


def test_label_lookup():
    from bratteli.zoo import young

    g = young(4)
    labels = [g.label((4, i)) for i in range(g.level_size(4))]
    assert (2, 1, 1) in labels and (4,) in labels
    assert len(labels) == 5


@given(seed=st.integers(0, 2**32 - 1), density=st.floats(0.05, 1.0))
@settings(max_examples=25, deadline=None)
def test_random_graph_well_formed(seed, density):
    g = random_graph(5, seed=seed, density=density)
    assert g.level_size(0) == 1
    for n in range(1, g.depth):
        indptr, indices = g.pred_block(n)
        assert indptr[0] == 0 and indptr[-1] == len(indices)
        assert np.all(np.diff(indptr) >= 1)  # no orphan vertices
        assert np.all(indices >= 0) and np.all(indices < g.level_size(n - 1))
        for u in range(g.level_size(n - 1)):
            assert len(g.succs(n - 1, u)) >= 1
