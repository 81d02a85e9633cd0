from fractions import Fraction
from math import comb

import numpy as np
import pytest

from bratteli import (
    EquippedGraph,
    FinitePath,
    TableEquipment,
    central_equipment,
    cocycle,
    enumerate_paths,
    validate,
)
from bratteli.zoo import pascal, young


def test_central_closed_form_pascal(pascal16):
    """Vertex (n+1, k) hands weight k/(n+1) to (n, k-1) and (n+1-k)/(n+1)
    to (n, k)."""
    eq = pascal16.equipment
    for n in range(16):
        for k in range(n + 2):
            if k >= 1:
                assert eq.weight(n, k - 1, k) == Fraction(k, n + 1)
            if k <= n:
                assert eq.weight(n, k, k) == Fraction(n + 1 - k, n + 1)


def test_central_matches_dimension_ratio(young6):
    from bratteli import dimensions

    dims = dimensions(young6.graph)
    eq = young6.equipment
    g = young6.graph
    for n in range(1, 7):
        for v in range(g.level_size(n)):
            idx, w = eq.exact_column(n, v)
            assert sum(w) == 1
            for u, lam in zip(idx, w):
                assert lam == Fraction(dims[n - 1][u], dims[n][v])


def test_column_sums_exact(pascal8, young6, pairs3):
    for eg in (pascal8, young6, pairs3):
        g = eg.graph
        for n in range(1, g.depth):
            indptr, _ = g.pred_block(n)
            nums, dens = eg.equipment.exact_level(n)
            for v in range(g.level_size(n)):
                total = sum(
                    Fraction(nums[e], dens[e])
                    for e in range(indptr[v], indptr[v + 1])
                )
                assert total == 1


def test_float_level_matches_exact(pascal16):
    eq = pascal16.equipment
    for n in range(1, 17):
        f = eq.float_level(n)
        nums, dens = eq.exact_level(n)
        exact = np.array([p / q for p, q in zip(nums, dens)])
        assert np.max(np.abs(f - exact)) < 1e-14


def test_float_level_deep_graph_stays_finite():
    # dimension magnitudes at these levels overflow float64 badly; the
    # weights must still come out as clean ratios in (0, 1]
    g = pascal(2100)
    eq = central_equipment(g)
    w = eq.float_level(2100)
    assert np.all(np.isfinite(w)) and np.all(w > 0) and np.all(w <= 1)
    indptr, _ = g.pred_block(2100)
    sums = np.add.reduceat(w, indptr[:-1])
    assert np.max(np.abs(sums - 1.0)) < 1e-10
    mid = eq.weight(2099, 1049, 1050)
    assert mid == pytest.approx(0.5, abs=1e-9)


def test_cocycle_trivial_for_central(pascal8):
    paths = enumerate_paths(pascal8.graph, (0, 0), (6, 3))
    assert len(paths) == comb(6, 3)
    for p in paths[1:]:
        assert cocycle(pascal8, paths[0], p) == 1


def test_cocycle_detects_non_central(pascal8):
    g = pascal8.graph
    table = {}
    for n, u, v in g.edges():
        indptr, _ = g.pred_block(n + 1)
        deg = indptr[v + 1] - indptr[v]
        if deg == 1:
            table[(n, u, v)] = Fraction(1)
        else:
            # biased split: first predecessor gets 1/3, second 2/3
            first = g.preds(n + 1, v)[0]
            table[(n, u, v)] = Fraction(1, 3) if u == first else Fraction(2, 3)
    eg = EquippedGraph(g, TableEquipment.from_map(g, table))
    assert not validate(eg)
    paths = enumerate_paths(g, (0, 0), (3, 1))
    vals = {cocycle(eg, paths[0], p) for p in paths}
    assert len(vals) > 1


def test_cocycle_requires_common_endpoints(pascal8):
    p1 = FinitePath(0, (0, 0, 1))
    p2 = FinitePath(0, (0, 1, 1))
    p3 = FinitePath(0, (0, 0, 0))
    assert cocycle(pascal8, p1, p2) == 1
    with pytest.raises(ValueError):
        cocycle(pascal8, p1, p3)  # different endpoints


def test_validate_flags_bad_tables(pascal8):
    g = pascal(2)
    bad_sum = {
        (0, 0, 0): Fraction(1),
        (0, 0, 1): Fraction(1),
        (1, 0, 0): Fraction(1),
        (1, 0, 1): Fraction(1, 3),
        (1, 1, 1): Fraction(1, 3),
        (1, 1, 2): Fraction(1),
    }
    eg = EquippedGraph(g, TableEquipment.from_map(g, bad_sum))
    rules = {v.rule for v in validate(eg)}
    assert "column sum != 1" in rules

    neg = dict(bad_sum)
    neg[(1, 0, 1)] = Fraction(4, 3)
    neg[(1, 1, 1)] = Fraction(-1, 3)
    eg = EquippedGraph(g, TableEquipment.from_map(g, neg))
    rules = {v.rule for v in validate(eg)}
    assert "non-positive weight" in rules


def test_validate_clean_graphs(pascal8, young6, pairs3):
    for eg in (pascal8, young6, pairs3):
        assert validate(eg) == []


def test_table_from_map_rejects_missing_edges():
    g = pascal(2)
    with pytest.raises((KeyError, ValueError)):
        TableEquipment.from_map(g, {(0, 0, 0): Fraction(1)})


def test_float_table_equipment():
    g = pascal(3)
    table = {(n, u, v): 0.5 if len(g.preds(n + 1, v)) == 2 else 1.0
             for n, u, v in g.edges()}
    eq = TableEquipment.from_map(g, table, exact=False)
    assert not eq.is_exact
    eg = EquippedGraph(g, eq)
    assert validate(eg) == []
    with pytest.raises(TypeError):
        eq.exact_level(1)


def test_equipped_graph_is_exact(pascal8):
    assert pascal8.is_exact
