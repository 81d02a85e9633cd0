from fractions import Fraction
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bratteli import (
    LevelFunction,
    LevelMeasure,
    count_paths,
    delta,
    dimensions,
    inner,
    lift_function,
    lower_measure,
    markov_matrix,
    martin_kernel,
    tv_distance,
    uniform,
    vertex_measure,
)


def test_lower_measure_matches_markov_matrix(pascal8, young6):
    for eg in (pascal8, young6):
        g = eg.graph
        for n in range(2, g.depth):
            mu = uniform(g, n)
            lowered = lower_measure(eg, mu)
            M = markov_matrix(eg, n - 1).to_dense(mode="exact")
            by_matrix = [
                sum(M[u][v] * mu.weights[v] for v in range(g.level_size(n)))
                for u in range(g.level_size(n - 1))
            ]
            assert list(lowered.weights) == by_matrix


def test_markov_matrix_columns(pascal8):
    M = markov_matrix(pascal8, 4)  # between levels 4 and 5
    assert M.shape == (5, 6)
    sums = M.column_sums()
    assert all(s == 1 for s in sums)
    idx, w = M.column(2)
    assert sorted(idx) == [1, 2]
    assert sum(w) == 1


def test_vertex_measure_path_count_oracle(pascal8, young6):
    """Central projected measures are path counts weighted by dimensions:
    mu_v^k(u) = N(u,v) dim(u) / dim(v)."""
    for eg in (pascal8, young6):
        g = eg.graph
        dims = dimensions(g)
        for v_level, k in [(4, 2), (5, 1), (6, 3)]:
            for v_idx in range(g.level_size(v_level)):
                mu = vertex_measure(eg, (v_level, v_idx), k, mode="exact")
                for u_idx in range(g.level_size(k)):
                    expect = Fraction(
                        count_paths(g, (k, u_idx), (v_level, v_idx))
                        * dims[k][u_idx],
                        dims[v_level][v_idx],
                    )
                    assert mu.weights[u_idx] == expect


def test_vertex_measure_hypergeometric(pascal16):
    for n, k in [(10, 4), (13, 7)]:
        for m in (1, 2, 5):
            mu = vertex_measure(pascal16, (n, k), m, mode="exact")
            for j in range(m + 1):
                hi = comb(m, j) * comb(n - m, k - j) if 0 <= k - j <= n - m else 0
                assert mu.weights[j] == Fraction(hi, comb(n, k))


def test_vertex_measure_float_agrees(pascal16):
    mu_e = vertex_measure(pascal16, (12, 5), 3, mode="exact")
    mu_f = vertex_measure(pascal16, (12, 5), 3, mode="float")
    assert np.max(np.abs(mu_e.as_floats() - mu_f.as_floats())) < 1e-12


def test_martin_kernel_equals_vertex_measure(pascal8, young6):
    for eg in (pascal8, young6):
        g = eg.graph
        for u_level in (1, 2, 3):
            for gap in (1, 2, 3):
                v_level = u_level + gap
                for u in range(g.level_size(u_level)):
                    for v in range(g.level_size(v_level)):
                        got = martin_kernel(eg, (u_level, u), (v_level, v),
                                            mode="exact")
                        want = vertex_measure(
                            eg, (v_level, v), u_level, mode="exact"
                        ).weights[u]
                        assert got == want


def test_martin_kernel_same_vertex(pascal8):
    assert martin_kernel(pascal8, (3, 1), (3, 1), mode="exact") == 1
    assert martin_kernel(pascal8, (3, 1), (3, 2), mode="exact") == 0


def test_martin_kernel_float_route(pascal16):
    e = martin_kernel(pascal16, (2, 1), (14, 6), mode="exact")
    f = martin_kernel(pascal16, (2, 1), (14, 6), mode="float")
    assert f == pytest.approx(float(e), rel=1e-12)


def test_lift_lower_adjoint(pascal8):
    """E_{lowered mu}[f] = E_mu[lifted f], the defining duality."""
    g = pascal8.graph
    f = LevelFunction(3, [Fraction(i * i) for i in range(4)])
    mu = LevelMeasure(4, [Fraction(1, 10), Fraction(2, 10), Fraction(3, 10),
                          Fraction(2, 10), Fraction(2, 10)])
    lifted = lift_function(pascal8, f)
    assert lifted.level == 4
    assert inner(f, lower_measure(pascal8, mu)) == inner(lifted, mu)


@given(st.lists(st.integers(0, 9), min_size=6, max_size=6).filter(lambda x: sum(x) > 0))
@settings(max_examples=40, deadline=None)
def test_lowering_preserves_mass_and_composes(xs):
    from bratteli.zoo import pascal
    from bratteli import EquippedGraph, central_equipment

    g = pascal(6)
    eg = EquippedGraph(g, central_equipment(g))
    total = sum(xs)
    mu = LevelMeasure(5, [Fraction(x, total) for x in xs])
    one = lower_measure(eg, mu)
    assert sum(one.weights) == 1
    two = lower_measure(eg, one)
    # composing single steps equals the two-step projection
    from bratteli.simplex import project

    assert project(eg, mu, 3).weights == two.weights


def test_compensated_float_lowering_deep():
    from bratteli.zoo import pascal
    from bratteli import EquippedGraph, central_equipment

    g = pascal(300)
    eg = EquippedGraph(g, central_equipment(g))
    exact = vertex_measure(eg, (300, 150), 2, mode="exact").as_floats()
    fl = vertex_measure(eg, (300, 150), 2, mode="float").as_floats()
    assert np.max(np.abs(exact - fl)) < 1e-10
