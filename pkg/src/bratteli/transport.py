"""Kantorovich distances between finitely supported measures.

The production solver is a dense transportation network simplex (compiled
lane when available, pure-python fallback otherwise; exact rationals below a
support cap).  ``brute_force_kantorovich`` is an independent oracle that
exhaustively enumerates every basic feasible solution, i.e. every spanning
tree of the complete bipartite support graph, and takes the feasible
minimum; the two routes share no code.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from ._kernels import _py, solve_transport_float

__all__ = [
    "BRUTE_FORCE_SUPPORT_LIMIT",
    "Coupling",
    "EXACT_SUPPORT_LIMIT",
    "FiniteMetric",
    "brute_force_kantorovich",
    "kantorovich",
    "lipschitz_lower_bound",
]

EXACT_SUPPORT_LIMIT = 64
BRUTE_FORCE_SUPPORT_LIMIT = 5
FLOAT_TOL = 1e-9


class FiniteMetric:
    """Symmetric distance table over a finite point set.

    Exact tables hold Fractions in an object array; float tables are
    float64.  ``check`` verifies the metric axioms on demand (the triangle
    scan is cubic, so it is not run at construction).
    """

    def __init__(self, table, exact: Optional[bool] = None):
        arr = np.asarray(table)
        if exact is None:
            exact = arr.dtype == object
        self.is_exact = exact
        if exact:
            self.table = np.empty(arr.shape, dtype=object)
            for i in range(arr.shape[0]):
                for j in range(arr.shape[1]):
                    x = arr[i, j]
                    self.table[i, j] = x if isinstance(x, Fraction) else Fraction(x)
        else:
            self.table = arr.astype(np.float64)
        if self.table.ndim != 2 or self.table.shape[0] != self.table.shape[1]:
            raise ValueError("distance table must be square")

    @property
    def size(self) -> int:
        return self.table.shape[0]

    def __getitem__(self, ij):
        return self.table[ij]

    def as_float(self) -> "FiniteMetric":
        if not self.is_exact:
            return self
        out = np.array(
            [[float(x) for x in row] for row in self.table], dtype=np.float64
        )
        return FiniteMetric(out, exact=False)

    def scale(self, c) -> "FiniteMetric":
        if self.is_exact:
            c = c if isinstance(c, Fraction) else Fraction(c)
        return FiniteMetric(self.table * c, exact=self.is_exact)

    def check(self, tol: float = FLOAT_TOL) -> list[str]:
        """Zero diagonal, symmetry, triangle inequality (within tol for
        float tables, exactly for rational ones)."""
        D = self.table if not self.is_exact else self.as_float().table
        out = []
        if np.abs(np.diagonal(D)).max(initial=0.0) > tol:
            out.append("nonzero diagonal")
        if D.size and np.abs(D - D.T).max() > tol:
            out.append("asymmetric")
        if D.size and D.min() < -tol:
            out.append("negative distance")
        n = self.size
        for k in range(n):
            slack = D[:, [k]] + D[[k], :] - D
            if slack.min() < -tol:
                out.append(f"triangle inequality fails through point {k}")
                break
        return out


@dataclass(frozen=True)
class Coupling:
    """Joint weights over the product of two supports; rows and columns are
    indices into the ground point set."""

    row_points: tuple[int, ...]
    col_points: tuple[int, ...]
    table: np.ndarray

    def transpose(self) -> "Coupling":
        return Coupling(self.col_points, self.row_points, self.table.T)

    def marginals(self):
        s1 = self.table.sum(axis=1)
        s2 = self.table.sum(axis=0)
        return s1, s2

    def check(self, w1, w2, tol: float = 1e-10) -> bool:
        s1, s2 = self.marginals()
        r1 = [w1[p] for p in self.row_points]
        r2 = [w2[p] for p in self.col_points]
        if self.table.dtype == object:
            return list(s1) == r1 and list(s2) == r2 and all(
                x >= 0 for x in self.table.ravel()
            )
        return (
            float(np.abs(s1 - np.asarray(r1, dtype=np.float64)).max(initial=0)) <= tol
            and float(np.abs(s2 - np.asarray(r2, dtype=np.float64)).max(initial=0)) <= tol
            and float(self.table.min(initial=0)) >= -tol
        )


def _is_exact_weights(w) -> bool:
    return all(isinstance(x, (Fraction, int)) for x in w)


def _prep_weights(w, size: int, exact: bool):
    if len(w) != size:
        raise ValueError(f"{len(w)} weights for {size} metric points")
    if exact:
        w = [x if isinstance(x, Fraction) else Fraction(x) for x in w]
        if any(x < 0 for x in w):
            raise ValueError("negative weight")
        if sum(w) != 1:
            raise ValueError(f"weights sum to {sum(w)}, expected 1")
        return w
    w = np.asarray(w, dtype=np.float64)
    if w.min(initial=0.0) < -FLOAT_TOL:
        raise ValueError("negative weight")
    total = float(w.sum())
    if abs(total - 1.0) > FLOAT_TOL:
        raise ValueError(f"weights sum to {total!r}, expected 1")
    w = np.clip(w, 0.0, None)
    return w / w.sum()


def _support(w, exact: bool):
    if exact:
        return [i for i, x in enumerate(w) if x > 0]
    return np.flatnonzero(w > 0.0).tolist()


def kantorovich(
    w1,
    w2,
    metric: FiniteMetric,
    mode: Optional[str] = None,
) -> tuple[Union[float, Fraction], Coupling]:
    """Optimal-transport distance between two weight vectors over the
    metric's points, with an optimal coupling.

    Arguments are ordered canonically before solving, so the distance is
    exactly symmetric.  Exact mode needs rational inputs and supports of at
    most ``EXACT_SUPPORT_LIMIT`` points.
    """
    if mode is None:
        mode = (
            "exact"
            if metric.is_exact and _is_exact_weights(w1) and _is_exact_weights(w2)
            else "float"
        )
    if mode not in ("exact", "float"):
        raise ValueError(f"unknown mode {mode!r}")
    exact = mode == "exact"
    if exact and not metric.is_exact:
        raise TypeError("exact transport needs an exact metric")
    M = metric if exact else metric.as_float()
    a = _prep_weights(w1, M.size, exact)
    b = _prep_weights(w2, M.size, exact)
    sup1 = _support(a, exact)
    sup2 = _support(b, exact)
    if exact and max(len(sup1), len(sup2)) > EXACT_SUPPORT_LIMIT:
        raise ValueError(
            f"exact transport limited to {EXACT_SUPPORT_LIMIT} support points;"
            " use float mode"
        )

    def key(sup, w):
        return (len(sup), tuple(sup), tuple(float(w[i]) for i in sup))

    swapped = key(sup2, b) < key(sup1, a)
    if swapped:
        a, b, sup1, sup2 = b, a, sup2, sup1

    aw = [a[i] for i in sup1]
    bw = [b[j] for j in sup2]
    D = M.table[np.ix_(sup1, sup2)]

    if len(sup1) == 1:
        dist = sum(x * d for x, d in zip(bw, D[0])) if exact else float(np.dot(bw, D[0]))
        table = np.array([bw], dtype=object if exact else np.float64)
    elif len(sup2) == 1:
        dist = sum(x * d for x, d in zip(aw, D[:, 0])) if exact else float(
            np.dot(aw, D[:, 0])
        )
        table = np.array([[x] for x in aw], dtype=object if exact else np.float64)
    elif exact:
        cost, cells = _py.solve_transport(aw, bw, [list(r) for r in D], Fraction(0))
        dist = cost
        table = np.full((len(sup1), len(sup2)), Fraction(0), dtype=object)
        for i, j, f in cells:
            if f > 0:
                table[i, j] += f
    else:
        cost, cells = solve_transport_float(
            np.asarray(aw), np.asarray(bw), D, FLOAT_TOL
        )
        dist = cost
        table = np.zeros((len(sup1), len(sup2)))
        for i, j, f in cells:
            if f > 0:
                table[i, j] += f

    cp = Coupling(tuple(sup1), tuple(sup2), table)
    if swapped:
        cp = cp.transpose()
    return dist, cp


def _mixed_radix_grid(length: int, base: int, reps_before: int, reps_after: int):
    """All sequences in base**length, as an int array tiled for a cartesian
    product: each sequence repeated ``reps_after`` times consecutively and
    the whole block tiled ``reps_before`` times."""
    count = base**length
    ids = np.arange(count, dtype=np.int64)
    digits = np.empty((count, length), dtype=np.int64)
    for pos in range(length - 1, -1, -1):
        digits[:, pos] = ids % base
        ids //= base
    digits = np.repeat(digits, reps_after, axis=0)
    return np.tile(digits, (reps_before, 1))


_TREE_CACHE: dict = {}


def _tree_structures(m: int, k: int):
    """Every spanning tree of the complete bipartite graph K_{m,k}, decoded
    once from the bipartite Pruefer codes and cached.

    Returns ``(Ms, cells)``: for each tree t and edge e, ``Ms[t, e]`` is the
    signed indicator of the subtree hanging below that edge (left vertices
    first, then right), so the basic flow on the edge is ``Ms[t, e] @ s``
    with ``s = (supplies, -demands)``; ``cells[t, e]`` is the flattened cost
    index of the edge.
    """
    key = (m, k)
    if key in _TREE_CACHE:
        return _TREE_CACHE[key]
    n_alpha = k ** (m - 1)
    n_beta = m ** (k - 1)
    T = n_alpha * n_beta
    # alpha: neighbors consumed when a left leaf is removed; beta: likewise
    # for right leaves; pad one column so exhausted pointers index harmlessly
    alpha = np.concatenate(
        [_mixed_radix_grid(m - 1, k, 1, n_beta), np.zeros((T, 1), dtype=np.int64)],
        axis=1,
    )
    beta = np.concatenate(
        [_mixed_radix_grid(k - 1, m, n_alpha, 1), np.zeros((T, 1), dtype=np.int64)],
        axis=1,
    )

    nn = m + k
    # removed vertices keep degree 0, so degree-1 scan needs no alive mask
    flat = (np.arange(T, dtype=np.int64)[:, None] * nn + m + alpha[:, : m - 1]).ravel()
    flat = np.concatenate(
        [flat, (np.arange(T, dtype=np.int64)[:, None] * nn + beta[:, : k - 1]).ravel()]
    )
    deg = (1 + np.bincount(flat, minlength=T * nn).reshape(T, nn)).astype(np.int16)

    memb = np.zeros((T, nn, nn), dtype=np.float64)
    memb[:, np.arange(nn), np.arange(nn)] = 1.0
    Ms = np.empty((T, nn - 1, nn), dtype=np.float64)
    cells = np.empty((T, nn - 1), dtype=np.int64)
    aptr = np.zeros(T, dtype=np.int64)
    bptr = np.zeros(T, dtype=np.int64)
    labels = np.arange(nn, dtype=np.int16)
    rows = np.arange(T)

    for e in range(nn - 2):
        cand = np.where(deg == 1, labels, nn)
        leaf = cand.argmin(axis=1)
        if (cand[rows, leaf] == nn).any():
            raise AssertionError("bipartite code decode got stuck")
        is_left = leaf < m
        nb = np.where(is_left, m + alpha[rows, aptr], beta[rows, bptr])
        aptr += is_left
        bptr += ~is_left
        sub = memb[rows, leaf]
        Ms[:, e, :] = np.where(is_left[:, None], sub, -sub)
        ii = np.where(is_left, leaf, nb)
        jj = np.where(is_left, nb, leaf) - m
        cells[:, e] = ii * k + jj
        memb[rows, nb] += sub
        deg[rows, leaf] = 0
        deg[rows, nb] -= 1

    # the final edge joins the last left and right survivors (both keep
    # degree one)
    cand = np.where(deg == 1, labels, nn)
    left_last = cand[:, :m].min(axis=1).astype(np.int64)
    right_last = cand[:, m:].min(axis=1).astype(np.int64)
    if (left_last >= m).any() or (right_last >= nn).any():
        raise AssertionError("bipartite code decode lost its last edge")
    Ms[:, nn - 2, :] = memb[rows, left_last]
    cells[:, nn - 2] = left_last * k + right_last - m
    _TREE_CACHE[key] = (Ms, cells)
    return Ms, cells


def brute_force_kantorovich(w1, w2, metric: FiniteMetric, tol: float = 1e-12) -> float:
    """Exhaustive minimum over all vertices of the transportation polytope.

    Every basic solution corresponds to a spanning tree of the complete
    bipartite graph on the two supports; trees are enumerated through the
    bipartite analogue of the Pruefer code (a pair of free sequences) and
    solved in one vectorized batch per instance.  Supports are capped at
    ``BRUTE_FORCE_SUPPORT_LIMIT`` points.
    """
    M = metric.as_float()
    a = _prep_weights(np.asarray(w1, dtype=np.float64), M.size, exact=False)
    b = _prep_weights(np.asarray(w2, dtype=np.float64), M.size, exact=False)
    sup1 = np.flatnonzero(a > 0.0)
    sup2 = np.flatnonzero(b > 0.0)
    m, k = len(sup1), len(sup2)
    if max(m, k) > BRUTE_FORCE_SUPPORT_LIMIT:
        raise ValueError(
            f"brute force limited to supports of {BRUTE_FORCE_SUPPORT_LIMIT} points"
        )
    aw = a[sup1]
    bw = b[sup2]
    C = M.table[np.ix_(sup1, sup2)]
    if m == 1:
        return float(np.dot(bw, C[0]))
    if k == 1:
        return float(np.dot(aw, C[:, 0]))

    Ms, cells = _tree_structures(m, k)
    s = np.concatenate([aw, -bw])
    x = Ms @ s  # (T, edges): basic flow on every edge of every tree
    feasible = (x >= -tol).all(axis=1)
    cost = (np.ascontiguousarray(C).ravel()[cells] * x).sum(axis=1)
    return float(np.where(feasible, cost, np.inf).min())


def lipschitz_lower_bound(w1, w2, metric: FiniteMetric, f: Sequence, tol: float = 1e-12):
    """Duality probe: integrates a 1-Lipschitz function against the two
    measures; the result can never exceed the transport distance."""
    exact = metric.is_exact and _is_exact_weights(w1) and _is_exact_weights(w2) and all(
        isinstance(x, (Fraction, int)) for x in f
    )
    if len(f) != metric.size:
        raise ValueError("function length must match metric size")
    if exact:
        fv = [x if isinstance(x, Fraction) else Fraction(x) for x in f]
        for i in range(metric.size):
            for j in range(metric.size):
                if abs(fv[i] - fv[j]) > metric.table[i, j]:
                    raise ValueError(f"function is not 1-Lipschitz at ({i},{j})")
        a = _prep_weights(w1, metric.size, True)
        b = _prep_weights(w2, metric.size, True)
        return sum(x * (p - q) for x, p, q in zip(fv, a, b))
    M = metric.as_float()
    fv = np.asarray(f, dtype=np.float64)
    gap = np.abs(fv[:, None] - fv[None, :]) - M.table
    if float(gap.max(initial=0.0)) > tol:
        raise ValueError("function is not 1-Lipschitz")
    a = _prep_weights(np.asarray(w1, dtype=np.float64), M.size, False)
    b = _prep_weights(np.asarray(w2, dtype=np.float64), M.size, False)
    return float(np.dot(fv, a - b))
