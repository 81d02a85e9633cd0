"""Pure-python transport kernels.

Reference implementations of the hot numeric kernels.  A compiled twin of
the float paths lives in ``_fast`` (built from ``_fast.pyx``); this module is
the always-available fallback and the exact-arithmetic work horse.

``solve_transport`` is a dense transportation network simplex over any
ordered field: floats with a small optimality tolerance, or
``fractions.Fraction`` with ``tol=0`` for exact answers.  Pivots follow
Bland-style lowest-index rules on both the entering and the leaving side, so
runs are deterministic and cycling-free.
"""

from __future__ import annotations

import numpy as np

MAX_PIVOTS = 200_000


def solve_transport(a, b, C, tol):
    """Minimize sum C[i][j] x[i][j] over the transportation polytope.

    a, b: positive supplies/demands with equal totals (lists of floats or
    Fractions).  C: row-major cost table (list of rows).  Returns
    ``(cost, cells)`` where cells is a list of basic ``(i, j, flow)``
    triples spanning the bipartite graph.
    """
    m, k = len(a), len(b)
    zero = a[0] - a[0]  # additive zero of the scalar type in use

    # northwest-corner start: always a spanning-tree basis of m+k-1 cells,
    # advancing a single coordinate per step (zero flows allowed)
    ci, cj, cf = [], [], []
    i = j = 0
    ra, rb = list(a), list(b)
    while True:
        t = ra[i] if ra[i] <= rb[j] else rb[j]
        if t < zero:
            t = zero
        ci.append(i)
        cj.append(j)
        cf.append(t)
        ra[i] -= t
        rb[j] -= t
        if i == m - 1 and j == k - 1:
            break
        if (ra[i] <= rb[j] and i < m - 1) or j == k - 1:
            i += 1
        else:
            j += 1

    for _ in range(MAX_PIVOTS):
        nb = len(ci)
        rows = [[] for _ in range(m)]
        cols = [[] for _ in range(k)]
        for t in range(nb):
            rows[ci[t]].append(t)
            cols[cj[t]].append(t)

        # duals on the basis tree, rooted at row 0
        u = [None] * m
        v = [None] * k
        u[0] = zero
        stack = [(0, True)]
        while stack:
            node, is_row = stack.pop()
            for t in rows[node] if is_row else cols[node]:
                if is_row:
                    if v[cj[t]] is None:
                        v[cj[t]] = C[node][cj[t]] - u[node]
                        stack.append((cj[t], False))
                else:
                    if u[ci[t]] is None:
                        u[ci[t]] = C[ci[t]][node] - v[node]
                        stack.append((ci[t], True))

        # entering cell: first negative reduced cost in row-major order
        enter = None
        for ei in range(m):
            Ci, ui = C[ei], u[ei]
            for ej in range(k):
                if Ci[ej] - ui - v[ej] < -tol:
                    enter = (ei, ej)
                    break
            if enter:
                break
        if enter is None:
            break
        ei, ej = enter

        # unique tree path from row ei to column ej; cells alternate signs
        # starting with minus, so the entering cell can take flow theta
        parent = {}
        seen_r = [False] * m
        seen_c = [False] * k
        seen_r[ei] = True
        frontier = [(ei, True)]
        while frontier:
            nxt = []
            for node, is_row in frontier:
                for t in rows[node] if is_row else cols[node]:
                    if is_row:
                        c = cj[t]
                        if not seen_c[c]:
                            seen_c[c] = True
                            parent[("c", c)] = (t, ("r", node))
                            nxt.append((c, False))
                    else:
                        r = ci[t]
                        if not seen_r[r]:
                            seen_r[r] = True
                            parent[("r", r)] = (t, ("c", node))
                            nxt.append((r, True))
            if seen_c[ej]:
                break
            frontier = nxt
        path = []
        cur = ("c", ej)
        while cur != ("r", ei):
            t, prev = parent[cur]
            path.append(t)
            cur = prev
        path.reverse()
        minus = path[0::2]

        theta = None
        leave = None
        for t in minus:
            f = cf[t]
            if theta is None or f < theta or (
                f == theta and (ci[t], cj[t]) < (ci[leave], cj[leave])
            ):
                if theta is None or f < theta:
                    theta, leave = f, t
                else:
                    leave = t
        for idx, t in enumerate(path):
            cf[t] = cf[t] - theta if idx % 2 == 0 else cf[t] + theta
        ci[leave], cj[leave], cf[leave] = ei, ej, theta
    else:
        raise RuntimeError("transport simplex failed to converge")

    cost = zero
    for t in range(len(ci)):
        if cf[t] > zero:
            cost += C[ci[t]][cj[t]] * cf[t]
    return cost, list(zip(ci, cj, cf))


def _pair_cost_bounds(a1, b1):
    lo = np.maximum(0.0, a1 + b1 - 1.0)
    hi = np.minimum(a1, b1)
    return lo, hi


def transfer_table_2(sup_idx: np.ndarray, sup_w: np.ndarray, D: np.ndarray) -> np.ndarray:
    """Pairwise transport distances between S columns supported on at most
    two points each.

    sup_idx: (S, 2) point indices (duplicate the point when the support is a
    singleton); sup_w: (S, 2) weights summing to one per row; D: ground
    distance table.  Exploits that the 2x2 transportation cost is linear in
    the single free coupling parameter, so only the two endpoint couplings
    need evaluating.
    """
    p1, p2 = sup_idx[:, 0], sup_idx[:, 1]
    a1 = sup_w[:, 0]
    n = len(p1)
    q1, q2 = p1[None, :], p2[None, :]
    b1 = a1[None, :]
    P1, P2, A1 = p1[:, None], p2[:, None], a1[:, None]
    d11 = D[P1, q1]
    d12 = D[P1, q2]
    d21 = D[P2, q1]
    d22 = D[P2, q2]
    lo, hi = _pair_cost_bounds(A1, b1)
    base = A1 * d12 + b1 * d21 + (1.0 - A1 - b1) * d22
    slope = d11 - d12 - d21 + d22
    out = np.maximum(np.minimum(base + lo * slope, base + hi * slope), 0.0)
    # mirror the upper triangle so symmetry is exact, not just up to rounding
    out = np.triu(out, 1)
    return out + out.T


def transfer_rows_2(
    centers: np.ndarray, sup_idx: np.ndarray, sup_w: np.ndarray, D: np.ndarray
) -> np.ndarray:
    """Rows of :func:`transfer_table_2` for the given center columns only."""
    p1 = sup_idx[centers, 0][:, None]
    p2 = sup_idx[centers, 1][:, None]
    a1 = sup_w[centers, 0][:, None]
    q1, q2 = sup_idx[:, 0][None, :], sup_idx[:, 1][None, :]
    b1 = sup_w[:, 0][None, :]
    d11 = D[p1, q1]
    d12 = D[p1, q2]
    d21 = D[p2, q1]
    d22 = D[p2, q2]
    lo, hi = _pair_cost_bounds(a1, b1)
    base = a1 * d12 + b1 * d21 + (1.0 - a1 - b1) * d22
    slope = d11 - d12 - d21 + d22
    out = np.maximum(np.minimum(base + lo * slope, base + hi * slope), 0.0)
    out[np.arange(len(centers)), centers] = 0.0
    return out
