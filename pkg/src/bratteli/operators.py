"""Averaging and projection operators on an equipped graph.

``lift_function`` averages a level-n function up one level using the
cotransition weights; ``lower_measure`` is its adjoint and pushes a
probability measure down one level.  Iterating the projection from a point
mass produces the vertex measures, and reading a single entry of such a
measure gives the Martin kernel.

Projected vertex measures are never computed by path enumeration; the exact
route for central equipment uses a path-count recursion against the exact
dimension vectors, and the generic route is iterated projection.  Path
enumeration lives in :mod:`bratteli.graph` purely as a test oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .equipment import CentralEquipment, EquippedGraph
from .graph import GradedGraph, VertexId
from .measures import LevelFunction, LevelMeasure, delta

__all__ = [
    "MAX_RATIONAL_GAP",
    "MarkovMatrix",
    "lift_function",
    "lower_measure",
    "markov_matrix",
    "martin_kernel",
    "vertex_measure",
]

MAX_RATIONAL_GAP = 12

# compensated accumulation is quadratic-ish in python; above this many edges
# fall back to numpy's sequential accumulation (error ~ degree * eps)
COMPENSATED_EDGE_LIMIT = 1 << 16


def _check_mode(eg: EquippedGraph, mode: Optional[str]) -> str:
    if mode is None:
        return "exact" if eg.is_exact else "float"
    if mode not in ("exact", "float"):
        raise ValueError(f"mode must be 'exact' or 'float', got {mode!r}")
    if mode == "exact" and not eg.is_exact:
        raise TypeError("exact mode requested on float-valued equipment")
    return mode


def lift_function(eg: EquippedGraph, f: LevelFunction) -> LevelFunction:
    """Average f up one level: (lift f)(v) = sum_{u -> v} lambda_v^u f(u)."""
    g = eg.graph
    n = f.level + 1
    if n >= g.depth:
        raise ValueError(f"cannot lift from level {f.level}: no level {n}")
    if len(f) != g.level_size(f.level):
        raise ValueError("function size does not match level")
    indptr, indices = g.pred_block(n)
    if f.is_exact:
        if not eg.is_exact:
            raise TypeError("exact function over float-valued equipment")
        out = []
        for v in range(g.level_size(n)):
            idx, w = eg.equipment.exact_column(n, v)
            out.append(sum(wi * f.values[int(u)] for u, wi in zip(idx, w)))
        return LevelFunction(n, out)
    w = eg.equipment.float_level(n)
    contrib = w * f.values[indices]
    counts = np.diff(indptr)
    if np.all(counts > 0):
        out = np.add.reduceat(contrib, indptr[:-1].astype(np.intp))
    else:
        out = np.zeros(g.level_size(n))
        np.add.at(out, np.repeat(np.arange(len(counts)), counts), contrib)
    return LevelFunction(n, out, exact=False)


def _lower_exact(eg: EquippedGraph, mu: LevelMeasure) -> LevelMeasure:
    g = eg.graph
    n = mu.level
    indptr, indices = g.pred_block(n)
    out = [Fraction(0)] * g.level_size(n - 1)
    for v in mu.support():
        idx, w = eg.equipment.exact_column(n, v)
        mv = mu.weights[v]
        for u, wi in zip(idx, w):
            out[int(u)] += wi * mv
    return LevelMeasure(n - 1, out, check=False)


def _lower_float(eg: EquippedGraph, weights: np.ndarray, n: int, compensated: bool) -> np.ndarray:
    """One float projection step of a weight vector at level n down to n-1."""
    g = eg.graph
    indptr, indices = g.pred_block(n)
    w = eg.equipment.float_level(n)
    contrib = w * np.repeat(weights, np.diff(indptr))
    prev_size = g.level_size(n - 1)
    if compensated and len(indices) <= COMPENSATED_EDGE_LIMIT:
        order = np.argsort(indices, kind="stable")
        tgt = indices[order]
        vals = contrib[order]
        out = np.zeros(prev_size)
        lo = 0
        while lo < len(tgt):
            hi = lo
            while hi < len(tgt) and tgt[hi] == tgt[lo]:
                hi += 1
            out[tgt[lo]] = math.fsum(vals[lo:hi])
            lo = hi
        return out
    return np.bincount(indices, weights=contrib, minlength=prev_size)


def lower_measure(eg: EquippedGraph, mu: LevelMeasure, compensated: bool = False) -> LevelMeasure:
    """Project mu down one level: (lower mu)(u) = sum_{u -> v} lambda_v^u mu(v)."""
    g = eg.graph
    n = mu.level
    if n < 1 or n >= g.depth:
        raise ValueError(f"cannot lower from level {n}")
    if len(mu) != g.level_size(n):
        raise ValueError("measure size does not match level")
    if mu.is_exact:
        if not eg.is_exact:
            raise TypeError("exact measure over float-valued equipment")
        return _lower_exact(eg, mu)
    out = _lower_float(eg, mu.weights, n, compensated)
    return LevelMeasure(n - 1, out, exact=False, check=False)


def _counts_to(g: GradedGraph, v: VertexId, k: int) -> list[int]:
    """Exact path counts from every level-k vertex up to v."""
    c = [0] * g.level_size(v.level)
    c[v.index] = 1
    for n in range(v.level, k, -1):
        indptr, indices = g.pred_block(n)
        ip = indptr.tolist()
        ix = indices.tolist()
        prev = [0] * g.level_size(n - 1)
        for w, cw in enumerate(c):
            if cw:
                for e in range(ip[w], ip[w + 1]):
                    prev[ix[e]] += cw
        c = prev
    return c


def vertex_measure(eg: EquippedGraph, v: VertexId, k: int, mode: Optional[str] = None) -> LevelMeasure:
    """The level-k measure obtained by projecting the point mass at v down
    level(v) - k times."""
    g = eg.graph
    v = g.check_vertex(v)
    if k < 0 or k >= v.level:
        raise ValueError(f"target level {k} must lie in [0, {v.level})")
    mode = _check_mode(eg, mode)
    if mode == "exact" and isinstance(eg.equipment, CentralEquipment):
        # mu_v^k(u) = N(u, v) dim(u) / dim(v); the change of variables keeps
        # the whole recursion in integers
        counts = _counts_to(g, v, k)
        dims_k = eg.equipment.dims_at(k)
        dim_v = eg.equipment.dims_at(v.level)[v.index]
        out = [Fraction(c * d, dim_v) for c, d in zip(counts, dims_k)]
        return LevelMeasure(k, out, check=False)
    if mode == "exact":
        mu = delta(g, v, exact=True)
        for _ in range(v.level - k):
            mu = _lower_exact(eg, mu)
        return mu
    w = np.zeros(g.level_size(v.level))
    w[v.index] = 1.0
    for n in range(v.level, k, -1):
        w = _lower_float(eg, w, n, compensated=False)
    return LevelMeasure(k, w, exact=False, check=False)


def martin_kernel(
    eg: EquippedGraph,
    u: VertexId,
    v: VertexId,
    mode: Optional[str] = None,
    max_rational_gap: int = MAX_RATIONAL_GAP,
):
    """Sum over paths u -> v of the product of cotransition weights.

    Equals the u-entry of the projected vertex measure of v; computed by
    iterated projection.  With no mode given, rational arithmetic is used up
    to ``max_rational_gap`` levels of gap and floats beyond (compensated
    accumulation on small levels).
    """
    g = eg.graph
    u = g.check_vertex(u)
    v = g.check_vertex(v)
    gap = v.level - u.level
    if gap < 0:
        raise ValueError("martin_kernel needs level(u) <= level(v)")
    if mode is None:
        mode = "exact" if eg.is_exact and gap <= max_rational_gap else "float"
    mode = _check_mode(eg, mode)
    if gap == 0:
        hit = u.index == v.index
        return Fraction(1 if hit else 0) if mode == "exact" else float(hit)
    if mode == "exact":
        mu = delta(g, v, exact=True)
        for _ in range(gap):
            mu = _lower_exact(eg, mu)
        return mu.weights[u.index]
    w = np.zeros(g.level_size(v.level))
    w[v.index] = 1.0
    for n in range(v.level, u.level, -1):
        w = _lower_float(eg, w, n, compensated=True)
    return float(w[u.index])


@dataclass(frozen=True)
class MarkovMatrix:
    """Cotransition weights between consecutive levels in column form.

    Column v lists the predecessors of upper-level vertex v with their
    weights; every column sums to one.  ``shape`` is (lower size, upper size).
    """

    n: int
    shape: tuple[int, int]
    indptr: np.ndarray
    indices: np.ndarray
    weights: np.ndarray
    exact_weights: Optional[tuple] = None

    @property
    def is_exact(self) -> bool:
        return self.exact_weights is not None

    def column(self, v: int):
        lo, hi = self.indptr[v], self.indptr[v + 1]
        if self.is_exact:
            return self.indices[lo:hi], self.exact_weights[lo:hi]
        return self.indices[lo:hi], self.weights[lo:hi]

    def to_dense(self, mode: str = "float"):
        d_n, d_up = self.shape
        if mode == "float":
            out = np.zeros((d_n, d_up))
            for v in range(d_up):
                idx, w = self.indices, self.weights
                lo, hi = self.indptr[v], self.indptr[v + 1]
                out[idx[lo:hi], v] = w[lo:hi]
            return out
        if not self.is_exact:
            raise TypeError("no exact weights stored")
        out = np.full((d_n, d_up), Fraction(0), dtype=object)
        for v in range(d_up):
            lo, hi = self.indptr[v], self.indptr[v + 1]
            for e in range(lo, hi):
                out[self.indices[e], v] = self.exact_weights[e]
        return out

    def column_sums(self):
        if self.is_exact:
            return [
                sum(self.exact_weights[self.indptr[v] : self.indptr[v + 1]], Fraction(0))
                for v in range(self.shape[1])
            ]
        sums = np.zeros(self.shape[1])
        counts = np.diff(self.indptr)
        np.add.at(sums, np.repeat(np.arange(self.shape[1]), counts), self.weights)
        return sums


def markov_matrix(eg: EquippedGraph, n: int) -> MarkovMatrix:
    """The weight matrix between levels n and n+1."""
    g = eg.graph
    if n < 0 or n + 1 >= g.depth:
        raise ValueError(f"no levels {n}, {n + 1}")
    indptr, indices = g.pred_block(n + 1)
    floats = eg.equipment.float_level(n + 1)
    exact = None
    if eg.is_exact:
        nums, dens = eg.equipment.exact_level(n + 1)
        exact = tuple(Fraction(p, q) for p, q in zip(nums, dens))
    return MarkovMatrix(
        n=n,
        shape=(g.level_size(n), g.level_size(n + 1)),
        indptr=indptr,
        indices=indices,
        weights=floats,
        exact_weights=exact,
    )
