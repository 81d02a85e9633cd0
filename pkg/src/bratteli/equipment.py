"""Cotransition equipment on graded graphs.

An equipment assigns to every edge u -> v a weight lambda_v^u, read as the
probability of being at u given that the next level lands at v; the weights
into each vertex sum to one.  Two value models are supported and never mixed
silently:

* exact mode: every weight is a rational number (``fractions.Fraction``),
* float mode: every weight is a 64-bit float.

``TableEquipment`` stores the weights explicitly.  ``CentralEquipment`` is
the canonical equipment lambda_v^u = dim(u)/dim(v) (dim = exact path count
from the initial vertex); it is kept lazy so that deep graphs never
materialize millions of big rationals.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

import numpy as np

from .graph import FinitePath, GradedGraph, VertexId

__all__ = [
    "CentralEquipment",
    "EquippedGraph",
    "TableEquipment",
    "Violation",
    "central_equipment",
    "cocycle",
    "validate",
]

FLOAT_COLUMN_TOL = 1e-12


@dataclass(frozen=True)
class Violation:
    rule: str
    location: str
    detail: str = ""

    def __str__(self):
        msg = f"{self.rule} at {self.location}"
        return f"{msg}: {self.detail}" if self.detail else msg


def _ratio_to_float(num: int, den: int) -> float:
    try:
        return num / den
    except OverflowError:
        # big-int ratio: scale through a 64-bit window
        return (num << 64) // den / 18446744073709551616.0


class TableEquipment:
    """Explicit per-edge weights aligned with the graph's predecessor arrays.

    ``nums[n]``/``dens[n]`` (exact mode) or ``floats[n]`` (float mode) follow
    the same edge order as ``graph.pred_block(n)``.
    """

    def __init__(self, graph: GradedGraph, nums=None, dens=None, floats=None):
        self.graph = graph
        if (nums is None) == (floats is None):
            raise ValueError("provide exactly one of rational or float weights")
        self.is_exact = floats is None
        self._nums = nums
        self._dens = dens
        self._floats = floats
        for n in range(1, graph.depth):
            want = graph.edge_count(n - 1)
            got = len(self._floats[n - 1]) if floats is not None else len(self._nums[n - 1])
            if got != want:
                raise ValueError(f"level {n}: {got} weights for {want} edges")

    @classmethod
    def from_map(cls, graph: GradedGraph, weights, exact: bool = True):
        """Build from a mapping ``(n, u, v) -> weight``.

        In exact mode weights may be Fractions, ints, or (num, den) pairs.
        """
        nums, dens, floats = [], [], []
        for n in range(1, graph.depth):
            indptr, indices = graph.pred_block(n)
            col_n, col_d, col_f = [], [], []
            for v in range(graph.level_size(n)):
                for e in range(indptr[v], indptr[v + 1]):
                    w = weights[(n - 1, int(indices[e]), v)]
                    if exact:
                        if isinstance(w, tuple):
                            w = Fraction(w[0], w[1])
                        else:
                            w = Fraction(w)
                        # int() strips numpy integer types that would later
                        # poison exact arithmetic and JSON export
                        col_n.append(int(w.numerator))
                        col_d.append(int(w.denominator))
                    else:
                        col_f.append(float(w))
            if exact:
                nums.append(col_n)
                dens.append(col_d)
            else:
                floats.append(np.asarray(col_f, dtype=np.float64))
        if exact:
            return cls(graph, nums=nums, dens=dens)
        return cls(graph, floats=floats)

    # -- access -------------------------------------------------------------

    def exact_level(self, n: int):
        """Per-edge (numerators, denominators) for edges into level n."""
        if not self.is_exact:
            raise TypeError("float-valued equipment has no exact weights")
        return self._nums[n - 1], self._dens[n - 1]

    def float_level(self, n: int) -> np.ndarray:
        if self.is_exact:
            nums, dens = self._nums[n - 1], self._dens[n - 1]
            return np.array(
                [_ratio_to_float(p, q) for p, q in zip(nums, dens)], dtype=np.float64
            )
        return self._floats[n - 1]

    def weight(self, n: int, u: int, v: int):
        """Weight of the edge from (n,u) to (n+1,v); Fraction in exact mode."""
        indptr, indices = self.graph.pred_block(n + 1)
        for e in range(indptr[v], indptr[v + 1]):
            if indices[e] == u:
                if self.is_exact:
                    return Fraction(self._nums[n][e], self._dens[n][e])
                return float(self._floats[n][e])
        raise KeyError(f"no edge from ({n},{u}) to ({n+1},{v})")

    def exact_column(self, n: int, v: int) -> tuple[np.ndarray, tuple[Fraction, ...]]:
        """Predecessor indices and exact weights of vertex (n, v)."""
        indptr, indices = self.graph.pred_block(n)
        nums, dens = self.exact_level(n)
        lo, hi = indptr[v], indptr[v + 1]
        return indices[lo:hi], tuple(Fraction(nums[e], dens[e]) for e in range(lo, hi))

    def float_column(self, n: int, v: int):
        indptr, indices = self.graph.pred_block(n)
        w = self.float_level(n)
        lo, hi = indptr[v], indptr[v + 1]
        return indices[lo:hi], w[lo:hi]


class CentralEquipment:
    """The central equipment lambda_v^u = dim(u)/dim(v), evaluated lazily.

    Exact dimension vectors are streamed level by level; checkpoints every
    ``checkpoint_stride`` levels keep recomputation cheap without holding all
    levels' big integers at once.
    """

    checkpoint_stride = 256

    def __init__(self, graph: GradedGraph):
        self.graph = graph
        self.is_exact = True
        self._checkpoints: dict[int, list[int]] = {0: [1]}
        self._log_dims: Optional[list[np.ndarray]] = None

    # -- exact dimension streaming -------------------------------------------

    def _dims_step(self, dims, n):
        indptr, indices = self.graph.pred_block(n)
        arr = np.empty(len(dims), dtype=object)
        arr[:] = dims
        gathered = arr[indices]
        if np.all(np.diff(indptr) > 0):
            out = np.add.reduceat(gathered, indptr[:-1].astype(np.intp))
            return list(out)
        out = [0] * self.graph.level_size(n)
        for v in range(len(out)):
            s = 0
            for e in range(indptr[v], indptr[v + 1]):
                s += dims[indices[e]]
            out[v] = s
        return out

    def dims_at(self, n: int) -> list[int]:
        """Exact dimensions of all vertices at level n."""
        if n in self._checkpoints:
            return self._checkpoints[n]
        base = max(k for k in self._checkpoints if k <= n)
        dims = self._checkpoints[base]
        for lev in range(base + 1, n + 1):
            dims = self._dims_step(dims, lev)
            if lev % self.checkpoint_stride == 0 or lev == n:
                self._checkpoints[lev] = dims
        return dims

    def dimension(self, v: VertexId) -> int:
        return self.dims_at(v[0])[v[1]]

    # -- equipment protocol ----------------------------------------------------

    def exact_level(self, n: int):
        """Per-edge (numerators, denominators), unreduced: dim(u), dim(v)."""
        prev = self.dims_at(n - 1)
        cur = self.dims_at(n)
        indptr, indices = self.graph.pred_block(n)
        nums = [prev[int(u)] for u in indices]
        dens = [cur[v] for v in range(len(cur)) for _ in range(indptr[v + 1] - indptr[v])]
        return nums, dens

    def _log_dims_to(self, n: int) -> list[np.ndarray]:
        """log2 of the dimension vectors for levels 0..n, streamed lazily.

        Dimensions outgrow float64 within a single level on wide graphs, so
        no linear scaling survives; log space does, and the edge weights
        dim(u)/dim(v) recovered from it always lie in (0, 1].
        """
        if self._log_dims is None:
            self._log_dims = [np.zeros(1)]
        ld = self._log_dims
        while len(ld) <= n:
            lev = len(ld)
            indptr, indices = self.graph.pred_block(lev)
            counts = np.diff(indptr)
            prev = ld[-1]
            size = self.graph.level_size(lev)
            if np.all(counts > 0):
                starts = indptr[:-1].astype(np.intp)
                g = prev[indices]
                colmax = np.maximum.reduceat(g, starts)
                sums = np.add.reduceat(np.exp2(g - np.repeat(colmax, counts)), starts)
                out = colmax + np.log2(sums)
            else:
                out = np.full(size, -np.inf)
                for v in range(size):
                    seg = prev[indices[indptr[v] : indptr[v + 1]]]
                    if len(seg):
                        mx = seg.max()
                        out[v] = mx + np.log2(np.exp2(seg - mx).sum())
            ld.append(out)
        return ld

    def float_level(self, n: int) -> np.ndarray:
        ld = self._log_dims_to(n)
        indptr, indices = self.graph.pred_block(n)
        return np.exp2(ld[n - 1][indices] - np.repeat(ld[n], np.diff(indptr)))

    def weight(self, n: int, u: int, v: int) -> Fraction:
        indptr, indices = self.graph.pred_block(n + 1)
        if u not in indices[indptr[v] : indptr[v + 1]]:
            raise KeyError(f"no edge from ({n},{u}) to ({n+1},{v})")
        return Fraction(self.dims_at(n)[u], self.dims_at(n + 1)[v])

    def exact_column(self, n: int, v: int):
        indptr, indices = self.graph.pred_block(n)
        prev = self.dims_at(n - 1)
        den = self.dims_at(n)[v]
        lo, hi = indptr[v], indptr[v + 1]
        idx = indices[lo:hi]
        return idx, tuple(Fraction(prev[int(u)], den) for u in idx)

    def float_column(self, n: int, v: int):
        indptr, indices = self.graph.pred_block(n)
        w = self.float_level(n)
        lo, hi = indptr[v], indptr[v + 1]
        return indices[lo:hi], w[lo:hi]

    def materialize(self) -> TableEquipment:
        """Reduce to an explicit table (small graphs only)."""
        nums, dens = [], []
        for n in range(1, self.graph.depth):
            en, ed = self.exact_level(n)
            col_n, col_d = [], []
            for p, q in zip(en, ed):
                f = Fraction(p, q)
                col_n.append(f.numerator)
                col_d.append(f.denominator)
            nums.append(col_n)
            dens.append(col_d)
        return TableEquipment(self.graph, nums=nums, dens=dens)


def central_equipment(g: GradedGraph) -> CentralEquipment:
    """The equipment whose path products are path-independent: dim(u)/dim(v)."""
    return CentralEquipment(g)


@dataclass(frozen=True)
class EquippedGraph:
    graph: GradedGraph
    equipment: object  # TableEquipment | CentralEquipment

    def __post_init__(self):
        if self.equipment.graph is not self.graph:
            raise ValueError("equipment was built for a different graph")

    @property
    def is_exact(self) -> bool:
        return self.equipment.is_exact

    @property
    def depth(self) -> int:
        return self.graph.depth


# -- validation ---------------------------------------------------------------


def validate(obj) -> list[Violation]:
    """Check structural and equipment rules; an empty list means valid.

    Accepts a :class:`GradedGraph` or an :class:`EquippedGraph`.
    """
    if isinstance(obj, EquippedGraph):
        g, eq = obj.graph, obj.equipment
    else:
        g, eq = obj, None
    out: list[Violation] = []
    if g.depth == 0 or g.level_sizes[0] != 1:
        out.append(Violation("initial level must hold exactly one vertex", "level 0"))
    for n, s in enumerate(g.level_sizes):
        if s <= 0:
            out.append(Violation("empty level", f"level {n}"))
    for n in range(1, g.depth):
        indptr, indices = g.pred_block(n)
        for v in range(g.level_size(n)):
            col = indices[indptr[v] : indptr[v + 1]]
            if len(col) == 0:
                out.append(Violation("vertex without predecessor", f"({n},{v})"))
            if len(np.unique(col)) != len(col):
                out.append(Violation("duplicate edge", f"into ({n},{v})"))
    for n in range(0, g.top_level):
        sptr, _ = g.succ_block(n)
        for u in range(g.level_size(n)):
            if sptr[u] == sptr[u + 1]:
                out.append(Violation("vertex without successor", f"({n},{u})"))
    if eq is None:
        return out

    for n in range(1, g.depth):
        indptr, _ = g.pred_block(n)
        if eq.is_exact:
            nums, dens = eq.exact_level(n)
            for v in range(g.level_size(n)):
                lo, hi = indptr[v], indptr[v + 1]
                if any(nums[e] <= 0 or dens[e] <= 0 for e in range(lo, hi)):
                    out.append(Violation("non-positive weight", f"into ({n},{v})"))
                    continue
                total = sum(Fraction(nums[e], dens[e]) for e in range(lo, hi))
                if total != 1:
                    out.append(
                        Violation("column sum != 1", f"into ({n},{v})", f"sum={total}")
                    )
        else:
            w = eq.float_level(n)
            for v in range(g.level_size(n)):
                col = w[indptr[v] : indptr[v + 1]]
                if np.any(col <= 0):
                    out.append(Violation("non-positive weight", f"into ({n},{v})"))
                elif abs(col.sum() - 1.0) > FLOAT_COLUMN_TOL:
                    out.append(
                        Violation(
                            "column sum != 1", f"into ({n},{v})", f"sum={col.sum()!r}"
                        )
                    )
    return out


# -- cocycles -------------------------------------------------------------------


def _path_weight(eg: EquippedGraph, path: FinitePath, exact: bool):
    eg.graph.check_path(path)
    acc = Fraction(1) if exact else 1.0
    for i in range(1, len(path.indices)):
        n = path.start_level + i
        u, v = path.indices[i - 1], path.indices[i]
        if exact:
            acc *= eg.equipment.weight(n - 1, u, v)
        else:
            idx, w = eg.equipment.float_column(n, v)
            acc *= float(w[list(idx).index(u)])
    return acc


def cocycle(eg: EquippedGraph, p1: FinitePath, p2: FinitePath, mode: str = "exact"):
    """Ratio of the weight products of two paths from the initial vertex to a
    common endpoint.  Identically 1 for central equipment."""
    if p1.start_level != 0 or p2.start_level != 0:
        raise ValueError("cocycle paths must start at the initial vertex")
    if (p1.end_level, p1.indices[-1]) != (p2.end_level, p2.indices[-1]):
        raise ValueError("cocycle paths must share their endpoint")
    exact = mode == "exact"
    if exact and not eg.is_exact:
        raise TypeError("exact cocycle requested on float-valued equipment")
    w1 = _path_weight(eg, p1, exact)
    w2 = _path_weight(eg, p2, exact)
    return w1 / w2
