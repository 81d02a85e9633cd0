"""Graded graphs: level-indexed vertex sets with edges between adjacent levels.

A graph is stored level by level.  For every level n >= 1 we keep the list of
predecessors of each vertex in CSC-like form (an offset array plus a flat
index array), which stays compact even for graphs with millions of edges.
Level 0 always consists of the single initial vertex.
"""

from __future__ import annotations

from typing import Iterable, NamedTuple, Sequence

import numpy as np

__all__ = [
    "CapExceeded",
    "FinitePath",
    "GradedGraph",
    "VertexId",
    "count_paths",
    "dimensions",
    "enumerate_paths",
]

PATH_CAP_DEFAULT = 10_000


class CapExceeded(RuntimeError):
    """A configured resource cap (path count, level size, grid size) was hit."""


class VertexId(NamedTuple):
    level: int
    index: int


class FinitePath(NamedTuple):
    """A monotone path: vertex indices at consecutive levels.

    ``indices[i]`` is the vertex index at level ``start_level + i``.
    """

    start_level: int
    indices: tuple[int, ...]

    @property
    def end_level(self) -> int:
        return self.start_level + len(self.indices) - 1

    def vertices(self) -> tuple[VertexId, ...]:
        return tuple(
            VertexId(self.start_level + i, j) for i, j in enumerate(self.indices)
        )


class _Level:
    """Predecessor structure of one level: CSC arrays plus a lazy transpose."""

    __slots__ = ("indptr", "indices", "_succ")

    def __init__(self, indptr: np.ndarray, indices: np.ndarray):
        self.indptr = indptr
        self.indices = indices
        self._succ = None

    def successors(self, prev_size: int):
        if self._succ is None:
            order = np.argsort(self.indices, kind="stable")
            targets = np.repeat(
                np.arange(len(self.indptr) - 1, dtype=np.int64),
                np.diff(self.indptr),
            )[order]
            counts = np.bincount(self.indices, minlength=prev_size)
            sptr = np.zeros(prev_size + 1, dtype=np.int64)
            np.cumsum(counts, out=sptr[1:])
            self._succ = (sptr, targets)
        return self._succ


class GradedGraph:
    """An N-level graded graph.  Construction does not check well-formedness
    beyond index ranges; see :func:`bratteli.equipment.validate` for the full
    rule set (every vertex covered, no isolated vertices, and so on)."""

    def __init__(self, level_sizes, levels, labels=None):
        self.level_sizes: tuple[int, ...] = tuple(int(s) for s in level_sizes)
        self._levels: tuple[_Level, ...] = tuple(levels)
        if len(self._levels) != max(len(self.level_sizes) - 1, 0):
            raise ValueError("need one predecessor block per level >= 1")
        self.labels = labels
        for n, lev in enumerate(self._levels, start=1):
            if len(lev.indptr) != self.level_sizes[n] + 1:
                raise ValueError(f"level {n}: offset array has wrong length")
            if len(lev.indices) and (
                lev.indices.min() < 0 or lev.indices.max() >= self.level_sizes[n - 1]
            ):
                raise ValueError(f"level {n}: predecessor index out of range")

    # -- construction -----------------------------------------------------

    @classmethod
    def from_pred_lists(cls, pred_lists: Sequence[Sequence[Sequence[int]]], labels=None):
        """Build from ``pred_lists[n][i]`` = predecessor indices of vertex i
        at level n+1 (so ``pred_lists`` has one entry per level >= 1)."""
        sizes = [1] + [len(per_level) for per_level in pred_lists]
        levels = []
        for per_level in pred_lists:
            indptr = np.zeros(len(per_level) + 1, dtype=np.int64)
            indptr[1:] = np.cumsum([len(p) for p in per_level])
            flat = [j for p in per_level for j in p]
            levels.append(_Level(indptr, np.asarray(flat, dtype=np.int64)))
        return cls(sizes, levels, labels=labels)

    @classmethod
    def from_csc(cls, level_sizes, blocks, labels=None):
        """Build from ready-made per-level ``(indptr, indices)`` arrays, the
        fastest route for generated families with many levels."""
        levels = [
            _Level(
                np.ascontiguousarray(indptr, dtype=np.int64),
                np.ascontiguousarray(indices, dtype=np.int64),
            )
            for indptr, indices in blocks
        ]
        return cls(level_sizes, levels, labels=labels)

    @classmethod
    def from_edges(cls, level_sizes, edges: Iterable[tuple[int, int, int]], labels=None):
        """Build from triples ``(n, u, v)`` meaning an edge from vertex u at
        level n to vertex v at level n+1.  Duplicate triples are kept so that
        validation can report them."""
        sizes = [int(s) for s in level_sizes]
        buckets: list[list[list[int]]] = [
            [[] for _ in range(sizes[n + 1])] for n in range(len(sizes) - 1)
        ]
        for n, u, v in edges:
            if not (0 <= n < len(sizes) - 1):
                raise ValueError(f"edge level {n} out of range")
            if not (0 <= v < sizes[n + 1]) or not (0 <= u < sizes[n]):
                raise ValueError(f"edge ({n},{u},{v}) endpoint out of range")
            buckets[n][v].append(u)
        for per_level in buckets:
            for p in per_level:
                p.sort()
        out = cls.from_pred_lists(buckets, labels=labels)
        return cls(sizes, out._levels, labels=labels)

    # -- basic accessors ---------------------------------------------------

    @property
    def depth(self) -> int:
        """Number of stored levels (level 0 included)."""
        return len(self.level_sizes)

    @property
    def top_level(self) -> int:
        return len(self.level_sizes) - 1

    def level_size(self, n: int) -> int:
        return self.level_sizes[n]

    def check_vertex(self, v: VertexId) -> VertexId:
        v = VertexId(int(v[0]), int(v[1]))
        if not (0 <= v.level < self.depth):
            raise ValueError(f"level {v.level} out of range")
        if not (0 <= v.index < self.level_sizes[v.level]):
            raise ValueError(f"vertex index {v.index} out of range at level {v.level}")
        return v

    def pred_block(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        """(indptr, indices) for predecessors of level-n vertices, n >= 1."""
        if not (1 <= n < self.depth):
            raise ValueError(f"no predecessor block for level {n}")
        lev = self._levels[n - 1]
        return lev.indptr, lev.indices

    def preds(self, n: int, i: int) -> np.ndarray:
        indptr, indices = self.pred_block(n)
        return indices[indptr[i] : indptr[i + 1]]

    def succ_block(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        """(indptr, targets) for successors of level-n vertices, n < top."""
        if not (0 <= n < self.top_level):
            raise ValueError(f"no successor block for level {n}")
        return self._levels[n].successors(self.level_sizes[n])

    def succs(self, n: int, i: int) -> np.ndarray:
        sptr, targets = self.succ_block(n)
        return targets[sptr[i] : sptr[i + 1]]

    def edge_count(self, n: int) -> int:
        """Number of edges between levels n and n+1."""
        return len(self._levels[n].indices)

    def edges(self) -> Iterable[tuple[int, int, int]]:
        """All edges as (n, u, v), ordered by level, then target, then source."""
        for n in range(1, self.depth):
            indptr, indices = self.pred_block(n)
            for v in range(self.level_sizes[n]):
                for u in indices[indptr[v] : indptr[v + 1]]:
                    yield (n - 1, int(u), v)

    def label(self, v: VertexId):
        """Label of a vertex, or None; labels are keyed by (level, index)."""
        if self.labels is None:
            return None
        return self.labels.get((v[0], v[1]))

    def check_path(self, path: FinitePath) -> FinitePath:
        """Verify that consecutive entries of ``path`` are joined by edges."""
        if not path.indices:
            raise ValueError("empty path")
        self.check_vertex(VertexId(path.start_level, path.indices[0]))
        for i in range(1, len(path.indices)):
            n = path.start_level + i
            self.check_vertex(VertexId(n, path.indices[i]))
            if path.indices[i - 1] not in self.preds(n, path.indices[i]):
                raise ValueError(
                    f"no edge from ({n-1},{path.indices[i-1]}) to ({n},{path.indices[i]})"
                )
        return path

    def __repr__(self):
        return f"GradedGraph(levels={self.depth}, sizes={list(self.level_sizes)})"


# -- dimensions and path counting ------------------------------------------


def _dimension_levels(g: GradedGraph, upto: int):
    """Yield (n, dims at level n) with exact integer arithmetic."""
    dims = [1]
    yield 0, dims
    for n in range(1, upto + 1):
        indptr, indices = g.pred_block(n)
        nxt = [0] * g.level_sizes[n]
        for v in range(g.level_sizes[n]):
            s = 0
            for e in range(indptr[v], indptr[v + 1]):
                s += dims[indices[e]]
            nxt[v] = s
        dims = nxt
        yield n, dims


def dimensions(g: GradedGraph) -> list[list[int]]:
    """Exact path counts from the initial vertex to every vertex, per level."""
    return [list(dims) for _, dims in _dimension_levels(g, g.top_level)]


def count_paths(g: GradedGraph, u: VertexId, v: VertexId) -> int:
    """Number of monotone paths from u to v (0 if none, 1 if u == v)."""
    u = g.check_vertex(u)
    v = g.check_vertex(v)
    if u.level > v.level:
        return 0
    cur = [0] * g.level_sizes[u.level]
    cur[u.index] = 1
    for n in range(u.level + 1, v.level + 1):
        indptr, indices = g.pred_block(n)
        nxt = [0] * g.level_sizes[n]
        for w in range(g.level_sizes[n]):
            s = 0
            for e in range(indptr[w], indptr[w + 1]):
                s += cur[indices[e]]
            nxt[w] = s
        cur = nxt
    return cur[v.index]


def enumerate_paths(
    g: GradedGraph, u: VertexId, v: VertexId, cap: int = PATH_CAP_DEFAULT
) -> list[FinitePath]:
    """All monotone paths from u to v.

    The count is checked first by dynamic programming; if it exceeds ``cap``
    the function raises :class:`CapExceeded` instead of materializing.
    """
    u = g.check_vertex(u)
    v = g.check_vertex(v)
    total = count_paths(g, u, v)
    if total > cap:
        raise CapExceeded(f"{total} paths from {tuple(u)} to {tuple(v)} exceed cap {cap}")
    if total == 0:
        return []
    out: list[FinitePath] = []
    stack = [v.index]

    def walk(n: int, i: int):
        if n == u.level:
            if i == u.index:
                out.append(FinitePath(u.level, tuple(reversed(stack))))
            return
        for p in g.preds(n, i):
            stack.append(int(p))
            walk(n - 1, int(p))
            stack.pop()

    walk(v.level, v.index)
    return out
