"""Generators for the graphs used as fixtures throughout the package.

All generators return plain :class:`~bratteli.graph.GradedGraph` objects with
human-readable labels.  Construction is deterministic: partition levels are
enumerated in reverse-lexicographic order and the random family is seeded, so
vertex indices are stable across runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .graph import CapExceeded, GradedGraph

__all__ = [
    "GraphSpec",
    "LEVEL_CAP_DEFAULT",
    "make",
    "pascal",
    "random_graph",
    "unordered_pairs",
    "young",
]

LEVEL_CAP_DEFAULT = 50_000

KINDS = ("pascal", "young", "unordered_pairs", "random")


@dataclass(frozen=True)
class GraphSpec:
    """Declarative description of a zoo graph, echoed into reports."""

    kind: str
    depth: int
    base: Optional[int] = None
    seed: Optional[int] = None
    density: Optional[float] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown graph kind {self.kind!r}")
        if self.depth < 1:
            raise ValueError("depth must be >= 1")
        if self.kind == "unordered_pairs" and (self.base is None or self.base < 2):
            raise ValueError("unordered_pairs needs base >= 2")
        if self.kind == "random":
            if self.density is None or not 0 < self.density <= 1:
                raise ValueError("random graph needs density in (0, 1]")

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "depth": self.depth}
        for k in ("base", "seed", "density"):
            v = getattr(self, k)
            if v is not None:
                out[k] = v
        return out


def make(spec: GraphSpec, level_cap: int = LEVEL_CAP_DEFAULT) -> GradedGraph:
    if spec.kind == "pascal":
        return pascal(spec.depth)
    if spec.kind == "young":
        return young(spec.depth)
    if spec.kind == "unordered_pairs":
        return unordered_pairs(spec.depth, spec.base, level_cap=level_cap)
    return random_graph(spec.depth, seed=spec.seed or 0, density=spec.density)


def pascal(N: int) -> GradedGraph:
    """Levels 0..N; vertex (n, k) has successors (n+1, k) and (n+1, k+1).

    No label table is attached: the pair (level, index) is the label.
    Levels are assembled as raw offset/index arrays so that deep graphs
    (thousands of levels) build in well under a second.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    blocks = []
    for n in range(1, N + 1):
        # vertex k at level n has predecessors {k-1, k} clipped to [0, n-1]
        deg = np.full(n + 1, 2, dtype=np.int64)
        deg[0] = deg[n] = 1
        indptr = np.zeros(n + 2, dtype=np.int64)
        np.cumsum(deg, out=indptr[1:])
        if n == 1:
            indices = np.zeros(2, dtype=np.int64)
        else:
            ks = np.arange(1, n, dtype=np.int64)
            mid = np.column_stack([ks - 1, ks]).ravel()
            indices = np.concatenate([[0], mid, [n - 1]])
        blocks.append((indptr, indices))
    return GradedGraph.from_csc([n + 1 for n in range(N + 1)], blocks)


@lru_cache(maxsize=None)
def _partitions(n: int) -> tuple[tuple[int, ...], ...]:
    """Partitions of n in reverse-lexicographic order (largest part first)."""
    if n == 0:
        return ((),)
    out = []

    def rec(remaining, max_part, prefix):
        if remaining == 0:
            out.append(tuple(prefix))
            return
        for part in range(min(remaining, max_part), 0, -1):
            prefix.append(part)
            rec(remaining - part, part, prefix)
            prefix.pop()

    rec(n, n, [])
    return tuple(out)


def _remove_corner(p: tuple[int, ...], i: int) -> tuple[int, ...]:
    q = list(p)
    q[i] -= 1
    if q[i] == 0:
        q.pop(i)
    return tuple(q)


def young(N: int) -> GradedGraph:
    """Levels 0..N of the lattice of integer partitions ordered by adding
    one box: level n holds the partitions of n."""
    if N < 1:
        raise ValueError("N must be >= 1")
    levels = [_partitions(n) for n in range(N + 1)]
    index = [{p: i for i, p in enumerate(lev)} for lev in levels]
    labels = {}
    for n, lev in enumerate(levels):
        for i, p in enumerate(lev):
            labels[(n, i)] = p
    pred_lists = []
    for n in range(1, N + 1):
        level = []
        for p in levels[n]:
            ps = set()
            for i in range(len(p)):
                if i == len(p) - 1 or p[i] > p[i + 1]:
                    ps.add(index[n - 1][_remove_corner(p, i)])
            level.append(sorted(ps))
        pred_lists.append(level)
    return GradedGraph.from_pred_lists(pred_lists, labels=labels)


def unordered_pairs(
    N: int, base: int, level_cap: int = LEVEL_CAP_DEFAULT
) -> GradedGraph:
    """Levels 0..N; level n+1 holds the size-2 multisets of level-n vertices.

    {a, b} with a != b receives one edge from a and one from b; {a, a}
    receives the single edge from a.  This multiset variant keeps every level
    connected to the previous one.  Level sizes grow doubly exponentially, so
    construction refuses levels larger than ``level_cap``.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if base < 2:
        raise ValueError("base must be >= 2")
    pred_lists = [[[0] for _ in range(base)]]
    labels = {(0, 0): ()}
    for i in range(base):
        labels[(1, i)] = (i,)
    size = base
    for n in range(2, N + 1):
        nxt = size * (size + 1) // 2
        if nxt > level_cap:
            raise CapExceeded(
                f"unordered_pairs level {n} would hold {nxt} vertices"
                f" (cap {level_cap})"
            )
        level = []
        idx = 0
        for a in range(size):
            for b in range(a, size):
                level.append([a] if a == b else [a, b])
                labels[(n, idx)] = (a, b)
                idx += 1
        pred_lists.append(level)
        size = nxt
    return GradedGraph.from_pred_lists(pred_lists, labels=labels)


def random_graph(N: int, seed: int = 0, density: float = 0.5) -> GradedGraph:
    """Seeded random graded graph, repaired so that every vertex keeps at
    least one predecessor and one successor.  density=1 gives the complete
    bipartite graph between consecutive levels."""
    if not 0 < density <= 1:
        raise ValueError("density must be in (0, 1]")
    if N < 1:
        raise ValueError("N must be >= 1")
    rng = np.random.default_rng(seed)
    sizes = [1] + [int(rng.integers(2, 7)) for _ in range(N)]
    pred_lists = []
    for n in range(1, N + 1):
        prev, cur = sizes[n - 1], sizes[n]
        mask = rng.random((cur, prev)) < density
        # repair passes: every vertex needs a predecessor, every predecessor
        # needs a successor
        for v in range(cur):
            if not mask[v].any():
                mask[v, int(rng.integers(prev))] = True
        for u in range(prev):
            if not mask[:, u].any():
                mask[int(rng.integers(cur)), u] = True
        pred_lists.append([list(np.flatnonzero(mask[v])) for v in range(cur)])
    return GradedGraph.from_pred_lists(pred_lists)
