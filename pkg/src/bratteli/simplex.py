"""Projective-limit diagnostics on the simplices of level measures.

A coherent sequence of level measures is a point of the inverse limit; the
projected vertex measures of deep vertices form clouds whose convex hulls
shrink onto the limit body.  This module builds those clouds, tests hull
membership, measures how spread a coherent point's representing measure is
(extremality evidence), clusters it (approximate ergodic decomposition),
chases vertex sequences to boundary limits, and probes how densely the
projected vertices fill a simplex.

Ground distance on a simplex of measures is total variation throughout:
dimension-free and exact in rational mode.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .equipment import EquippedGraph, TableEquipment
from .graph import CapExceeded, GradedGraph, VertexId
from .measures import LevelMeasure, tv_distance
from .operators import MarkovMatrix, lower_measure, markov_matrix

__all__ = [
    "ChoquetCluster",
    "CoherentPrefix",
    "MartinLimitReport",
    "PoulsenReport",
    "ProjectedCloud",
    "choquet_decompose",
    "cloud_matrix",
    "extremality_spread",
    "graph_from_projections",
    "in_hull",
    "martin_limit",
    "omega_cloud",
    "poulsen_density",
    "project",
    "projection_system",
]

COHERENCE_TOL = 1e-10
GRID_CAP = 200_000


def project(eg: EquippedGraph, x: LevelMeasure, m: int) -> LevelMeasure:
    """Push a level-n measure down to level m by iterated projection."""
    if m > x.level:
        raise ValueError(f"cannot project level {x.level} up to level {m}")
    mu = x
    while mu.level > m:
        mu = lower_measure(eg, mu)
    return mu


def cloud_matrix(eg: EquippedGraph, m: int, n: int, mode: str = "float") -> np.ndarray:
    """Matrix whose column v is the projected vertex measure of (n, v) at
    level m; shape (size of level m, size of level n)."""
    g = eg.graph
    if not 0 <= m <= n < g.depth:
        raise ValueError(f"need 0 <= m <= n < {g.depth}")
    if mode == "float":
        M = np.eye(g.level_size(m))
        for j in range(m + 1, n + 1):
            indptr, indices = g.pred_block(j)
            w = eg.equipment.float_level(j)
            contrib = M[:, indices] * w[None, :]
            counts = np.diff(indptr)
            if np.all(counts > 0):
                M = np.add.reduceat(contrib, indptr[:-1].astype(np.intp), axis=1)
            else:
                M = np.zeros((M.shape[0], g.level_size(j)))
                np.add.at(M.T, np.repeat(np.arange(len(counts)), counts), contrib.T)
        return M
    if mode != "exact":
        raise ValueError(f"unknown mode {mode!r}")
    if not eg.is_exact:
        raise TypeError("exact cloud requested on float-valued equipment")
    d_m = g.level_size(m)
    M = np.full((d_m, d_m), Fraction(0), dtype=object)
    for i in range(d_m):
        M[i, i] = Fraction(1)
    for j in range(m + 1, n + 1):
        nxt = np.full((d_m, g.level_size(j)), Fraction(0), dtype=object)
        for v in range(g.level_size(j)):
            idx, wts = eg.equipment.exact_column(j, v)
            for u, wt in zip(idx, wts):
                col = M[:, int(u)]
                for i in range(d_m):
                    if col[i]:
                        nxt[i, v] += col[i] * wt
        M = nxt
    return M


@dataclass(frozen=True)
class ProjectedCloud:
    """Projected vertex measures of one source level, plus optional weights
    (a measure on the source level turning the cloud into an empirical
    mixture)."""

    m: int
    n: int
    points: np.ndarray  # (level_size(m), level_size(n))
    weights: Optional[np.ndarray] = None

    def point(self, v: int) -> np.ndarray:
        return self.points[:, v]

    @property
    def count(self) -> int:
        return self.points.shape[1]


def omega_cloud(
    eg: EquippedGraph,
    m: int,
    n: int,
    mode: str = "float",
    weights: Optional[LevelMeasure] = None,
) -> ProjectedCloud:
    """The cloud {projected measure of v at level m : v at level n}; its
    convex hull is the stage-n outer approximation of the limit body."""
    if not m < n:
        raise ValueError("need m < n")
    pts = cloud_matrix(eg, m, n, mode=mode)
    w = None
    if weights is not None:
        if weights.level != n:
            raise ValueError("weights must live on the source level")
        w = weights.as_floats() if mode == "float" else np.array(
            weights.weights, dtype=object
        )
    return ProjectedCloud(m, n, pts, w)


class CoherentPrefix:
    """A finite coherent sequence x_1 ... x_N: each measure projects onto
    the previous one.  Coherence is the defining relation and is verified at
    construction (exactly in rational mode, within ``COHERENCE_TOL`` in
    float mode) unless the sequence was built by projection."""

    def __init__(self, eg: EquippedGraph, measures: Sequence[LevelMeasure], _check=True):
        self.eg = eg
        self.measures = tuple(measures)
        if not self.measures:
            raise ValueError("empty prefix")
        for i, mu in enumerate(self.measures, start=1):
            if mu.level != i:
                raise ValueError(f"measure {i} sits at level {mu.level}, expected {i}")
        if _check:
            for i in range(len(self.measures) - 1, 0, -1):
                down = lower_measure(eg, self.measures[i])
                if down.is_exact:
                    ok = down.weights == self.measures[i - 1].weights
                else:
                    ok = (
                        float(
                            np.abs(
                                down.weights - self.measures[i - 1].as_floats()
                            ).max()
                        )
                        <= COHERENCE_TOL
                    )
                if not ok:
                    raise ValueError(f"incoherent at level {i + 1} -> {i}")

    @classmethod
    def from_top(cls, eg: EquippedGraph, top: LevelMeasure) -> "CoherentPrefix":
        """Extend a single measure downward; the result is coherent by
        construction."""
        seq = [top]
        while seq[-1].level > 1:
            seq.append(lower_measure(eg, seq[-1]))
        return cls(eg, list(reversed(seq)), _check=False)

    @classmethod
    def from_vertex(cls, eg: EquippedGraph, v: VertexId) -> "CoherentPrefix":
        """The coherent sequence generated by the point mass at one vertex:
        a point mass at its own level, projected vertex measures below.

        Point masses along a path do not form a coherent sequence (lowering a
        point mass spreads it over the predecessors), so this is the honest
        single-path object.
        """
        from .measures import delta

        v = eg.graph.check_vertex(v)
        if v.level < 1:
            raise ValueError("need a vertex above the initial level")
        return cls.from_top(eg, delta(eg.graph, v, exact=eg.is_exact))

    @property
    def top_level(self) -> int:
        return len(self.measures)

    def __getitem__(self, level: int) -> LevelMeasure:
        if not 1 <= level <= len(self.measures):
            raise IndexError(f"prefix holds levels 1..{len(self.measures)}")
        return self.measures[level - 1]

    def __len__(self):
        return len(self.measures)


def _tv_to_point(points: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Total-variation distance of every column of ``points`` to vector x."""
    return 0.5 * np.abs(points - x[:, None]).sum(axis=0)


def _check_barycenter(cloud: np.ndarray, w, x, exact: bool):
    if exact:
        d_m = cloud.shape[0]
        bary = [
            sum(cloud[i, v] * w[v] for v in range(cloud.shape[1]) if w[v])
            for i in range(d_m)
        ]
        if list(bary) != list(x):
            raise ArithmeticError("barycenter of the represented point drifted")
    else:
        bary = cloud @ w
        if float(np.abs(bary - x).max()) > 1e-8:
            raise ArithmeticError("barycenter of the represented point drifted")


def extremality_spread(
    eg: EquippedGraph, prefix: CoherentPrefix, m: int, n: int, mode: Optional[str] = None
):
    """Mean total-variation distance between the projected vertex measures
    (weighted by x_n) and the point x_m itself.

    This is exactly the transport distance between the representing measure
    at stage n and the point mass at x_m.  Values near zero are finite-stage
    evidence of extremality; the verdict is always relative to the depth and
    tolerance used.
    """
    if not 0 < m < n <= prefix.top_level:
        raise ValueError("need 0 < m < n within the prefix")
    if mode is None:
        mode = "exact" if (eg.is_exact and prefix[n].is_exact) else "float"
    x_n = prefix[n]
    x_m = prefix[m]
    cloud = cloud_matrix(eg, m, n, mode=mode)
    if mode == "exact":
        w = x_n.weights
        _check_barycenter(cloud, w, x_m.weights, exact=True)
        total = Fraction(0)
        for v in range(cloud.shape[1]):
            if w[v]:
                tv = sum(abs(cloud[i, v] - x_m.weights[i]) for i in range(cloud.shape[0]))
                total += w[v] * tv / 2
        return total
    w = x_n.as_floats()
    xm = x_m.as_floats()
    _check_barycenter(cloud, w, xm, exact=False)
    return float(np.dot(_tv_to_point(cloud, xm), w))


@dataclass(frozen=True)
class ChoquetCluster:
    weight: float
    barycenter: np.ndarray
    members: tuple[int, ...]


def choquet_decompose(
    eg: EquippedGraph,
    prefix: CoherentPrefix,
    m: int,
    n: int,
    cluster_radius: float,
    atom_floor: float = 1e-12,
) -> list[ChoquetCluster]:
    """Single-linkage clustering of the stage-n representing measure.

    Atoms lighter than ``atom_floor`` are kept out of the linkage graph
    (they would chain otherwise well-separated lumps together) and are
    assigned to the nearest surviving cluster afterwards, ties to the
    lower-indexed cluster, so the returned weights still sum to one.
    Clusters are ordered by descending weight, then by smallest member.
    """
    if not 0 < m < n <= prefix.top_level:
        raise ValueError("need 0 < m < n within the prefix")
    cloud = cloud_matrix(eg, m, n, mode="float")
    w = prefix[n].as_floats()
    heavy = np.flatnonzero(w > atom_floor)
    if len(heavy) == 0:
        raise ValueError("no atoms above the weight floor")
    pts = cloud[:, heavy]
    H = len(heavy)
    parent = list(range(H))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    dist = 0.5 * np.abs(pts[:, :, None] - pts[:, None, :]).sum(axis=0)
    for i in range(H):
        for j in range(i + 1, H):
            if dist[i, j] <= cluster_radius:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)

    groups: dict[int, list[int]] = {}
    for i in range(H):
        groups.setdefault(find(i), []).append(i)
    clusters = []
    for root in sorted(groups):
        members = groups[root]
        idx = heavy[members]
        cw = float(w[idx].sum())
        bary = (cloud[:, idx] * w[idx][None, :]).sum(axis=1) / cw
        clusters.append([cw, bary, set(idx.tolist())])

    light = np.flatnonzero((w > 0) & (w <= atom_floor))
    for v in light:
        d = [0.5 * float(np.abs(cloud[:, v] - c[1]).sum()) for c in clusters]
        best = int(np.argmin(d))  # argmin returns the first, lowest index
        cw, bary, members = clusters[best]
        nw = cw + float(w[v])
        clusters[best][1] = (bary * cw + cloud[:, v] * float(w[v])) / nw
        clusters[best][0] = nw
        members.add(int(v))

    clusters.sort(key=lambda c: (-c[0], min(c[2])))
    return [
        ChoquetCluster(cw, bary, tuple(sorted(members)))
        for cw, bary, members in clusters
    ]


@dataclass(frozen=True)
class MartinLimitReport:
    limit: LevelMeasure
    cauchy: bool
    tol: float
    window: int
    max_tail_distance: float
    stage_levels: tuple[int, ...]


def martin_limit(
    eg: EquippedGraph,
    vertices: Sequence[VertexId],
    m: int,
    tol: float = 1e-3,
    window: int = 5,
    mode: str = "float",
) -> MartinLimitReport:
    """Chase the projected measures of a vertex sequence and report whether
    the trailing window is Cauchy in total variation."""
    from .operators import vertex_measure

    vs = [eg.graph.check_vertex(v) for v in vertices]
    if len(vs) < 2:
        raise ValueError("need at least two vertices")
    levels = [v.level for v in vs]
    if any(b <= a for a, b in zip(levels, levels[1:])):
        raise ValueError("vertex levels must be strictly increasing")
    if min(levels) <= m:
        raise ValueError("all vertices must sit above the target level")
    mus = [vertex_measure(eg, v, m, mode=mode) for v in vs]
    tail = mus[-window:] if window > 1 else mus[-2:]
    worst = 0.0
    for i in range(len(tail)):
        for j in range(i + 1, len(tail)):
            worst = max(worst, float(tv_distance(tail[i], tail[j])))
    return MartinLimitReport(
        limit=mus[-1],
        cauchy=worst < tol,
        tol=tol,
        window=window,
        max_tail_distance=worst,
        stage_levels=tuple(levels),
    )


@dataclass(frozen=True)
class PoulsenReport:
    fill_distance: float
    worst_point: tuple[float, ...]
    grid_size: int
    cloud_size: int


def _simplex_grid(d: int, resolution: int, cap: int = GRID_CAP) -> np.ndarray:
    """Barycentric grid: all compositions of ``resolution`` into d parts,
    scaled to the simplex."""
    from math import comb

    total = comb(resolution + d - 1, d - 1)
    if total > cap:
        raise CapExceeded(f"grid of {total} points exceeds cap {cap}")
    out = np.empty((total, d), dtype=np.float64)
    row = 0

    def rec(prefix, remaining, slots):
        nonlocal row
        if slots == 1:
            out[row, : len(prefix)] = prefix
            out[row, len(prefix)] = remaining
            row += 1
            return
        for x in range(remaining + 1):
            rec(prefix + [x], remaining - x, slots - 1)

    rec([], resolution, d)
    return out / float(resolution)


def poulsen_density(
    eg: EquippedGraph, m: int, n: int, grid_resolution: int, cap: int = GRID_CAP
) -> PoulsenReport:
    """Fill distance of the projected vertex cloud (all source levels up to
    n) against a barycentric grid of the level-m simplex: small values are
    evidence that the projected vertices are dense."""
    g = eg.graph
    if not 0 < m < n < g.depth:
        raise ValueError("need 0 < m < n < depth")
    d = g.level_size(m)
    grid = _simplex_grid(d, grid_resolution, cap)
    best = np.full(len(grid), np.inf)
    count = 0
    for j in range(m, n + 1):
        pts = cloud_matrix(eg, m, j, mode="float")
        count += pts.shape[1]
        # pairwise TV distances grid x cloud, in blocks to bound memory
        for lo in range(0, pts.shape[1], 1024):
            block = pts[:, lo : lo + 1024]
            dd = 0.5 * np.abs(grid[:, :, None] - block[None, :, :]).sum(axis=1)
            best = np.minimum(best, dd.min(axis=1))
    worst = int(np.argmax(best))
    return PoulsenReport(
        fill_distance=float(best[worst]),
        worst_point=tuple(float(x) for x in grid[worst]),
        grid_size=len(grid),
        cloud_size=count,
    )


def in_hull(points: np.ndarray, target, tol: float = 1e-8) -> bool:
    """Feasibility of expressing ``target`` as a convex combination of the
    columns of ``points``, via linear programming."""
    from scipy.optimize import linprog

    pts = np.asarray(points, dtype=np.float64)
    t = np.asarray(target, dtype=np.float64)
    if pts.shape[0] != len(t):
        raise ValueError("dimension mismatch")
    A = np.vstack([pts, np.ones((1, pts.shape[1]))])
    b = np.concatenate([t, [1.0]])
    res = linprog(
        np.zeros(pts.shape[1]),
        A_eq=A,
        b_eq=b,
        bounds=(0, None),
        method="highs",
        options={"primal_feasibility_tolerance": tol},
    )
    return bool(res.status == 0)


def projection_system(eg: EquippedGraph) -> list[MarkovMatrix]:
    """The one-step projections between consecutive level simplices, acting
    on point masses; columns are exactly the cotransition distributions."""
    return [markov_matrix(eg, n) for n in range(eg.graph.depth - 1)]


def graph_from_projections(mats: Sequence[MarkovMatrix]) -> EquippedGraph:
    """Rebuild the equipped graph whose projection system is ``mats``:
    vertices from the simplex dimensions, edges wherever a projection
    coordinate is nonzero, weights from those coordinates."""
    if not mats:
        raise ValueError("empty projection system")
    sizes = [mats[0].shape[0]] + [M.shape[1] for M in mats]
    pred_lists = []
    weight_map = {}
    exact = all(M.is_exact for M in mats)
    for n, M in enumerate(mats, start=1):
        cols = []
        for v in range(M.shape[1]):
            idx, w = M.column(v)
            keep = [
                (int(u), wt)
                for u, wt in zip(idx, w)
                if (wt > 0 if exact else wt > 0.0)
            ]
            cols.append([u for u, _ in keep])
            for u, wt in keep:
                weight_map[(n - 1, u, v)] = wt
        pred_lists.append(cols)
    g = GradedGraph.from_pred_lists(pred_lists)
    if g.level_sizes != tuple(sizes):
        raise ValueError("projection shapes are inconsistent")
    eq = TableEquipment.from_map(g, weight_map, exact=exact)
    return EquippedGraph(g, eq)
