"""Iterated metric transfer and the standardness diagnostics built on it.

Starting from a base metric on level 1, each transfer step turns a distance
table on one level into one on the next: the new distance between two
vertices is the transport distance between their cotransition measures under
the old table.  The resulting sequence of tables is the intrinsic metric
restricted to vertices; covering numbers, ball masses, and lacunary
subsequences of levels are all read off these tables.

Transfer steps produce pseudometrics in general (two vertices with the same
cotransition column end up at distance 0); all consumers tolerate that.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from . import _kernels
from .equipment import EquippedGraph
from .graph import CapExceeded, FinitePath, VertexId, enumerate_paths
from .operators import MarkovMatrix, markov_matrix
from .transport import FiniteMetric, kantorovich

__all__ = [
    "BaseMetricConfig",
    "LacunarizationResult",
    "LevelMetric",
    "NESTED_DEPTH_CAP",
    "SAMPLE_SIZE",
    "SAMPLE_THRESHOLD",
    "StandardnessReport",
    "TRIANGLE_TOL",
    "cocycle_measure",
    "concentration_test",
    "covering_number",
    "iterate_intrinsic",
    "lacunarize",
    "nested_distance",
    "standardness_diagnostic",
    "transfer_step",
]

TRIANGLE_TOL = 2e-9
SAMPLE_THRESHOLD = 20_000
SAMPLE_SIZE = 5_000
NESTED_DEPTH_CAP = 6

Number = Union[Fraction, float]


@dataclass(frozen=True)
class BaseMetricConfig:
    """Weights c_n > 0 of the base path metric sum(c_n * [paths differ at n]).

    ``weights[k]`` is c_{k+1}; levels beyond the stored sequence default to
    the geometric tail c_n = 2^-n, which is also the default when no weights
    are given.  With ``normalize`` set (the default) every coefficient is
    divided by c_1, so distinct level-1 vertices sit at distance exactly 1
    and thresholds are scale-free.
    """

    weights: Optional[tuple] = None
    normalize: bool = True

    def __post_init__(self):
        if self.weights is not None:
            w = tuple(self.weights)
            if not w or any(
                (x <= 0) if isinstance(x, (int, Fraction)) else (float(x) <= 0)
                for x in w
            ):
                raise ValueError("base metric weights must be positive")
            object.__setattr__(self, "weights", w)

    @property
    def is_exact(self) -> bool:
        return self.weights is None or all(
            isinstance(x, (int, Fraction)) for x in self.weights
        )

    def coefficient(self, n: int) -> Number:
        if self.weights is not None and n <= len(self.weights):
            c = self.weights[n - 1]
            c = Fraction(c) if isinstance(c, int) else c
        else:
            c = Fraction(1, 2**n)
        if not self.normalize:
            return c
        c1 = self.coefficient_raw(1)
        if isinstance(c, Fraction) and isinstance(c1, Fraction):
            return c / c1
        return float(c) / float(c1)

    def coefficient_raw(self, n: int) -> Number:
        if self.weights is not None and n <= len(self.weights):
            c = self.weights[n - 1]
            return Fraction(c) if isinstance(c, int) else c
        return Fraction(1, 2**n)

    def to_dict(self) -> dict:
        return {
            "weights": None
            if self.weights is None
            else [str(w) if isinstance(w, Fraction) else w for w in self.weights],
            "normalize": self.normalize,
        }


class LevelMetric:
    """Symmetric distance table on (a subset of) one level's vertices.

    ``indices`` is None for a full table; a sampled table stores the sorted
    vertex indices it covers.  Exact tables hold Fractions, float tables
    float64.
    """

    __slots__ = ("level", "table", "indices", "is_exact")

    def __init__(self, level: int, table, indices=None, exact: Optional[bool] = None):
        arr = np.asarray(table)
        if exact is None:
            exact = arr.dtype == object
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError("distance table must be square")
        self.level = level
        self.is_exact = exact
        self.table = arr if exact else arr.astype(np.float64)
        self.indices = None if indices is None else np.asarray(indices, dtype=np.int64)
        if self.indices is not None and len(self.indices) != arr.shape[0]:
            raise ValueError("sample index count does not match table size")

    @property
    def size(self) -> int:
        return self.table.shape[0]

    @property
    def sampled(self) -> bool:
        return self.indices is not None

    def as_floats(self) -> np.ndarray:
        if not self.is_exact:
            return self.table
        return np.array(
            [[float(x) for x in row] for row in self.table], dtype=np.float64
        )

    def diameter(self) -> Number:
        if self.size == 0:
            raise ValueError("empty table")
        if self.is_exact:
            return max(max(row) for row in self.table)
        return float(self.table.max())

    def check_axioms(self, tol: float = TRIANGLE_TOL, max_full: int = 200, seed: int = 0):
        """Raise on asymmetry, nonzero diagonal, or a triangle violation.

        The cubic triangle scan runs in full up to ``max_full`` points and on
        seeded random triples above that.
        """
        D = self.as_floats()
        s = self.size
        if np.any(np.diag(D) != 0):
            raise ValueError("nonzero diagonal")
        if not np.array_equal(D, D.T):
            raise ValueError("asymmetric table")
        if np.any(D < 0):
            raise ValueError("negative distance")
        if s <= max_full:
            for k in range(s):
                if np.any(D > D[:, [k]] + D[[k], :] + tol):
                    raise ValueError(f"triangle violation through point {k}")
        else:
            rng = np.random.default_rng(seed)
            tri = rng.integers(0, s, size=(20_000, 3))
            lhs = D[tri[:, 0], tri[:, 1]]
            rhs = D[tri[:, 0], tri[:, 2]] + D[tri[:, 2], tri[:, 1]]
            if np.any(lhs > rhs + tol):
                raise ValueError("triangle violation (sampled)")
        return self

    def __repr__(self):
        mode = "exact" if self.is_exact else "float"
        tag = f", sampled {self.size}" if self.sampled else ""
        return f"LevelMetric(level={self.level}, {mode}, size={self.size}{tag})"


def _level_one_metric(eg: EquippedGraph, base: BaseMetricConfig, exact: bool) -> LevelMetric:
    s = eg.graph.level_size(1)
    c1 = base.coefficient(1)
    if exact:
        c1 = c1 if isinstance(c1, Fraction) else Fraction(c1)
        tab = np.empty((s, s), dtype=object)
        for i in range(s):
            for j in range(s):
                tab[i, j] = Fraction(0) if i == j else c1
        return LevelMetric(1, tab, exact=True)
    tab = float(c1) * (1.0 - np.eye(s))
    return LevelMetric(1, tab, exact=False)


def _padded_columns(eg: EquippedGraph, n: int):
    """Cotransition columns of level n padded to width 2, or None if any
    column has more than two predecessors."""
    g = eg.graph
    indptr, indices = g.pred_block(n)
    counts = np.diff(indptr)
    if counts.max() > 2 or counts.min() < 1:
        return None
    w = eg.equipment.float_level(n)
    s = g.level_size(n)
    sup_idx = np.empty((s, 2), dtype=np.int64)
    sup_w = np.empty((s, 2), dtype=np.float64)
    first = indptr[:-1]
    sup_idx[:, 0] = indices[first]
    sup_w[:, 0] = w[first]
    two = counts == 2
    sup_idx[:, 1] = sup_idx[:, 0]
    sup_w[:, 1] = 0.0
    sup_idx[two, 1] = indices[first[two] + 1]
    sup_w[two, 1] = w[first[two] + 1]
    return sup_idx, sup_w


def transfer_step(
    eg: EquippedGraph,
    rho: LevelMetric,
    sample_threshold: int = SAMPLE_THRESHOLD,
    sample_size: int = SAMPLE_SIZE,
    seed: int = 0,
) -> LevelMetric:
    """One metric transfer: distances on the next level are transport
    distances between cotransition columns under ``rho``.

    Levels larger than ``sample_threshold`` get a seeded uniform sample of
    ``sample_size`` vertices instead of a full table; a sampled metric
    cannot be transferred further.
    """
    if rho.sampled:
        raise ValueError("cannot transfer from a sampled metric")
    g = eg.graph
    n = rho.level + 1
    if n >= g.depth:
        raise ValueError(f"no level {n} to transfer onto")
    if rho.size != g.level_size(rho.level):
        raise ValueError("table size does not match level")
    size = g.level_size(n)
    subset = None
    if size > sample_threshold:
        rng = np.random.default_rng(seed)
        subset = np.sort(rng.choice(size, size=sample_size, replace=False))

    if not rho.is_exact:
        pad = _padded_columns(eg, n)
        if pad is not None:
            sup_idx, sup_w = pad
            if subset is not None:
                sup_idx, sup_w = sup_idx[subset], sup_w[subset]
            tab = _kernels.transfer_table_2(sup_idx, sup_w, rho.table)
            return LevelMetric(n, tab, indices=subset, exact=False)

    cols = subset if subset is not None else np.arange(size)
    metric = FiniteMetric(rho.table, exact=rho.is_exact)
    full = np.zeros(rho.size)
    dense = []
    for v in cols:
        if rho.is_exact:
            idx, w = eg.equipment.exact_column(n, int(v))
            vec = [Fraction(0)] * rho.size
        else:
            idx, w = eg.equipment.float_column(n, int(v))
            vec = full.copy()
        for u, wt in zip(idx, w):
            vec[int(u)] = wt
        dense.append(vec)
    s = len(cols)
    if rho.is_exact:
        tab = np.empty((s, s), dtype=object)
        for i in range(s):
            tab[i, i] = Fraction(0)
            for j in range(i + 1, s):
                d, _ = kantorovich(dense[i], dense[j], metric, mode="exact")
                tab[i, j] = d
                tab[j, i] = d
    else:
        tab = np.zeros((s, s))
        for i in range(s):
            for j in range(i + 1, s):
                d, _ = kantorovich(dense[i], dense[j], metric, mode="float")
                tab[i, j] = d
                tab[j, i] = d
    return LevelMetric(n, tab, indices=subset, exact=rho.is_exact)


def iterate_intrinsic(
    eg: EquippedGraph,
    base: BaseMetricConfig,
    N: int,
    mode: str = "float",
    sample_threshold: int = SAMPLE_THRESHOLD,
    sample_size: int = SAMPLE_SIZE,
    seed: int = 0,
) -> list[LevelMetric]:
    """The intrinsic metric tables for levels 1..N."""
    if not 1 <= N < eg.graph.depth:
        raise ValueError(f"N must lie in 1..{eg.graph.depth - 1}")
    exact = mode == "exact"
    if exact and not (eg.is_exact and base.is_exact):
        raise TypeError("exact iteration needs exact equipment and base weights")
    out = [_level_one_metric(eg, base, exact)]
    while len(out) < N:
        out.append(
            transfer_step(
                eg,
                out[-1],
                sample_threshold=sample_threshold,
                sample_size=sample_size,
                seed=seed,
            )
        )
    return out


def covering_number(rho: LevelMetric, eps) -> int:
    """Greedy closed-ball net size: scan vertices in index order, opening a
    ball at every point not yet covered (the first seed is always index 0).
    An upper bound on the exhaustive covering number.
    """
    if (float(eps) if not isinstance(eps, Fraction) else eps) <= 0:
        raise ValueError("eps must be positive")
    if rho.is_exact and isinstance(eps, (Fraction, int)):
        s = rho.size
        uncovered = [True] * s
        count = 0
        for i in range(s):
            if uncovered[i]:
                count += 1
                row = rho.table[i]
                for j in range(s):
                    if uncovered[j] and row[j] <= eps:
                        uncovered[j] = False
        return count
    D = rho.as_floats()
    e = float(eps)
    uncovered = np.ones(rho.size, dtype=bool)
    count = 0
    while True:
        left = np.flatnonzero(uncovered)
        if len(left) == 0:
            return count
        c = left[0]
        count += 1
        uncovered &= D[c] > e


def cocycle_measure(eg: EquippedGraph, v: VertexId, mode: Optional[str] = None) -> dict:
    """The measure on root-based path prefixes ending at v whose weight on a
    path is the product of the cotransition weights along it.  Keys are
    index tuples for levels 1..level(v)."""
    v = eg.graph.check_vertex(v)
    if mode is None:
        mode = "exact" if eg.is_exact else "float"
    out = {}
    for p in enumerate_paths(eg.graph, VertexId(0, 0), v):
        w = Fraction(1) if mode == "exact" else 1.0
        for i in range(1, len(p.indices)):
            lam = eg.equipment.weight(i - 1, p.indices[i - 1], p.indices[i])
            w = w * (lam if mode == "exact" else float(lam))
        out[p.indices[1:]] = w
    return out


def _prefix_marginal_distance(m1: dict, m2: dict, rho1: LevelMetric):
    w1 = [Fraction(0)] * rho1.size if rho1.is_exact else np.zeros(rho1.size)
    w2 = [Fraction(0)] * rho1.size if rho1.is_exact else np.zeros(rho1.size)
    for k, w in m1.items():
        w1[k[0]] += w
    for k, w in m2.items():
        w2[k[0]] += w
    d, _ = kantorovich(w1, w2, FiniteMetric(rho1.table, exact=rho1.is_exact))
    return d


def _split_by_end(m: dict):
    ends: dict[int, dict] = {}
    for k, w in m.items():
        ends.setdefault(k[-1], {})[k[:-1]] = w
    return ends


def _nested(m1: dict, m2: dict, depth: int, rho1: LevelMetric, exact: bool):
    if depth == 1:
        return _prefix_marginal_distance(m1, m2, rho1)
    e1 = _split_by_end(m1)
    e2 = _split_by_end(m2)
    v1 = sorted(e1)
    v2 = sorted(e2)
    tot1 = [sum(e1[v].values()) for v in v1]
    tot2 = [sum(e2[v].values()) for v in v2]
    cond1 = [{k: w / t for k, w in e1[v].items()} for v, t in zip(v1, tot1)]
    cond2 = [{k: w / t for k, w in e2[v].items()} for v, t in zip(v2, tot2)]
    C = [
        [_nested(c1, c2, depth - 1, rho1, exact) for c2 in cond2]
        for c1 in cond1
    ]
    if exact:
        cost, _ = _kernels.solve_transport(tot1, tot2, C, Fraction(0))
        return cost
    cost, _ = _kernels.solve_transport_float(
        np.array(tot1), np.array(tot2), np.array(C, dtype=np.float64)
    )
    return cost


def nested_distance(eg: EquippedGraph, mu1: dict, mu2: dict, base: BaseMetricConfig, d: int):
    """Nested-coupling transport distance between two measures on depth-d
    path prefixes: end-level marginals are coupled under the cost given by
    recursively coupling the conditional prefix measures, bottoming out in a
    plain transport distance under the base metric on level 1.

    On single-vertex cocycle measures this reproduces the iterated intrinsic
    metric.  Depth is capped because the recursion visits the full
    conditional tree.
    """
    if d > NESTED_DEPTH_CAP:
        raise CapExceeded(f"nested distance capped at depth {NESTED_DEPTH_CAP}")
    if d < 1:
        raise ValueError("depth must be at least 1")

    def _validate(mu):
        if not mu:
            raise ValueError("empty prefix measure")
        total = None
        exact = True
        for k, w in mu.items():
            if len(k) != d:
                raise ValueError(f"prefix {k} is not depth {d}")
            eg.graph.check_path(FinitePath(0, (0,) + tuple(k)))
            exact = exact and isinstance(w, (int, Fraction))
            total = w if total is None else total + w
        if exact:
            if total != 1:
                raise ValueError("prefix weights must sum to 1")
        elif abs(float(total) - 1.0) > 1e-9:
            raise ValueError("prefix weights must sum to 1")
        return exact

    exact = _validate(mu1) and _validate(mu2) and base.is_exact
    rho1 = _level_one_metric(eg, base, exact)
    return _nested(mu1, mu2, d, rho1, exact)


@dataclass(frozen=True)
class StandardnessReport:
    """Covering/diameter table for levels 1..N, with optional best-ball
    masses for a supplied measure.

    Covering numbers always refer to the full level: above the table cap
    they are computed lazily, one center row at a time.  Diameters and ball
    masses at the levels listed in ``sampled_levels`` come from the sampled
    table instead and are disclosed as such.
    """

    eps: tuple
    levels: tuple
    covering: tuple  # covering[i][j] = N(eps[j]) at levels[i]
    diameters: tuple
    ball_masses: Optional[tuple]  # same layout as covering, or None
    sampled_levels: tuple
    sample_size: int
    seed: int
    base: dict

    def covering_curve(self, eps_index: int = 0) -> list[tuple[int, int]]:
        return [(lvl, row[eps_index]) for lvl, row in zip(self.levels, self.covering)]


def _ball_mass(D: np.ndarray, weights: np.ndarray, eps: float) -> float:
    return float(((D <= eps) @ weights).max())


def standardness_diagnostic(
    eg: EquippedGraph,
    base: BaseMetricConfig,
    N: int,
    eps_list: Sequence[float],
    measure=None,
    mode: str = "float",
    sample_threshold: int = SAMPLE_THRESHOLD,
    sample_size: int = SAMPLE_SIZE,
    seed: int = 0,
) -> StandardnessReport:
    """Tabulate covering numbers and diameters of the intrinsic metric for
    levels 1..N; with a coherent measure also the maximal epsilon-ball mass
    per level (sampled levels restrict centers and mass to the sample)."""
    eps = tuple(float(e) for e in eps_list)
    if not eps or any(e <= 0 for e in eps):
        raise ValueError("need positive epsilons")
    if measure is not None and measure.top_level < N:
        raise ValueError("measure prefix shorter than N")
    metrics = iterate_intrinsic(
        eg,
        base,
        N,
        mode=mode,
        sample_threshold=sample_threshold,
        sample_size=sample_size,
        seed=seed,
    )
    covering = []
    diameters = []
    masses = [] if measure is not None else None
    sampled = []
    for i, rho in enumerate(metrics):
        if rho.sampled and i > 0 and not metrics[i - 1].sampled:
            # full-level covering without the full table: one lazy row per
            # greedy center against the previous level's table
            cols = _compose_columns(
                _identity_columns(eg.graph.level_size(rho.level - 1)), eg, rho.level
            )
            prev = metrics[i - 1]
            D_prev = prev.table if not prev.is_exact else prev.as_floats()
            covering.append(tuple(_lumped_covering(cols, D_prev, float(e)) for e in eps))
        else:
            covering.append(tuple(covering_number(rho, e) for e in eps))
        diameters.append(float(rho.diameter()) if not rho.is_exact else rho.diameter())
        if rho.sampled:
            sampled.append(rho.level)
        if measure is not None:
            D = rho.as_floats()
            w = measure[rho.level].as_floats()
            if rho.sampled:
                w = w[rho.indices]
            masses.append(tuple(_ball_mass(D, w, e) for e in eps))
    return StandardnessReport(
        eps=eps,
        levels=tuple(range(1, N + 1)),
        covering=tuple(covering),
        diameters=tuple(diameters),
        ball_masses=None if masses is None else tuple(masses),
        sampled_levels=tuple(sampled),
        sample_size=sample_size,
        seed=seed,
        base=base.to_dict(),
    )


def concentration_test(
    eg: EquippedGraph,
    base: BaseMetricConfig,
    measure,
    n: int,
    eps: float,
    metrics: Optional[Sequence[LevelMetric]] = None,
) -> float:
    """Mass of the heaviest closed eps-ball of the level-n intrinsic metric
    under the measure's level-n weights."""
    if measure.top_level < n:
        raise ValueError("measure prefix shorter than n")
    if metrics is None:
        metrics = iterate_intrinsic(eg, base, n)
    rho = metrics[n - 1]
    if rho.level != n:
        raise ValueError("metric sequence does not line up with levels")
    w = measure[n].as_floats()
    if rho.sampled:
        w = w[rho.indices]
    return _ball_mass(rho.as_floats(), w, float(eps))


# -- lacunarization ----------------------------------------------------------


def _compose_columns(cols, eg: EquippedGraph, n: int):
    """Extend composed columns one level: new column v mixes the old columns
    of its predecessors with cotransition weights."""
    g = eg.graph
    indptr, indices = g.pred_block(n)
    lam = eg.equipment.float_level(n)
    out = []
    for v in range(g.level_size(n)):
        lo, hi = indptr[v], indptr[v + 1]
        if hi - lo == 1:
            idx, w = cols[indices[lo]]
            out.append((idx, w * lam[lo]))
            continue
        parts_i = []
        parts_w = []
        for e in range(lo, hi):
            idx, w = cols[indices[e]]
            parts_i.append(idx)
            parts_w.append(w * lam[e])
        cat_i = np.concatenate(parts_i)
        cat_w = np.concatenate(parts_w)
        uniq, inv = np.unique(cat_i, return_inverse=True)
        out.append((uniq, np.bincount(inv, weights=cat_w)))
    return out


def _identity_columns(size: int):
    return [(np.array([v], dtype=np.int64), np.array([1.0])) for v in range(size)]


def _column_distance(c1, c2, D: np.ndarray) -> float:
    """Transport distance between two sparse columns under ground table D."""
    i1, w1 = c1
    i2, w2 = c2
    if len(i1) == 1:
        return float(np.dot(w2, D[i1[0], i2]))
    if len(i2) == 1:
        return float(np.dot(w1, D[i2[0], i1]))
    cost, _ = _kernels.solve_transport_float(w1, w2, D[np.ix_(i1, i2)])
    return max(cost, 0.0)


def _lumped_covering(cols, D: np.ndarray, eps: float) -> int:
    """Greedy covering of the lumped next-level metric without building the
    full table: only the rows of chosen centers are computed."""
    s = len(cols)
    widths = max(len(c[0]) for c in cols)
    two = None
    if widths <= 2:
        sup_idx = np.empty((s, 2), dtype=np.int64)
        sup_w = np.zeros((s, 2))
        for v, (idx, w) in enumerate(cols):
            sup_idx[v, 0] = idx[0]
            sup_idx[v, 1] = idx[-1]
            sup_w[v, 0] = w[0]
            if len(idx) == 2:
                sup_w[v, 1] = w[1]
        two = (sup_idx, sup_w)
    uncovered = np.ones(s, dtype=bool)
    count = 0
    while True:
        left = np.flatnonzero(uncovered)
        if len(left) == 0:
            return count
        c = int(left[0])
        count += 1
        if two is not None:
            row = _kernels.transfer_rows_2(
                np.array([c], dtype=np.int64), two[0], two[1], D
            )[0]
        else:
            row = np.array([_column_distance(cols[c], cols[v], D) for v in range(s)])
            row[c] = 0.0
        uncovered &= row > eps


def _columns_to_markov(cols, lower_level: int, lower_size: int) -> MarkovMatrix:
    indptr = np.zeros(len(cols) + 1, dtype=np.int64)
    indptr[1:] = np.cumsum([len(c[0]) for c in cols])
    indices = np.concatenate([c[0] for c in cols])
    weights = np.concatenate([c[1] for c in cols])
    return MarkovMatrix(
        n=lower_level,
        shape=(lower_size, len(cols)),
        indptr=indptr,
        indices=indices,
        weights=weights,
    )


@dataclass(frozen=True)
class LacunarizationResult:
    """Accepted subsequence of levels with the composed cotransition chain.

    ``levels``/``coverings`` list the levels whose lumped covering numbers
    are non-increasing by construction.  When no admissible next level
    exists within ``max_depth``, the chain is extended to ``forced_level`` =
    max_depth anyway and ``flagged`` is set; the forced tail is not part of
    the verified subsequence.
    """

    eps: float
    levels: tuple[int, ...]
    coverings: tuple[int, ...]
    chain: tuple[MarkovMatrix, ...]
    flagged: bool
    forced_level: Optional[int] = None
    forced_covering: Optional[int] = None
    note: str = ""

    def all_levels(self) -> tuple[int, ...]:
        if self.forced_level is None:
            return self.levels
        return self.levels + (self.forced_level,)


def lacunarize(
    eg: EquippedGraph,
    base: BaseMetricConfig,
    eps: float,
    max_depth: int,
    sample_threshold: int = SAMPLE_THRESHOLD,
) -> LacunarizationResult:
    """Greedy lacunary subsequence: from the last accepted level, take the
    smallest next level whose lumped transfer step (composed cotransition
    columns across the gap) does not increase the covering number at eps."""
    g = eg.graph
    if not 1 <= max_depth < g.depth:
        raise ValueError(f"max_depth must lie in 1..{g.depth - 1}")
    eps = float(eps)
    rho = _level_one_metric(eg, base, exact=False)
    levels = [1]
    coverings = [covering_number(rho, eps)]
    chain: list[MarkovMatrix] = []
    flagged = False
    forced_level = None
    forced_covering = None
    note = ""
    cur = 1
    while cur < max_depth:
        cols = _identity_columns(g.level_size(cur))
        accepted = None
        cov = None
        for n in range(cur + 1, max_depth + 1):
            cols = _compose_columns(cols, eg, n)
            cov = _lumped_covering(cols, rho.table, eps)
            if cov <= coverings[-1]:
                accepted = n
                break
        if accepted is None:
            flagged = True
            forced_level = max_depth
            forced_covering = cov
            chain.append(_columns_to_markov(cols, cur, g.level_size(cur)))
            note = f"no level within max_depth keeps the covering at {coverings[-1]}"
            break
        chain.append(_columns_to_markov(cols, cur, g.level_size(cur)))
        levels.append(accepted)
        coverings.append(cov)
        cur = accepted
        if cur < max_depth:
            size = g.level_size(cur)
            if size > sample_threshold:
                flagged = True
                note = f"level {cur} table ({size} vertices) exceeds the cap"
                break
            sup = _padded_columns_from(cols)
            if sup is not None:
                tab = _kernels.transfer_table_2(sup[0], sup[1], rho.table)
            else:
                tab = np.zeros((size, size))
                for i in range(size):
                    for j in range(i + 1, size):
                        d = _column_distance(cols[i], cols[j], rho.table)
                        tab[i, j] = tab[j, i] = d
            rho = LevelMetric(cur, tab, exact=False)
    return LacunarizationResult(
        eps=eps,
        levels=tuple(levels),
        coverings=tuple(coverings),
        chain=tuple(chain),
        flagged=flagged,
        forced_level=forced_level,
        forced_covering=forced_covering,
        note=note,
    )


def _padded_columns_from(cols):
    if max(len(c[0]) for c in cols) > 2:
        return None
    s = len(cols)
    sup_idx = np.empty((s, 2), dtype=np.int64)
    sup_w = np.zeros((s, 2))
    for v, (idx, w) in enumerate(cols):
        sup_idx[v, 0] = idx[0]
        sup_idx[v, 1] = idx[-1]
        sup_w[v, 0] = w[0]
        if len(idx) == 2:
            sup_w[v, 1] = w[1]
    return sup_idx, sup_w
