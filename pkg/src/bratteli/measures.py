"""Per-level functions and probability measures.

Values live in one of two numeric modes:

* exact: tuples of ``fractions.Fraction``,
* float: numpy float64 arrays.

A mode is chosen at construction and never changes silently; mixing modes in
an operation raises.  Probability weights must sum to one (exactly, or within
``SUM_TOL`` in float mode) and be non-negative.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .graph import GradedGraph, VertexId

__all__ = [
    "LevelFunction",
    "LevelMeasure",
    "SUM_TOL",
    "delta",
    "inner",
    "tv_distance",
    "uniform",
]

SUM_TOL = 1e-12

Weight = Union[Fraction, float]


def _as_exact(values) -> tuple[Fraction, ...]:
    return tuple(v if isinstance(v, Fraction) else Fraction(v) for v in values)


class LevelFunction:
    """Real-valued function on the vertices of one level."""

    __slots__ = ("level", "values", "is_exact")

    def __init__(self, level: int, values, exact: bool | None = None):
        self.level = level
        if exact is None:
            exact = not isinstance(values, np.ndarray)
        self.is_exact = exact
        if exact:
            self.values = _as_exact(values)
        else:
            self.values = np.asarray(values, dtype=np.float64)

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def as_floats(self) -> np.ndarray:
        if self.is_exact:
            return np.array([float(v) for v in self.values], dtype=np.float64)
        return self.values

    def __repr__(self):
        mode = "exact" if self.is_exact else "float"
        return f"LevelFunction(level={self.level}, {mode}, size={len(self)})"


class LevelMeasure:
    """Probability weights on the vertices of one level."""

    __slots__ = ("level", "weights", "is_exact")

    def __init__(self, level: int, weights, exact: bool | None = None, check: bool = True):
        self.level = level
        if exact is None:
            exact = not isinstance(weights, np.ndarray)
        self.is_exact = exact
        if exact:
            self.weights = _as_exact(weights)
        else:
            self.weights = np.asarray(weights, dtype=np.float64)
        if check:
            self._check()

    def _check(self):
        if self.is_exact:
            if any(w < 0 for w in self.weights):
                raise ValueError("negative weight")
            total = sum(self.weights)
            if total != 1:
                raise ValueError(f"weights sum to {total}, expected 1")
        else:
            w = self.weights
            if w.size == 0 or np.any(w < 0):
                raise ValueError("weights must be non-negative and non-empty")
            if abs(float(w.sum()) - 1.0) > SUM_TOL:
                raise ValueError(f"weights sum to {w.sum()!r}, expected 1")

    def __len__(self):
        return len(self.weights)

    def __getitem__(self, i):
        return self.weights[i]

    def support(self) -> list[int]:
        return [i for i, w in enumerate(self.weights) if w > 0]

    def as_floats(self) -> np.ndarray:
        if self.is_exact:
            return np.array([float(w) for w in self.weights], dtype=np.float64)
        return self.weights

    def to_float_measure(self) -> "LevelMeasure":
        if not self.is_exact:
            return self
        return LevelMeasure(self.level, self.as_floats(), exact=False, check=False)

    def __repr__(self):
        mode = "exact" if self.is_exact else "float"
        return f"LevelMeasure(level={self.level}, {mode}, size={len(self)})"


def _same_mode(a, b):
    if a.is_exact != b.is_exact:
        raise TypeError("exact and float objects cannot be mixed")
    if a.level != b.level or len(a) != len(b):
        raise ValueError("level or size mismatch")


def delta(g: GradedGraph, v: VertexId, exact: bool = True) -> LevelMeasure:
    """Point mass at v."""
    v = g.check_vertex(v)
    size = g.level_size(v.level)
    if exact:
        w = [Fraction(0)] * size
        w[v.index] = Fraction(1)
        return LevelMeasure(v.level, w, check=False)
    w = np.zeros(size)
    w[v.index] = 1.0
    return LevelMeasure(v.level, w, check=False)


def uniform(g: GradedGraph, n: int, exact: bool = True) -> LevelMeasure:
    """Uniform distribution on level n."""
    size = g.level_size(n)
    if exact:
        return LevelMeasure(n, [Fraction(1, size)] * size, check=False)
    return LevelMeasure(n, np.full(size, 1.0 / size), check=False)


def tv_distance(m1: LevelMeasure, m2: LevelMeasure):
    """Total-variation distance, half the l1 difference of the weights."""
    _same_mode(m1, m2)
    if m1.is_exact:
        return sum(abs(a - b) for a, b in zip(m1.weights, m2.weights)) / 2
    return float(np.abs(m1.weights - m2.weights).sum() / 2.0)


def inner(f: LevelFunction, m: LevelMeasure):
    """Pairing sum_v f(v) mu(v); both arguments in the same mode."""
    _same_mode(f, m)
    if f.is_exact:
        return sum(a * b for a, b in zip(f.values, m.weights))
    return float(np.dot(f.values, m.weights))
